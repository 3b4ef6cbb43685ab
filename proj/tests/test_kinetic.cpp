#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "flns/kinetic.hpp"
#include "flns/maxwellian.hpp"
#include "flns/moments.hpp"
#include "flns/parallel.hpp"

using namespace flns;

namespace {

constexpr double kPi = std::numbers::pi;

double l1_diff(const DistributionField& a, const DistributionField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
  return s * a.grid.phase_volume();
}

double max_diff(const DistributionField& a, const DistributionField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s = std::max(s, std::abs(a.values[i] - b.values[i]));
  return s;
}

// Smooth off-equilibrium 1D state: two shifted bumps with x-dependent weight.
DistributionField bimodal(const PhaseGrid& g) {
  DistributionField f(g);
  for (std::size_t s = 0; s < g.space_cells(); ++s) {
    const double x = g.x_at(s, 0);
    const double w = 0.5 + 0.3 * std::sin(2 * kPi * x);
    for (std::size_t v = 0; v < g.vel_cells(); ++v) {
      double val = 1.0;
      for (int a = 0; a < g.dim; ++a) {
        const double xi = g.xi_at(v, a);
        val *= w * std::exp(-2.0 * (xi - 1.0) * (xi - 1.0)) + (1 - w) * std::exp(-2.0 * (xi + 1.2) * (xi + 1.2));
      }
      f.at(s, v) = val;
    }
  }
  return f;
}

// Grid Maxwellian with the column's mass whose discrete mean matches u_f, found by bisection.
std::vector<double> matched_maxwellian(const PhaseGrid& g, std::span<const double> col) {
  double rho = 0.0, m = 0.0;
  for (int j = 0; j < g.nxi; ++j) {
    rho += col[j];
    m += g.xi_center(j) * col[j];
  }
  const double target = m / rho;
  auto mean_of = [&](double c) {
    double z = 0.0, zm = 0.0;
    for (int j = 0; j < g.nxi; ++j) {
      const double e = std::exp(-0.5 * (g.xi_center(j) - c) * (g.xi_center(j) - c));
      z += e;
      zm += e * g.xi_center(j);
    }
    return zm / z;
  };
  double lo = -g.xi_max, hi = g.xi_max;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_of(mid) < target ? lo : hi) = mid;
  }
  const double c = 0.5 * (lo + hi);
  std::vector<double> out(g.nxi);
  double z = 0.0;
  for (int j = 0; j < g.nxi; ++j) z += out[j] = std::exp(-0.5 * (g.xi_center(j) - c) * (g.xi_center(j) - c));
  for (double& v : out) v *= rho / z;
  return out;
}

// Discrete relative entropy of every column against its own Maxwellian (1D).
double self_relative_entropy(const DistributionField& f) {
  const PhaseGrid& g = f.grid;
  double h = 0.0;
  for (std::size_t s = 0; s < g.space_cells(); ++s) {
    const auto col = f.column(s);
    const auto mx = matched_maxwellian(g, col);
    for (int j = 0; j < g.nxi; ++j)
      if (col[j] > 0) h += col[j] * std::log(col[j] / mx[j]) - col[j] + mx[j];
  }
  return h * g.phase_volume();
}

SimParams params(double alpha, double beta, double sigma) {
  SimParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.sigma = sigma;
  return p;
}

FluidField constant_fluid(const PhaseGrid& g, double ux, double uy = 0.0) {
  FluidField u(g);
  for (std::size_t s = 0; s < g.space_cells(); ++s) {
    u.velocity(0, s) = ux;
    if (g.dim == 2) u.velocity(1, s) = uy;
  }
  return u;
}

double lp_power(const DistributionField& f, double p) {
  double s = 0.0;
  for (double v : f.values) s += std::pow(v, p);
  return s * f.grid.phase_volume();
}

}  // namespace

TEST_CASE("transport leaves x-independent data unchanged") {
  for (int dim : {1, 2}) {
    const PhaseGrid g(dim, 8, 8, 3.0);
    DistributionField f(g);
    for (std::size_t s = 0; s < g.space_cells(); ++s)
      for (std::size_t v = 0; v < g.vel_cells(); ++v) f.at(s, v) = 1.0 + 0.1 * double(v);
    const auto out = step_transport(f, 0.45 * g.dx() / g.xi_max);
    CHECK(out.values == f.values);
  }
}

TEST_CASE("transport conserves mass and positivity") {
  const PhaseGrid g(2, 16, 8, 3.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DistributionField f(g);
  for (double& v : f.values) v = unit(rng);
  const double m0 = f.mass();
  auto out = f;
  for (int k = 0; k < 10; ++k) out = step_transport(out, 0.45 * g.dx() / g.xi_max, k % 2 == 1);
  CHECK(std::abs(out.mass() - m0) <= 1e-13 * m0);
  CHECK(out.min_value() >= 0.0);
}

TEST_CASE("transport rejects steps above the CFL bound") {
  const PhaseGrid g(1, 16, 8, 4.0);
  const DistributionField f(g);
  CHECK_THROWS_AS(step_transport(f, 0.51 * g.dx() / (g.xi_max - 0.5 * g.dxi())), CflViolation);
  CHECK_NOTHROW(step_transport(f, 0.49 * g.dx() / (g.xi_max - 0.5 * g.dxi())));
}

TEST_CASE("square wave advected over one period converges") {
  // single populated velocity cell with xi = 0.5; period 2
  std::vector<double> err;
  for (int nx : {64, 128, 256, 512}) {
    const PhaseGrid g(1, nx, 4, 2.0);
    DistributionField f(g);
    for (int i = 0; i < nx; ++i) f.at(i, 2) = (g.x_center(i) > 0.25 && g.x_center(i) < 0.75) ? 1.0 : 0.0;
    const double period = 1.0 / g.xi_center(2);
    const int steps = static_cast<int>(std::ceil(period / (0.4 * g.dx() / 1.5)));
    auto out = f;
    for (int k = 0; k < steps; ++k) out = step_transport(out, period / steps);
    err.push_back(l1_diff(out, f));
  }
  for (std::size_t i = 1; i < err.size(); ++i) CHECK(err[i] < err[i - 1]);
  const double order = std::log2(err[err.size() - 2] / err.back());
  MESSAGE("square-wave L1 order " << order);
  CHECK(order >= 1.0);
}

TEST_CASE("drift toward the fluid velocity") {
  SUBCASE("alpha = 0 is the identity") {
    const PhaseGrid g(1, 8, 16, 4.0);
    const auto f = bimodal(g);
    const auto out = step_drift_fluid(f, constant_fluid(g, 0.3), 0.0, 0.1);
    CHECK(out.values == f.values);
  }
  SUBCASE("symmetric Maxwellian keeps zero momentum") {
    const PhaseGrid g(2, 4, 16, 6.0);
    const auto f = sample_maxwellian(std::vector<double>(g.space_cells(), 1.0), VectorField(2, g.space_cells()), g);
    const auto out = step_drift_fluid(f, constant_fluid(g, 0.0), 1.0, 0.01);
    const auto mac = compute_moments(out);
    for (std::size_t s = 0; s < g.space_cells(); ++s) {
      CHECK(std::abs(mac.m(0, s)) < 1e-15);
      CHECK(std::abs(mac.m(1, s)) < 1e-15);
    }
  }
  SUBCASE("first moment follows the drag ODE") {
    const PhaseGrid g(1, 4, 72, 4.0);  // cell centre at -0.5
    DistributionField f(g);
    const int v = 31;
    REQUIRE(g.xi_center(v) == doctest::Approx(-0.5));
    for (std::size_t s = 0; s < g.space_cells(); ++s) f.at(s, v) = 1.0;
    const double mass = f.mass();
    const double dt = 1e-3;
    const auto out = step_drift_fluid(f, constant_fluid(g, 0.5), 1.0, dt);
    double m_before = 0.0, m_after = 0.0;
    for (std::size_t s = 0; s < g.space_cells(); ++s)
      for (int j = 0; j < g.nxi; ++j) {
        m_before += g.xi_center(j) * f.at(s, j);
        m_after += g.xi_center(j) * out.at(s, j);
      }
    const double vol = g.phase_volume();
    const double moved = (m_after - m_before) * vol;
    const double expected = 1.0 * (0.5 - (-0.5)) * dt * mass;
    CHECK(moved > 0.0);
    CHECK(std::abs(moved - expected) <= 10 * dt * dt + g.dxi() * expected);
    CHECK(std::abs(out.mass() - mass) <= 1e-15);
  }
}

TEST_CASE("collision step") {
  SUBCASE("grid Maxwellian with matched coefficients is a fixed point") {
    const PhaseGrid g(2, 4, 24, 6.0);
    const double c[2] = {0.3, -0.45};
    const auto mx = grid_maxwellian(g, c);
    DistributionField f(g);
    for (std::size_t s = 0; s < g.space_cells(); ++s)
      for (std::size_t v = 0; v < g.vel_cells(); ++v) f.at(s, v) = (1.0 + 0.1 * double(s)) * mx[v];
    const auto out = step_collision_fp(f, 2.0, 2.0, 1e-12, 0.05);
    CHECK(max_diff(out, f) <= 1e-13 * f.max_value());
  }
  SUBCASE("zero coefficients are the identity") {
    const PhaseGrid g(1, 8, 16, 4.0);
    const auto f = bimodal(g);
    CHECK(step_collision_fp(f, 0.0, 0.0, 1e-12, 0.1).values == f.values);
  }
  SUBCASE("rho and m per column are unchanged") {
    for (int dim : {1, 2}) {
      const PhaseGrid g(dim, 4, 24, 5.0);
      const auto f = bimodal(g);
      const auto out = step_collision_fp(f, 3.0, 1.5, 1e-12, 0.1);
      const auto a = compute_moments(f), b = compute_moments(out);
      for (std::size_t s = 0; s < g.space_cells(); ++s) {
        CHECK(std::abs(a.rho[s] - b.rho[s]) <= 1e-12);
        for (int k = 0; k < dim; ++k) CHECK(std::abs(a.m(k, s) - b.m(k, s)) <= 1e-12);
      }
      CHECK(out.min_value() >= 0.0);
    }
  }
  SUBCASE("stiff relaxation in one step") {
    const PhaseGrid g(1, 8, 48, 6.0);
    const auto f = bimodal(g);
    const double eps = 1e-3, dt = 1e-2;
    const auto one = step_collision_fp(f, 1 / eps, 1 / eps, 1e-12, dt);
    auto ref = f;
    for (int k = 0; k < 1000; ++k) ref = step_collision_fp(ref, 1 / eps, 1 / eps, 1e-12, dt / 1000);
    const double h0 = self_relative_entropy(f);
    const double h1 = self_relative_entropy(one);
    const double href = self_relative_entropy(ref);
    MESSAGE("H0 " << h0 << " one step " << h1 << " reference " << href);
    CHECK(h0 > 1e-2);
    CHECK(h1 <= 1e-6 * h0);
    CHECK(href <= 1e-6 * h0);
    // both relax toward the same column Maxwellians, so Pinsker bounds their distance
    CHECK(l1_diff(one, ref) <= std::sqrt(2 * f.mass() * std::max(h1, 0.0)) + std::sqrt(2 * f.mass() * std::max(href, 0.0)));
  }
  SUBCASE("asymptotic preservation") {
    const PhaseGrid g(1, 4, 48, 6.0);
    const auto f = bimodal(g);
    auto distance = [&](double eps) {
      const auto out = step_collision_fp(f, 1 / eps, 1 / eps, 1e-12, 0.05);
      double d = 0.0;
      for (std::size_t s = 0; s < g.space_cells(); ++s) {
        const auto mx = matched_maxwellian(g, f.column(s));
        for (int j = 0; j < g.nxi; ++j) d += std::abs(out.at(s, j) - mx[j]);
      }
      return d * g.phase_volume();
    };
    const double d1 = distance(1e-1), d2 = distance(1e-2), d3 = distance(1e-3);
    MESSAGE("distance to Maxwellian " << d1 << " " << d2 << " " << d3);
    CHECK(d2 < d1);
    CHECK(d3 < d2);
    CHECK(d3 <= 10 * 1e-3 * f.mass());
  }
}

TEST_CASE("full kinetic step") {
  SUBCASE("global equilibrium") {
    for (int dim : {1, 2}) {
      const PhaseGrid g(dim, 8, dim == 1 ? 64 : 32, 8.0);
      VectorField u0(dim, g.space_cells());
      for (std::size_t s = 0; s < g.space_cells(); ++s) u0(0, s) = 0.25;
      const auto f = sample_maxwellian(std::vector<double>(g.space_cells(), 1.0), u0, g);
      const auto mac = compute_moments(f);
      FluidField u(g);
      u.velocity = mac.u_f;
      const auto out = step_kinetic(f, u, params(0.7, 0.8, 1.5), 0.01);
      CHECK(max_diff(out, f) <= 1e-12);
    }
  }
  SUBCASE("degenerate parameters reduce to transport") {
    const PhaseGrid g(2, 8, 8, 3.0);
    const auto f = bimodal(g);
    const FluidField u = constant_fluid(g, 0.2, -0.1);
    const double dt = 0.4 * g.dx() / g.xi_max;
    CHECK(step_kinetic(f, u, params(0, 0, 0), dt).values == step_transport(f, dt).values);
  }
  SUBCASE("mass and positivity") {
    const PhaseGrid g(2, 8, 16, 5.0);
    const auto f = bimodal(g);
    const auto out = step_kinetic(f, constant_fluid(g, 0.2, -0.1), params(1, 1, 1), 0.02);
    CHECK(std::abs(out.mass() - f.mass()) <= 1e-13 * f.mass());
    CHECK(out.min_value() >= 0.0);
  }
  SUBCASE("second order in time on the explicit path") {
    const PhaseGrid g(1, 32, 48, 6.0);
    const auto f = bimodal(g);
    const FluidField u = constant_fluid(g, 0.3);
    const SimParams p = params(1.0, 1.0, 0.0);
    const double T = 0.04, dt0 = 0.004;
    auto run = [&](int n) {
      auto s = f;
      for (int k = 0; k < n; ++k) s = step_kinetic(s, u, p, T / n);
      return s;
    };
    const int base = static_cast<int>(std::lround(T / dt0));
    const auto ref = run(16 * base);
    const double e1 = l1_diff(run(base), ref), e2 = l1_diff(run(2 * base), ref);
    const double order = std::log2(e1 / e2);
    MESSAGE("Strang order " << order << " errors " << e1 << " " << e2);
    CHECK(order >= 1.8);
  }
  SUBCASE("independent of the worker count") {
    const PhaseGrid g(2, 8, 16, 5.0);
    const auto f = bimodal(g);
    const FluidField u = constant_fluid(g, 0.2, -0.1);
    set_worker_count(1);
    const auto a = step_kinetic(f, u, params(1, 1, 1), 0.02);
    set_worker_count(4);
    const auto b = step_kinetic(f, u, params(1, 1, 1), 0.02);
    set_worker_count(1);
    CHECK(a.values == b.values);
  }
}

TEST_CASE("explicit alignment matches the L^p growth rate") {
  // sigma = 0: d/dt ||f||_p^p = d (alpha + beta) (p - 1) ||f||_p^p
  std::vector<double> rel;
  for (int nxi : {32, 64, 128}) {
    const PhaseGrid g(1, 4, nxi, 6.0);
    const auto f0 = bimodal(g);
    const double p = 2.0, a = 0.6, b = 0.9, dt = 1e-5;
    auto f = f0;
    FluidField u = constant_fluid(g, 0.1);
    relax_velocity(f, u, RelaxCoefficients{a, b, 0.0}, 1e-12, dt, false);
    const double rate = (lp_power(f, p) - lp_power(f0, p)) / dt;
    const double expected = (a + b) * (p - 1) * lp_power(f0, p);
    rel.push_back(std::abs(rate / expected - 1.0));
  }
  MESSAGE("relative rate errors " << rel[0] << " " << rel[1] << " " << rel[2]);
  CHECK(rel[2] < rel[1]);
  CHECK(rel[1] < rel[0]);
  CHECK(rel[2] < 0.05);
}

TEST_CASE("explicit alignment rejects large drift numbers") {
  const PhaseGrid g(1, 4, 16, 4.0);
  const auto f = bimodal(g);
  FluidField u = constant_fluid(g, 0.0);
  auto copy = f;
  CHECK_THROWS_AS(relax_velocity(copy, u, RelaxCoefficients{5.0, 5.0, 0.0}, 1e-12, 1.0, false), CflViolation);
}

TEST_CASE("step plan") {
  const PhaseGrid g(1, 16, 16, 4.0);
  const auto f = bimodal(g);
  const FluidField u = constant_fluid(g, 0.1);
  const auto plan = plan_kinetic_step(f, u, params(1, 1, 1));
  CHECK(plan.dt > 0.0);
  CHECK(plan.dt <= max_stable_dt(f, u, params(1, 1, 1)));
  CHECK(transport_cfl(g, plan.dt) <= 1.0);
  CHECK(plan.to_json_line(3, 0.0).find("\"dt\"") != std::string::npos);
}
