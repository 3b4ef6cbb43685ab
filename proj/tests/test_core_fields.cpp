#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <json.hpp>

#include "flns/maxwellian.hpp"
#include "flns/moments.hpp"
#include "flns/parallel.hpp"
#include "flns/snapshot.hpp"

using namespace flns;

namespace {

// Midpoint quadrature of g over [a, b] with n points; used as an independent oracle.
template <class G>
double quad(G g, double a, double b, int n = 400000) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += g(a + (i + 0.5) * h);
  return s * h;
}

double gauss(double x, double c) { return std::exp(-0.5 * (x - c) * (x - c)) / std::sqrt(2.0 * std::numbers::pi); }

DistributionField uniform_maxwellian(const PhaseGrid& g, double u0, double rho0 = 1.0) {
  std::vector<double> rho(g.space_cells(), rho0);
  VectorField u(g.dim, g.space_cells());
  for (std::size_t s = 0; s < g.space_cells(); ++s) u(0, s) = u0;
  return sample_maxwellian(rho, u, g);
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(PhaseGrid(3, 8, 8, 6.0), ConfigError);
  CHECK_THROWS_AS(PhaseGrid(1, 7, 8, 6.0), ConfigError);
  CHECK_THROWS_AS(PhaseGrid(1, 8, 2, 6.0), ConfigError);
  CHECK_THROWS_AS(PhaseGrid(1, 8, 8, 0.0), ConfigError);
  const PhaseGrid g(2, 8, 6, 3.0);
  CHECK(g.dx() == doctest::Approx(0.125));
  CHECK(g.dxi() == doctest::Approx(1.0));
  CHECK(g.phase_cells() == 64u * 36u);
  CHECK(g.xi_center(0) == doctest::Approx(-2.5));
  CHECK(g.xi_face(2) == doctest::Approx(0.0));
  // axis 0 varies slowest
  CHECK(g.vel_coord(7, 0) == 1);
  CHECK(g.vel_coord(7, 1) == 1);
  CHECK(g.space_coord(9, 0) == 1);
  CHECK(g.space_coord(9, 1) == 1);
}

TEST_CASE("moments of the zero field follow the vacuum convention") {
  const PhaseGrid g(2, 4, 4, 2.0);
  const DistributionField f(g);
  const auto mac = compute_moments(f);
  for (std::size_t s = 0; s < g.space_cells(); ++s) {
    CHECK(mac.rho[s] == 0.0);
    CHECK(mac.m(0, s) == 0.0);
    CHECK(mac.u_f(1, s) == 0.0);
  }
}

TEST_CASE("single phase cell") {
  const PhaseGrid g(1, 8, 16, 4.0);
  DistributionField f(g);
  const std::size_t s = 3, v = 11;
  f.at(s, v) = 1.0 / (g.dx() * g.dxi());
  const auto mac = compute_moments(f);
  CHECK(mac.u_f(0, s) == doctest::Approx(g.xi_center(int(v))).epsilon(1e-15));
  CHECK(std::abs(mac.ptilde_at(0, 0, s)) < 1e-14);
  CHECK(mac.rho[s] * g.dx() == doctest::Approx(1.0));
  CHECK(mac.u_f(0, 2) == 0.0);
}

TEST_CASE("Maxwellian moments match independent quadrature") {
  const PhaseGrid g(1, 4, 64, 6.0);
  const auto f = uniform_maxwellian(g, 0.0);
  const auto mac = compute_moments(f);
  const double mass = quad([](double x) { return gauss(x, 0.0); }, -6.0, 6.0);
  const double second = quad([](double x) { return x * x * gauss(x, 0.0); }, -6.0, 6.0) / mass;
  CHECK(std::abs(second - 1.0) < 1e-6);
  for (std::size_t s = 0; s < g.space_cells(); ++s) {
    CHECK(std::abs(mac.rho[s] - 1.0) < 1e-6);
    CHECK(std::abs(mac.ptilde_at(0, 0, s) - second) < 1e-6);
  }
}

TEST_CASE("sampling is exact in mass and centred on u0") {
  const PhaseGrid g(1, 16, 64, 8.0);
  const auto f = uniform_maxwellian(g, 0.5);
  const auto mac = compute_moments(f);
  const double z = quad([](double x) { return gauss(x, 0.5); }, -8.0, 8.0);
  const double mean = quad([](double x) { return x * gauss(x, 0.5); }, -8.0, 8.0) / z;
  for (std::size_t s = 0; s < g.space_cells(); ++s) {
    CHECK(std::abs(mac.rho[s] - 1.0) < 1e-15);
    CHECK(std::abs(mac.u_f(0, s) - 0.5) < 1e-8);
    CHECK(std::abs(mac.u_f(0, s) - mean) < 1e-8);
  }
}

TEST_CASE("cosine density keeps unit mass") {
  const PhaseGrid g(1, 32, 32, 6.0);
  std::vector<double> rho(g.space_cells());
  for (std::size_t s = 0; s < rho.size(); ++s) rho[s] = 1.0 + 0.1 * std::cos(2.0 * std::numbers::pi * g.x_center(int(s)));
  const auto f = sample_maxwellian(rho, VectorField(1, rho.size()), g);
  CHECK(std::abs(f.mass() - 1.0) < 1e-14);
}

TEST_CASE("tail containment") {
  const PhaseGrid g(1, 4, 32, 4.0);
  CHECK_THROWS_AS(uniform_maxwellian(g, 2.5), TailOverflow);
  // |u0| = xi_max / 2 is allowed by the bound but leaves too much mass in the last layer
  const PhaseGrid narrow(1, 4, 32, 3.0);
  CHECK_THROWS_AS(uniform_maxwellian(narrow, 1.5), TailOverflow);
  CHECK_NOTHROW(uniform_maxwellian(PhaseGrid(1, 4, 32, 8.0), 1.0));
}

TEST_CASE("moments are linear and Galilean") {
  const PhaseGrid g(1, 8, 64, 8.0);
  const auto a = uniform_maxwellian(g, 0.3);
  const auto b = uniform_maxwellian(g, -0.7, 2.0);
  DistributionField c(g);
  for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] = 0.25 * a.values[i] + 3.0 * b.values[i];
  const auto ma = compute_moments(a), mb = compute_moments(b), mc = compute_moments(c);
  const auto ka = local_moment(a, 2), kb = local_moment(b, 2), kc = local_moment(c, 2);
  for (std::size_t s = 0; s < g.space_cells(); ++s) {
    CHECK(mc.rho[s] == doctest::Approx(0.25 * ma.rho[s] + 3.0 * mb.rho[s]).epsilon(1e-14));
    CHECK(mc.m(0, s) == doctest::Approx(0.25 * ma.m(0, s) + 3.0 * mb.m(0, s)).epsilon(1e-13));
    CHECK(kc[s] == doctest::Approx(0.25 * ka[s] + 3.0 * kb[s]).epsilon(1e-14));
    CHECK(std::abs(mc.m(0, s) - mc.rho[s] * mc.u_f(0, s)) < 1e-14);
  }
  const auto shifted = uniform_maxwellian(g, 0.3 + g.dxi());
  const auto ms = compute_moments(shifted);
  CHECK(std::abs(ms.u_f(0, 0) - ma.u_f(0, 0) - g.dxi()) < 1e-8);
}

TEST_CASE("moment interpolation inequality") {
  SUBCASE("zero field") {
    const PhaseGrid g(1, 4, 8, 2.0);
    for (double r : moment_interpolation_check(DistributionField(g), 1, 2)) CHECK(r <= 0.0);
  }
  SUBCASE("Maxwellian, k1 = 1, k2 = 2") {
    const PhaseGrid g(1, 4, 64, 6.0);
    const auto f = uniform_maxwellian(g, 0.0);
    const auto res = moment_interpolation_check(f, 1, 2);
    // both sides by direct summation
    double m1 = 0.0, m2 = 0.0;
    for (int j = 0; j < g.nxi; ++j) {
      m1 += std::abs(g.xi_center(j)) * f.at(0, j) * g.dxi();
      m2 += g.xi_center(j) * g.xi_center(j) * f.at(0, j) * g.dxi();
    }
    const double expected = m1 - (2.0 * f.max_value() + 1.0) * std::pow(m2, 2.0 / 3.0);
    CHECK(res[0] == doctest::Approx(expected).epsilon(1e-12));
    for (double r : res) CHECK(r <= 0.0);
  }
  SUBCASE("single cell, k1 = 0, k2 = 2") {
    const PhaseGrid g(1, 4, 16, 4.0);
    DistributionField f(g);
    f.at(1, 13) = 1.0;
    const double xi = g.xi_center(13);
    const double expected = g.dxi() - 3.0 * std::pow(xi * xi * g.dxi(), 1.0 / 3.0);
    const auto res = moment_interpolation_check(f, 0, 2);
    CHECK(res[1] == doctest::Approx(expected).epsilon(1e-13));
    CHECK(res[1] <= 0.0);
  }
  SUBCASE("random fields") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int dim : {1, 2}) {
      const PhaseGrid g(dim, 4, 16, 4.0);
      for (int trial = 0; trial < 50; ++trial) {
        DistributionField f(g);
        for (std::size_t s = 0; s < g.space_cells(); ++s)
          for (std::size_t v = 0; v < g.vel_cells(); ++v) {
            bool outer = false;
            for (int a = 0; a < dim; ++a) {
              const int j = g.vel_coord(v, a);
              outer = outer || j == 0 || j == g.nxi - 1;
            }
            f.at(s, v) = outer ? 0.0 : 3.0 * unit(rng);
          }
        for (int k1 = 0; k1 < 3; ++k1)
          for (double r : moment_interpolation_check(f, k1, k1 + 2)) CHECK(r <= 1e-12);
      }
    }
  }
}

TEST_CASE("moments do not depend on the worker count") {
  const PhaseGrid g(2, 8, 12, 4.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DistributionField f(g);
  for (double& v : f.values) v = unit(rng);
  set_worker_count(1);
  const auto a = compute_moments(f);
  set_worker_count(3);
  const auto b = compute_moments(f);
  set_worker_count(1);
  CHECK(a.rho == b.rho);
  CHECK(a.m.data == b.m.data);
  CHECK(a.ptilde.data == b.ptilde.data);
}

TEST_CASE("snapshot round trip and layout") {
  const PhaseGrid g(2, 4, 4, 3.0);
  DistributionField f(g, 0.75);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = 0.5 + double(i);
  FluidField u(g);
  u.velocity(1, 2) = -1.25;
  u.pressure[3] = 2.0;
  const auto path = std::filesystem::temp_directory_path() / "flns_test_snapshot.flns";
  const auto snap = pack_kinetic(f, u);
  write_snapshot(path, snap);
  write_snapshot_sidecar(path, snap);

  std::ifstream raw(path, std::ios::binary);
  char head[8];
  raw.read(head, 8);
  CHECK(std::string(head, 4) == "FLNS");
  CHECK(std::string(head + 4, 4) == "KFLD");
  std::int64_t ints[4];
  raw.read(reinterpret_cast<char*>(ints), sizeof ints);
  CHECK(ints[0] == 1);
  CHECK(ints[1] == 2);
  CHECK(ints[2] == 4);
  CHECK(ints[3] == 4);

  DistributionField f2;
  FluidField u2;
  unpack_kinetic(read_snapshot(path), f2, u2);
  CHECK(f2.grid == g);
  CHECK(f2.time == 0.75);
  CHECK(f2.values == f.values);
  CHECK(u2.velocity.data == u.velocity.data);
  CHECK(u2.pressure == u.pressure);

  std::ifstream side(path.string() + ".json");
  const auto j = nlohmann::json::parse(side);
  CHECK(j["magic"] == "FLNS");
  CHECK(j["nx"] == 4);
  CHECK(j["payload_length"] == snap.payload.size());
}
