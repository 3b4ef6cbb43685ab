#include "flns/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flns/parallel.hpp"
#include "flns/sum.hpp"

namespace flns {

double DistributionField::mass() const {
  CompensatedSum sum;
  for (double v : values) sum += v;
  return sum.value() * grid.phase_volume();
}

double DistributionField::max_value() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double DistributionField::min_value() const {
  return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

double DistributionField::tail_fraction() const {
  double worst = 0.0;
  const std::size_t nv = grid.vel_cells();
  for (std::size_t s = 0; s < grid.space_cells(); ++s) {
    auto col = column(s);
    double total = 0.0, tail = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      total += col[v];
      bool outer = false;
      for (int a = 0; a < grid.dim; ++a) {
        const int j = grid.vel_coord(v, a);
        outer = outer || j == 0 || j == grid.nxi - 1;
      }
      if (outer) tail += col[v];
    }
    if (total > 0) worst = std::max(worst, tail / total);
  }
  return worst;
}

std::vector<double> FluidField::mean_velocity() const {
  std::vector<double> uc(grid.dim, 0.0);
  for (int k = 0; k < grid.dim; ++k) {
    double sum = 0.0;
    for (double v : velocity.component(k)) sum += v;
    uc[k] = sum * grid.space_volume();
  }
  return uc;
}

MacroState compute_moments(const DistributionField& f, double rho_floor) {
  const PhaseGrid& g = f.grid;
  const int d = g.dim;
  const std::size_t ns = g.space_cells();
  const std::size_t nv = g.vel_cells();
  const double w = g.vel_volume();

  MacroState out;
  out.dim = d;
  out.rho.assign(ns, 0.0);
  out.m = VectorField(d, ns);
  out.u_f = VectorField(d, ns);
  out.ptilde = VectorField(d * d, ns);

  std::vector<double> xi(nv * d);
  for (std::size_t v = 0; v < nv; ++v)
    for (int a = 0; a < d; ++a) xi[v * d + a] = g.xi_at(v, a);

  parallel_for(ns, [&](std::size_t s) {
    auto col = f.column(s);
    CompensatedSum rho_sum, m_sum[2];
    for (std::size_t v = 0; v < nv; ++v) {
      rho_sum += col[v];
      for (int a = 0; a < d; ++a) m_sum[a] += xi[v * d + a] * col[v];
    }
    const double rho = rho_sum.value() * w;
    double m[2] = {m_sum[0].value() * w, m_sum[1].value() * w};
    double uf[2] = {0.0, 0.0};
    if (rho > rho_floor)
      for (int a = 0; a < d; ++a) uf[a] = m[a] / rho;
    double p[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t v = 0; v < nv; ++v) {
      for (int a = 0; a < d; ++a) {
        const double ca = xi[v * d + a] - uf[a];
        for (int b = a; b < d; ++b) p[a * d + b] += ca * (xi[v * d + b] - uf[b]) * col[v];
      }
    }
    out.rho[s] = rho;
    for (int a = 0; a < d; ++a) {
      out.m(a, s) = m[a];
      out.u_f(a, s) = uf[a];
      for (int b = a; b < d; ++b) {
        out.ptilde(a * d + b, s) = p[a * d + b] * w;
        out.ptilde(b * d + a, s) = p[a * d + b] * w;
      }
    }
  });
  return out;
}

std::vector<double> local_moment(const DistributionField& f, double k) {
  const PhaseGrid& g = f.grid;
  const std::size_t nv = g.vel_cells();
  std::vector<double> weight(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) r2 += g.xi_at(v, a) * g.xi_at(v, a);
    weight[v] = k == 0.0 ? 1.0 : std::pow(std::sqrt(r2), k);
  }
  std::vector<double> out(g.space_cells(), 0.0);
  parallel_for(g.space_cells(), [&](std::size_t s) {
    auto col = f.column(s);
    double sum = 0.0;
    for (std::size_t v = 0; v < nv; ++v) sum += weight[v] * col[v];
    out[s] = sum * g.vel_volume();
  });
  return out;
}

double unit_ball_volume(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: throw ConfigError("unit_ball_volume: unsupported dimension");
  }
}

std::vector<double> moment_interpolation_check(const DistributionField& f, int k1, int k2) {
  if (!(k2 > k1 && k1 >= 0)) throw ConfigError("moment_interpolation_check: need k2 > k1 >= 0");
  const int d = f.grid.dim;
  const double constant = unit_ball_volume(d) * f.max_value() + 1.0;
  const double power = double(k1 + d) / double(k2 + d);
  const auto lo = local_moment(f, k1);
  const auto hi = local_moment(f, k2);
  std::vector<double> residual(lo.size());
  for (std::size_t s = 0; s < lo.size(); ++s) residual[s] = lo[s] - constant * std::pow(hi[s], power);
  return residual;
}

}  // namespace flns
