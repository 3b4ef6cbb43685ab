#include "flns/maxwellian.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "flns/parallel.hpp"

namespace flns {

std::vector<double> grid_maxwellian(const PhaseGrid& grid, std::span<const double> center, double temperature) {
  const std::size_t nv = grid.vel_cells();
  std::vector<double> out(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    double r2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      const double c = grid.xi_at(v, a) - center[a];
      r2 += c * c;
    }
    out[v] = std::exp(-0.5 * r2 / temperature);
  }
  return out;
}

DistributionField sample_maxwellian(std::span<const double> rho_profile, const VectorField& u_profile,
                                    const PhaseGrid& grid, const MaxwellianOptions& opts) {
  const std::size_t ns = grid.space_cells();
  const std::size_t nv = grid.vel_cells();
  if (rho_profile.size() != ns || u_profile.n != ns || u_profile.dim != grid.dim)
    throw ConfigError("sample_maxwellian: profile sizes do not match the grid");
  if (!(opts.temperature > 0)) throw ConfigError("sample_maxwellian: temperature must be positive");

  DistributionField f(grid);
  const double norm = std::pow(2.0 * std::numbers::pi * opts.temperature, -0.5 * grid.dim);
  for (std::size_t s = 0; s < ns; ++s) {
    if (rho_profile[s] < 0) throw ConfigError("sample_maxwellian: negative density");
    for (int a = 0; a < grid.dim; ++a) {
      if (std::abs(u_profile(a, s)) > 0.5 * grid.xi_max) {
        std::ostringstream msg;
        msg << "sample_maxwellian: |u0| = " << std::abs(u_profile(a, s)) << " exceeds xi_max/2 at cell " << s;
        throw TailOverflow(msg.str());
      }
    }
  }

  parallel_for(ns, [&](std::size_t s) {
    double center[2] = {0.0, 0.0};
    for (int a = 0; a < grid.dim; ++a) center[a] = u_profile(a, s);
    const auto shape = grid_maxwellian(grid, std::span<const double>(center, grid.dim), opts.temperature);
    auto col = f.column(s);
    double sum = 0.0;
    for (std::size_t v = 0; v < nv; ++v) {
      col[v] = rho_profile[s] * norm * shape[v];
      sum += col[v];
    }
    sum *= grid.vel_volume();
    if (sum > 0) {
      const double scale = rho_profile[s] / sum;
      for (auto& x : col) x *= scale;
    }
  });

  const double tail = f.tail_fraction();
  if (tail > opts.tail_threshold) {
    std::ostringstream msg;
    msg << "sample_maxwellian: outer velocity layer holds " << tail << " of a column's mass (threshold "
        << opts.tail_threshold << ")";
    throw TailOverflow(msg.str());
  }
  return f;
}

}  // namespace flns
