#include "flns/coupled.hpp"

#include "flns/fluid.hpp"

namespace flns {

namespace {

void half_step(DistributionField& f, FluidField& u, const SimParams& params, double h, bool reverse) {
  f = step_transport(std::move(f), h, reverse);
  if (u.grid.dim == 2 && params.mu >= 0.0) {
    const VectorField none(2, u.grid.space_cells());
    u = step_ns_2d(u, none, params.mu, h);
  }
}

}  // namespace

void step_coupled(DistributionField& f, FluidField& u, const SimParams& params, double dt, CflReport* report) {
  const double t0 = f.time;
  half_step(f, u, params, 0.5 * dt, false);
  if (report) report->transport = std::max(report->transport, transport_cfl(f.grid, 0.5 * dt));
  relax_velocity(f, u, RelaxCoefficients{params.alpha, params.effective_beta(), params.effective_sigma()},
                 params.rho_floor, dt, true, report);
  half_step(f, u, params, 0.5 * dt, true);
  f.time = t0 + dt;
}

}  // namespace flns
