#pragma once

#include <vector>

#include "flns/fields.hpp"
#include "flns/snapshot.hpp"

namespace flns {

inline constexpr double kHydroRhoMin = 1e-8;

/// Unknowns of the limit system: density and momentum of the particle phase,
/// and the incompressible fluid. Only the spatial part of grid is used.
struct HydroState {
  PhaseGrid grid;
  std::vector<double> rho;
  VectorField m;
  FluidField u;
  double time = 0.0;

  HydroState() = default;
  explicit HydroState(const PhaseGrid& g)
      : grid(g), rho(g.space_cells(), 0.0), m(g.dim, g.space_cells()), u(g) {}
};

/// Largest stable dt of the Euler update, dx / sum_a max(|v_a| + 1).
double hydro_max_dt(const HydroState& s);

/// Homogeneous isothermal Euler (pressure = rho) over dt: MUSCL reconstruction
/// of (rho, velocity) with the monotonized-central limiter, Rusanov flux,
/// SSP-RK2, periodic. Faces whose reconstructed density is not positive fall
/// back to first order.
void euler_transport(HydroState& s, double dt);

/// Euler update with the friction rho (u - u_f) toward the frozen fluid
/// velocity applied exactly: friction(dt/2), transport(dt), friction(dt/2).
/// Throws VacuumBreach if rho drops below kHydroRhoMin.
HydroState step_euler_isothermal(HydroState s, double dt);

/// Coupled step Euler(dt/2), exchange(dt/2), Navier-Stokes(dt), exchange(dt/2),
/// Euler(dt/2). The exchange is the exact linear drag between m and u
/// (pooled in d = 1, pointwise then projected in d = 2) so int m + int u is
/// conserved to round-off.
HydroState step_hydro_coupled(HydroState s, double mu, double dt);

Snapshot pack_hydro(const HydroState& s);
HydroState unpack_hydro(const Snapshot& snap);

}  // namespace flns
