#pragma once

#include "flns/fields.hpp"
#include "flns/hydro.hpp"

namespace flns {

/// P(rho_bar, rho) = rho_bar log(rho_bar / rho) - rho_bar + rho, evaluated
/// without cancellation when the ratio is close to 1.
double pressure_potential(double rho_bar, double rho);

struct RelativeEntropy {
  double total = 0.0;
  double kinetic = 0.0;   // 1/2 int rho_bar |u_f_bar - u_f|^2
  double fluid = 0.0;     // 1/2 int |u_bar - u|^2
  double pressure = 0.0;  // int P(rho_bar, rho)
};

/// Relative entropy of V = (rho_bar, m_bar, u_bar) with respect to U.
/// Throws VacuumBreach if either density reaches kHydroRhoMin and
/// InvariantViolation if P(rho_bar, rho) >= 1/2 min(1/rho_bar, 1/rho)(rho_bar - rho)^2
/// fails at some cell.
RelativeEntropy relative_entropy(const HydroState& v, const HydroState& u);

/// int (rho_bar |u_f_bar - u_f|^2 + |u_bar - u|^2); throws InvariantViolation when it
/// exceeds 2 H + 1e-12.
double relative_flux_norm(const HydroState& v, const HydroState& u);

/// Macroscopic state (rho, m, u) of a kinetic solution.
HydroState kinetic_as_hydro(const DistributionField& f, const FluidField& u, double rho_floor = 1e-12);

}  // namespace flns
