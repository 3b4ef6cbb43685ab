#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "flns/fields.hpp"

namespace flns {

/// One row of a diagnostics series. Integrals are over the unit torus, so
/// spatial means and integrals coincide.
struct DiagnosticsRecord {
  double time = 0.0;
  double mass = 0.0;
  std::vector<double> fluid_momentum;    // u_c
  std::vector<double> kinetic_momentum;  // xi_c
  std::vector<double> total_momentum;
  double kinetic_energy = 0.0;  // 1/2 int int |xi|^2 f
  double fluid_energy = 0.0;    // 1/2 int |u|^2
  double entropy = 0.0;         // F
  double d1 = 0.0;
  double d2 = 0.0;
  double e_p = 0.0;
  double e_u = 0.0;
  double e_f = 0.0;
  double e_i = 0.0;
  double e_total = 0.0;
  double dissipation = 0.0;  // D
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  std::map<std::string, double> residuals;
};

struct EntropyParts {
  double F = 0.0;
  double D1 = 0.0;
  double D2 = 0.0;
};

struct FluctuationEnergies {
  double E_P = 0.0;
  double E_U = 0.0;
  double E_F = 0.0;
  double E_I = 0.0;
  double E = 0.0;
  /// E_U from the expansion int rho |u_f|^2 - |int m|^2 of the double integral.
  double E_U_expansion = 0.0;
};

/// Cells with f at or below this value contribute nothing to f log f or D1.
inline constexpr double kEntropyFloor = 1e-300;

/// ||f||_p over phase space; p = infinity gives the max norm.
double lp_norm(const DistributionField& f, double p);

/// int int |xi - c(x)|^2 f with c = u (fluid, component-major per cell).
double velocity_spread(const DistributionField& f, const VectorField& center);

/// F = int int f (log f + |xi|^2 / 2) + int |u|^2 / 2,
/// D1 = int int |grad_xi f + (xi - u_f) f|^2 / f evaluated on velocity faces with
/// log-differences (zero on grid Maxwellians centred at u_f),
/// D2 = int int |u - xi|^2 f + mu int |grad u|^2.
EntropyParts entropy_functionals(const DistributionField& f, const FluidField& u, const SimParams& params);

/// |dF/dt + sigma D1 + (beta - sigma)(int int |xi - u_f|^2 f - d M0) + alpha int int |u - xi|^2 f
///  + mu int |grad u|^2 - d alpha M0| with the dissipation terms averaged over the
/// two snapshots. In scaled mode (beta = sigma = 1/eps) this is the balance
/// dF/dt + D1/eps + D2 = d alpha M0.
double entropy_balance_residual(const DistributionField& f_prev, const DistributionField& f_next,
                                const FluidField& u_prev, const FluidField& u_next, const SimParams& params,
                                double dt);

/// |d(KE + FE)/dt + mu int |grad u|^2 + alpha int int |u - xi|^2 f
///  + beta int int |u_f - xi|^2 f - d sigma M0| with the dissipation terms averaged
/// over the two snapshots.
double energy_balance_residual(const DistributionField& f_prev, const DistributionField& f_next,
                               const FluidField& u_prev, const FluidField& u_next, const SimParams& params,
                               double dt);

/// The four terms of the square-expansion identity, written for any mass M0:
///   T1 + M0 T2 = M0 T3 + T4,
/// T1 = 1/2 int int f(x, xi) f(y, xi*) |xi - xi*|^2 = M0 K2 - |xi_c|^2,
/// T2 = int rho |u - u_f|^2, T3 = int int |u - xi|^2 f,
/// T4 = 1/2 int int rho(x) rho(y) |u_f(x) - u_f(y)|^2 = M0 int rho |u_f|^2 - |int m|^2.
struct SquareExpansionTerms {
  double mass = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
};
SquareExpansionTerms square_expansion_terms(const DistributionField& f, const FluidField& u);
/// |T1 + M0 T2 - M0 T3 - T4| relative to max(1, largest term).
double square_expansion_residual(const DistributionField& f, const FluidField& u);

/// Fluctuation energies; E_U uses int rho |u_f - xi_c|^2. Throws NonUnitMass
/// when |M0 - 1| > 1e-8 and InvariantViolation when the two E_U formulas differ
/// by more than 1e-10.
FluctuationEnergies fluctuation_energies(const DistributionField& f, const FluidField& u);

/// E_U from the direct O(N^2) double sum over cell pairs.
double e_u_double_sum(const DistributionField& f);

/// D = 4 E_P + 2 mu int |grad u|^2 + 2 int int |u - xi|^2 f.
double dissipation(const DistributionField& f, const FluidField& u, double mu);

/// Right-hand sides of the fluctuation evolution identities for sigma = 0:
///   dE_P/dt = int (div P) . u_f - 2 (alpha + beta) E_P
///   dE_U/dt = -2 int (div P) . u_f + 2 alpha int rho (u - u_f) . u_f
///             - 2 alpha (int m) . (int rho (u - u_f))
///   dE_F/dt = -mu int |grad u|^2 + alpha int int (u_c - u) . (u - xi) f
///   dE_I/dt = -2 alpha (u_c - xi_c) . int int (u - xi) f
///   dE/dt   = -D   (alpha = beta = 1)
struct FluctuationRates {
  double e_p = 0.0;
  double e_u = 0.0;
  double e_f = 0.0;
  double e_i = 0.0;
  double e_total = 0.0;
};
FluctuationRates fluctuation_rates(const DistributionField& f, const FluidField& u, const SimParams& params);

/// Max over interior snapshots of |centred difference - right-hand side| for
/// each identity; snapshots are equally spaced by dt. Keys: e_p, e_u, e_f, e_i,
/// e_total.
std::map<std::string, double> fluctuation_evolution_residuals(std::span<const DistributionField> fs,
                                                              std::span<const FluidField> us,
                                                              const SimParams& params, double dt);

/// Full record for one state.
DiagnosticsRecord make_record(const DistributionField& f, const FluidField& u, const SimParams& params);

}  // namespace flns
