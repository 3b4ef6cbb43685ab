#pragma once

#include <string>
#include <vector>

#include "flns/fields.hpp"

namespace flns {

enum class Splitting { Lie, Strang };
enum class OperatorTag { TransportX, DriftFluid, CollisionFP };

/// Stability numbers actually reached by the explicit substeps (transport limit 1/2, drift limit 1).
struct CflReport {
  double transport = 0.0;
  double drift = 0.0;
};

struct KineticStepPlan {
  double dt = 0.0;
  Splitting splitting = Splitting::Strang;
  std::vector<OperatorTag> substeps;
  CflReport cfl_report;

  /// One JSON object (no trailing newline) describing the step.
  std::string to_json_line(long step, double wall_seconds) const;
};

/// Courant limit of the transport substep; the MUSCL/SSP-RK2 update is positive and TVD below it.
inline constexpr double kTransportCourantMax = 0.5;

/// Largest |xi| dt / dx over the velocity grid.
double transport_cfl(const PhaseGrid& grid, double dt);

/// Largest stable dt of the combined step for the given state, before applying cfl.
double max_stable_dt(const DistributionField& f, const FluidField& u, const SimParams& params);

KineticStepPlan plan_kinetic_step(const DistributionField& f, const FluidField& u, const SimParams& params);

/// Conservative MUSCL (minmod) update of df/dt + xi . grad_x f = 0 on the
/// periodic torus with SSP-RK2 in time, one spatial axis after another (reversed
/// order when reverse_axes is set). Throws CflViolation when |xi| dt / dx > 1/2.
DistributionField step_transport(DistributionField f, double dt, bool reverse_axes = false);

/// Explicit SSP-RK2 finite-volume update of df/dt = alpha div_xi((xi - u) f) with
/// zero-flux velocity boundaries.
DistributionField step_drift_fluid(DistributionField f, const FluidField& u, double alpha, double dt);

/// Implicit Chang-Cooper (Scharfetter-Gummel weighted) update of
///   df/dt = div_xi(coeff_diff grad_xi f + coeff_align (xi - c) f),
/// backward Euler with one tridiagonal solve per velocity line, dimension split.
/// When dt coeff_align > 2 the step is split into equal sub-steps below that. The centre c of each
/// column is chosen so the column's momentum is unchanged; on a grid Maxwellian
/// with coeff_align = coeff_diff it is the Maxwellian's own centre. With
/// coeff_diff = 0 the alignment is advanced explicitly instead.
DistributionField step_collision_fp(DistributionField f, double coeff_align, double coeff_diff, double rho_floor,
                                    double dt);

struct RelaxCoefficients {
  double alpha = 0.0;  ///< drag toward the fluid velocity
  double beta = 0.0;   ///< local alignment toward u_f
  double sigma = 0.0;  ///< velocity diffusion
};

/// Velocity-space relaxation df/dt = alpha div((xi - u) f) + beta div((xi - u_f) f)
/// + sigma lap f, written as one Fokker-Planck operator with rate alpha + beta
/// toward a per-column centre. The centre is chosen so that column momentum
/// follows the exact drag exchange with the fluid.
///
/// When exchange is true the fluid receives minus the particle momentum change
/// (pointwise then projected in d = 2, pooled in d = 1), so total momentum is
/// conserved to round-off; otherwise u is a frozen external field.
void relax_velocity(DistributionField& f, FluidField& u, const RelaxCoefficients& coeffs, double rho_floor,
                    double dt, bool exchange, CflReport* report = nullptr);

/// One Strang step Transport(dt/2) . Relax(dt) . Transport(dt/2) with u frozen.
DistributionField step_kinetic(const DistributionField& f, const FluidField& u, const SimParams& params, double dt);

}  // namespace flns
