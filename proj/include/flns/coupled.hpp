#pragma once

#include "flns/fields.hpp"
#include "flns/kinetic.hpp"

namespace flns {

/// One step of the coupled kinetic-fluid system:
///   [transport + Navier-Stokes](dt/2), relaxation with drag exchange(dt),
///   [transport + Navier-Stokes](dt/2).
/// Transport acts on f and Navier-Stokes on u, so each bracket is exact
/// composition. The drag is exchanged through relax_velocity so total momentum
/// is conserved to round-off. In d = 1 the fluid only feels the drag.
void step_coupled(DistributionField& f, FluidField& u, const SimParams& params, double dt,
                  CflReport* report = nullptr);

}  // namespace flns
