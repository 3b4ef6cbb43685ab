#pragma once

#include <span>
#include <vector>

#include "flns/fields.hpp"

namespace flns {

struct MaxwellianOptions {
  double temperature = 1.0;
  /// Largest allowed fraction of a column's mass in the outermost velocity layer.
  double tail_threshold = 1e-6;
};

/// Samples rho0(x) (2 pi T)^{-d/2} exp(-|xi - u0(x)|^2 / 2T) at cell centres and
/// rescales every column so its discrete velocity sum reproduces rho0(x) exactly.
///
/// Throws TailOverflow when |u0| > xi_max / 2 or the outermost velocity layer
/// carries more than tail_threshold of a column's mass.
DistributionField sample_maxwellian(std::span<const double> rho_profile, const VectorField& u_profile,
                                    const PhaseGrid& grid, const MaxwellianOptions& opts = {});

/// Unnormalized grid Maxwellian exp(-|xi_v - center|^2 / 2T) for every velocity cell.
std::vector<double> grid_maxwellian(const PhaseGrid& grid, std::span<const double> center, double temperature = 1.0);

}  // namespace flns
