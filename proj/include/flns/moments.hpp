#pragma once

#include <vector>

#include "flns/fields.hpp"

namespace flns {

/// Midpoint-rule velocity moments of f per spatial cell.
///
/// rho = sum f dxi^d, m = sum xi f dxi^d, u_f = m / rho where rho > rho_floor and
/// exactly 0 otherwise, Ptilde = sum (xi - u_f) (xi - u_f)^T f dxi^d.
MacroState compute_moments(const DistributionField& f, double rho_floor = 1e-12);

/// Local moment m_k(x) = sum |xi|^k f dxi^d.
std::vector<double> local_moment(const DistributionField& f, double k);

/// Volume of the unit ball in R^d.
double unit_ball_volume(int dim);

/// Per-cell m_{k1} - (c_d ||f||_inf + 1) m_{k2}^{(k1 + d) / (k2 + d)}; the moment
/// interpolation inequality says every entry is <= 0.
std::vector<double> moment_interpolation_check(const DistributionField& f, int k1, int k2);

}  // namespace flns
