#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace flns {

/// (1 - e^{-z}) / z, continuous at z = 0.
inline double phi1(double z) { return std::abs(z) < 1e-12 ? 1.0 - 0.5 * z : -std::expm1(-z) / z; }

/// Exact solution over h of the pointwise drag exchange
///   dm/dt = alpha (rho u - m),  du/dt = -alpha (rho u - m)
/// with rho frozen. Returns the momentum increment; the velocity increment is its negative.
inline double pointwise_exchange(double rho, double m, double u, double alpha, double h) {
  const double gap = rho * u - m;
  const double lam = alpha * (rho + 1.0);
  return gap * alpha * h * phi1(lam * h);
}

/// Momentum increment over h for the drag toward a frozen velocity u.
inline double frozen_exchange(double rho, double m, double u, double alpha, double h) {
  return (rho * u - m) * alpha * h * phi1(alpha * h);
}

/// Exact solution of the d = 1 exchange in which the fluid velocity is a single
/// constant u coupled to every cell:
///   dm(x)/dt = alpha (rho(x) u - m(x)),  du/dt = -alpha (u R - M),
/// R = sum rho dx, M = sum m dx. Writes the momentum increments per cell and
/// returns the new u.
inline double pooled_exchange(std::span<const double> rho, std::span<const double> m, double u, double alpha,
                              double h, double dx, std::span<double> dm) {
  double total_rho = 0.0, total_m = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    total_rho += rho[i] * dx;
    total_m += m[i] * dx;
  }
  const double gap = u * total_rho - total_m;
  const double u_inf = u - gap / (total_rho + 1.0);
  const double decay = std::exp(-alpha * h);
  // int_0^h alpha e^{-alpha (h - s)} u(s) ds with u(s) = u_inf + (u - u_inf) e^{-alpha (R + 1) s}
  const double drive = alpha * h * (u_inf * phi1(alpha * h) + (u - u_inf) * decay * phi1(alpha * total_rho * h));
  double total_dm = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    dm[i] = m[i] * (decay - 1.0) + rho[i] * drive;
    total_dm += dm[i] * dx;
  }
  return u - total_dm;
}

}  // namespace flns
