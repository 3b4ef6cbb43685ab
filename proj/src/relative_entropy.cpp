#include "flns/relative_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flns/moments.hpp"

namespace flns {

namespace {

void check_states(const HydroState& v, const HydroState& u) {
  if (!(v.grid == u.grid)) throw ConfigError("relative_entropy: states live on different grids");
  for (const auto* s : {&v, &u}) {
    const double low = *std::min_element(s->rho.begin(), s->rho.end());
    if (!(low > kHydroRhoMin)) {
      std::ostringstream msg;
      msg << "relative_entropy: density " << low << " at or below " << kHydroRhoMin;
      throw VacuumBreach(msg.str());
    }
  }
}

}  // namespace

double pressure_potential(double rho_bar, double rho) {
  const double delta = (rho_bar - rho) / rho;
  if (std::abs(delta) < 1e-3) {
    // r log r - r + 1 = sum_{n >= 2} (-1)^n delta^n / (n (n - 1))
    double term = delta * delta, sum = 0.0;
    for (int n = 2; n < 9; ++n) {
      sum += (n % 2 == 0 ? 1.0 : -1.0) * term / (n * (n - 1.0));
      term *= delta;
    }
    return rho * sum;
  }
  return rho_bar * std::log(rho_bar / rho) - rho_bar + rho;
}

RelativeEntropy relative_entropy(const HydroState& v, const HydroState& u) {
  check_states(v, u);
  const PhaseGrid& g = v.grid;
  const double dx = g.space_volume();
  RelativeEntropy h;
  for (std::size_t s = 0; s < v.rho.size(); ++s) {
    double kin = 0.0, flu = 0.0;
    for (int k = 0; k < g.dim; ++k) {
      const double du = v.m(k, s) / v.rho[s] - u.m(k, s) / u.rho[s];
      const double dw = v.u.velocity(k, s) - u.u.velocity(k, s);
      kin += du * du;
      flu += dw * dw;
    }
    const double p = pressure_potential(v.rho[s], u.rho[s]);
    const double gap = v.rho[s] - u.rho[s];
    const double bound = 0.5 * std::min(1.0 / v.rho[s], 1.0 / u.rho[s]) * gap * gap;
    if (p < bound * (1.0 - 1e-12) - 1e-300) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "relative_entropy: pressure lower bound fails at cell " << s << ": P = " << p << " < " << bound;
      throw InvariantViolation(msg.str());
    }
    h.kinetic += 0.5 * v.rho[s] * kin * dx;
    h.fluid += 0.5 * flu * dx;
    h.pressure += p * dx;
  }
  h.total = h.kinetic + h.fluid + h.pressure;
  return h;
}

double relative_flux_norm(const HydroState& v, const HydroState& u) {
  const auto h = relative_entropy(v, u);
  const double value = 2.0 * (h.kinetic + h.fluid);
  if (value > 2.0 * h.total + 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "relative_flux_norm: " << value << " exceeds 2 H = " << 2.0 * h.total;
    throw InvariantViolation(msg.str());
  }
  return value;
}

HydroState kinetic_as_hydro(const DistributionField& f, const FluidField& u, double rho_floor) {
  const MacroState mac = compute_moments(f, rho_floor);
  HydroState s(f.grid);
  s.rho = mac.rho;
  s.m = mac.m;
  s.u = u;
  s.time = f.time;
  return s;
}

}  // namespace flns
