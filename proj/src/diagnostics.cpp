#include "flns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flns/fluid.hpp"
#include "flns/moments.hpp"
#include "flns/spectral.hpp"
#include "flns/sum.hpp"

namespace flns {

namespace {

struct GlobalMoments {
  double mass = 0.0;
  std::vector<double> xi_c;
  double k2 = 0.0;  // int int |xi|^2 f
};

GlobalMoments global_moments(const DistributionField& f) {
  const PhaseGrid& g = f.grid;
  GlobalMoments out;
  out.xi_c.assign(g.dim, 0.0);
  CompensatedSum mass, k2, xi_c[2];
  for (std::size_t s = 0; s < g.space_cells(); ++s) {
    auto col = f.column(s);
    for (std::size_t v = 0; v < col.size(); ++v) {
      double r2 = 0.0;
      for (int k = 0; k < g.dim; ++k) {
        const double xi = g.xi_at(v, k);
        xi_c[k] += xi * col[v];
        r2 += xi * xi;
      }
      mass += col[v];
      k2 += r2 * col[v];
    }
  }
  const double dv = g.phase_volume();
  out.mass = mass.value() * dv;
  out.k2 = k2.value() * dv;
  for (int k = 0; k < g.dim; ++k) out.xi_c[k] = xi_c[k].value() * dv;
  return out;
}

std::vector<double> fluid_mean(const FluidField& u) {
  std::vector<double> out(u.grid.dim, 0.0);
  for (int k = 0; k < u.grid.dim; ++k) {
    CompensatedSum sum;
    for (double v : u.velocity.component(k)) sum += v;
    out[k] = sum.value() * u.grid.space_volume();
  }
  return out;
}

double fluid_energy(const FluidField& u) {
  double sum = 0.0;
  for (double v : u.velocity.data) sum += v * v;
  return 0.5 * sum * u.grid.space_volume();
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Fisher-type alignment dissipation on velocity faces.
double d1_functional(const DistributionField& f, const MacroState& mac) {
  const PhaseGrid& g = f.grid;
  const double dxi = g.dxi();
  const int n = g.nxi;
  double total = 0.0;
  for (std::size_t s = 0; s < g.space_cells(); ++s) {
    auto col = f.column(s);
    for (int axis = 0; axis < g.dim; ++axis) {
      const int lines = g.dim == 1 ? 1 : n;
      const std::size_t stride = (g.dim == 2 && axis == 0) ? n : 1;
      const std::size_t step = (g.dim == 2 && axis == 0) ? 1 : n;
      const double c = mac.u_f(axis, s);
      for (int line = 0; line < lines; ++line) {
        for (int q = 0; q + 1 < n; ++q) {
          const double a = col[line * step + q * stride], b = col[line * step + (q + 1) * stride];
          if (a <= kEntropyFloor || b <= kEntropyFloor) continue;
          const double w = (std::log(b) - std::log(a)) / dxi + (g.xi_face(q) - c);
          total += 0.5 * (a + b) * w * w;
        }
      }
    }
  }
  return total * g.phase_volume();
}

FluctuationEnergies energies_unchecked(const DistributionField& f, const FluidField& u, const MacroState& mac,
                                       const GlobalMoments& gm) {
  const PhaseGrid& g = f.grid;
  const double dx = g.space_volume();
  FluctuationEnergies e;
  for (std::size_t s = 0; s < g.space_cells(); ++s)
    for (int k = 0; k < g.dim; ++k) e.E_P += 0.5 * mac.ptilde_at(k, k, s) * dx;
  double rho_uf2 = 0.0;
  std::vector<double> total_m(g.dim, 0.0);
  for (std::size_t s = 0; s < g.space_cells(); ++s)
    for (int k = 0; k < g.dim; ++k) {
      const double diff = mac.u_f(k, s) - gm.xi_c[k];
      e.E_U += mac.rho[s] * diff * diff * dx;
      rho_uf2 += mac.rho[s] * mac.u_f(k, s) * mac.u_f(k, s) * dx;
      total_m[k] += mac.m(k, s) * dx;
    }
  e.E_U_expansion = gm.mass * rho_uf2 - dot(total_m, total_m);
  const auto uc = fluid_mean(u);
  for (int k = 0; k < g.dim; ++k) {
    for (std::size_t s = 0; s < g.space_cells(); ++s) {
      const double diff = u.velocity(k, s) - uc[k];
      e.E_F += 0.5 * diff * diff * dx;
    }
    const double gap = uc[k] - gm.xi_c[k];
    e.E_I += 0.5 * gap * gap;
  }
  e.E = 2.0 * e.E_P + e.E_U + 2.0 * e.E_F + e.E_I;
  return e;
}

/// sigma D1 + (beta - sigma)(int int |xi - u_f|^2 f - d M0) + alpha spread(u) + mu |grad u|^2
double entropy_dissipation(const DistributionField& f, const FluidField& u, const SimParams& p) {
  const MacroState mac = compute_moments(f, p.rho_floor);
  const double mass = f.mass();
  const double beta = p.effective_beta(), sigma = p.effective_sigma();
  double out = p.alpha * velocity_spread(f, u.velocity) + p.mu * gradient_energy(u);
  if (sigma != 0.0) out += sigma * d1_functional(f, mac);
  if (beta != sigma) out += (beta - sigma) * (velocity_spread(f, mac.u_f) - f.grid.dim * mass);
  return out;
}

double energy_dissipation(const DistributionField& f, const FluidField& u, const SimParams& p) {
  const MacroState mac = compute_moments(f, p.rho_floor);
  return p.mu * gradient_energy(u) + p.alpha * velocity_spread(f, u.velocity) +
         p.effective_beta() * velocity_spread(f, mac.u_f);
}

}  // namespace

double lp_norm(const DistributionField& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  double sum = 0.0;
  for (double v : f.values) sum += std::pow(std::abs(v), p);
  return std::pow(sum * f.grid.phase_volume(), 1.0 / p);
}

double velocity_spread(const DistributionField& f, const VectorField& center) {
  const PhaseGrid& g = f.grid;
  double total = 0.0;
  for (std::size_t s = 0; s < g.space_cells(); ++s) {
    auto col = f.column(s);
    for (std::size_t v = 0; v < col.size(); ++v) {
      double r2 = 0.0;
      for (int k = 0; k < g.dim; ++k) {
        const double d = g.xi_at(v, k) - center(k, s);
        r2 += d * d;
      }
      total += r2 * col[v];
    }
  }
  return total * g.phase_volume();
}

EntropyParts entropy_functionals(const DistributionField& f, const FluidField& u, const SimParams& params) {
  const PhaseGrid& g = f.grid;
  const MacroState mac = compute_moments(f, params.rho_floor);
  EntropyParts out;
  double flogf = 0.0;
  for (std::size_t s = 0; s < g.space_cells(); ++s) {
    auto col = f.column(s);
    for (std::size_t v = 0; v < col.size(); ++v) {
      double r2 = 0.0;
      for (int k = 0; k < g.dim; ++k) r2 += g.xi_at(v, k) * g.xi_at(v, k);
      const double fv = col[v];
      flogf += (fv > kEntropyFloor ? fv * std::log(fv) : 0.0) + 0.5 * r2 * fv;
    }
  }
  out.F = flogf * g.phase_volume() + fluid_energy(u);
  out.D1 = d1_functional(f, mac);
  out.D2 = velocity_spread(f, u.velocity) + params.mu * gradient_energy(u);
  return out;
}

double entropy_balance_residual(const DistributionField& f_prev, const DistributionField& f_next,
                                const FluidField& u_prev, const FluidField& u_next, const SimParams& params,
                                double dt) {
  const double f0 = entropy_functionals(f_prev, u_prev, params).F;
  const double f1 = entropy_functionals(f_next, u_next, params).F;
  const double diss =
      0.5 * (entropy_dissipation(f_prev, u_prev, params) + entropy_dissipation(f_next, u_next, params));
  const double mass = 0.5 * (f_prev.mass() + f_next.mass());
  const double d = f_prev.grid.dim;
  return std::abs((f1 - f0) / dt + diss - d * params.alpha * mass);
}

double energy_balance_residual(const DistributionField& f_prev, const DistributionField& f_next,
                               const FluidField& u_prev, const FluidField& u_next, const SimParams& params,
                               double dt) {
  const auto e0 = global_moments(f_prev), e1 = global_moments(f_next);
  const double before = 0.5 * e0.k2 + fluid_energy(u_prev);
  const double after = 0.5 * e1.k2 + fluid_energy(u_next);
  const double diss = 0.5 * (energy_dissipation(f_prev, u_prev, params) + energy_dissipation(f_next, u_next, params));
  const double source = f_prev.grid.dim * params.effective_sigma() * 0.5 * (e0.mass + e1.mass);
  return std::abs((after - before) / dt + diss - source);
}

SquareExpansionTerms square_expansion_terms(const DistributionField& f, const FluidField& u) {
  const PhaseGrid& g = f.grid;
  const auto gm = global_moments(f);
  const MacroState mac = compute_moments(f, 0.0);
  const double dx = g.space_volume();
  SquareExpansionTerms t;
  t.mass = gm.mass;
  t.t1 = gm.mass * gm.k2 - dot(gm.xi_c, gm.xi_c);
  double rho_uf2 = 0.0;
  std::vector<double> total_m(g.dim, 0.0);
  for (std::size_t s = 0; s < g.space_cells(); ++s)
    for (int k = 0; k < g.dim; ++k) {
      const double diff = u.velocity(k, s) - mac.u_f(k, s);
      t.t2 += mac.rho[s] * diff * diff * dx;
      rho_uf2 += mac.rho[s] * mac.u_f(k, s) * mac.u_f(k, s) * dx;
      total_m[k] += mac.m(k, s) * dx;
    }
  t.t3 = velocity_spread(f, u.velocity);
  t.t4 = gm.mass * rho_uf2 - dot(total_m, total_m);
  return t;
}

double square_expansion_residual(const DistributionField& f, const FluidField& u) {
  const auto t = square_expansion_terms(f, u);
  const double scale = std::max({1.0, std::abs(t.t1), std::abs(t.mass * t.t2), std::abs(t.mass * t.t3),
                                 std::abs(t.t4)});
  return std::abs(t.t1 + t.mass * t.t2 - t.mass * t.t3 - t.t4) / scale;
}

FluctuationEnergies fluctuation_energies(const DistributionField& f, const FluidField& u) {
  const auto gm = global_moments(f);
  if (std::abs(gm.mass - 1.0) > 1e-8)
    throw NonUnitMass("fluctuation_energies: total mass " + std::to_string(gm.mass) + " is not 1");
  const auto e = energies_unchecked(f, u, compute_moments(f, 0.0), gm);
  if (std::abs(e.E_U - e.E_U_expansion) > 1e-10)
    throw InvariantViolation("fluctuation_energies: E_U formulas disagree by " +
                             std::to_string(std::abs(e.E_U - e.E_U_expansion)));
  return e;
}

double e_u_double_sum(const DistributionField& f) {
  const PhaseGrid& g = f.grid;
  const MacroState mac = compute_moments(f, 0.0);
  const std::size_t n = g.space_cells();
  const double dx = g.space_volume();
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      double d2 = 0.0;
      for (int k = 0; k < g.dim; ++k) {
        const double d = mac.u_f(k, a) - mac.u_f(k, b);
        d2 += d * d;
      }
      total += 0.5 * d2 * mac.rho[a] * mac.rho[b] * dx * dx;
    }
  return total;
}

double dissipation(const DistributionField& f, const FluidField& u, double mu) {
  const MacroState mac = compute_moments(f, 0.0);
  double e_p = 0.0;
  for (std::size_t s = 0; s < f.grid.space_cells(); ++s)
    for (int k = 0; k < f.grid.dim; ++k) e_p += 0.5 * mac.ptilde_at(k, k, s) * f.grid.space_volume();
  return 4.0 * e_p + 2.0 * mu * gradient_energy(u) + 2.0 * velocity_spread(f, u.velocity);
}

FluctuationRates fluctuation_rates(const DistributionField& f, const FluidField& u, const SimParams& params) {
  const PhaseGrid& g = f.grid;
  const int d = g.dim;
  const std::size_t n = g.space_cells();
  const double dx = g.space_volume();
  const double alpha = params.alpha, beta = params.effective_beta();
  const MacroState mac = compute_moments(f, params.rho_floor);
  const auto gm = global_moments(f);
  const auto e = energies_unchecked(f, u, mac, gm);
  const auto uc = fluid_mean(u);

  std::vector<double> divp(d * n, 0.0);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const auto der = spectral_derivative(mac.ptilde.component(a * d + b), d, g.nx, a);
      for (std::size_t s = 0; s < n; ++s) divp[b * n + s] += der[s];
    }
  double divp_uf = 0.0, drag_uf = 0.0, fluid_work = 0.0;
  std::vector<double> total_m(d, 0.0), total_drag(d, 0.0);
  for (std::size_t s = 0; s < n; ++s)
    for (int k = 0; k < d; ++k) {
      const double drag = mac.rho[s] * u.velocity(k, s) - mac.m(k, s);  // int (u - xi) f dxi
      divp_uf += divp[k * n + s] * mac.u_f(k, s) * dx;
      drag_uf += drag * mac.u_f(k, s) * dx;
      fluid_work += (uc[k] - u.velocity(k, s)) * drag * dx;
      total_m[k] += mac.m(k, s) * dx;
      total_drag[k] += drag * dx;
    }
  FluctuationRates r;
  r.e_p = divp_uf - 2.0 * (alpha + beta) * e.E_P;
  r.e_u = -2.0 * divp_uf + 2.0 * alpha * drag_uf - 2.0 * alpha * dot(total_m, total_drag);
  r.e_f = -params.mu * gradient_energy(u) + alpha * fluid_work;
  std::vector<double> gap(d);
  for (int k = 0; k < d; ++k) gap[k] = uc[k] - gm.xi_c[k];
  r.e_i = -2.0 * alpha * dot(gap, total_drag);
  r.e_total = -dissipation(f, u, params.mu);
  return r;
}

std::map<std::string, double> fluctuation_evolution_residuals(std::span<const DistributionField> fs,
                                                              std::span<const FluidField> us,
                                                              const SimParams& params, double dt) {
  std::map<std::string, double> worst{{"e_p", 0.0}, {"e_u", 0.0}, {"e_f", 0.0}, {"e_i", 0.0}, {"e_total", 0.0}};
  if (fs.size() < 3 || fs.size() != us.size()) return worst;
  std::vector<FluctuationEnergies> es;
  for (std::size_t i = 0; i < fs.size(); ++i)
    es.push_back(energies_unchecked(fs[i], us[i], compute_moments(fs[i], params.rho_floor), global_moments(fs[i])));
  for (std::size_t i = 1; i + 1 < fs.size(); ++i) {
    const auto r = fluctuation_rates(fs[i], us[i], params);
    auto upd = [&](const char* key, double a, double b, double rate) {
      worst[key] = std::max(worst[key], std::abs((b - a) / (2.0 * dt) - rate));
    };
    upd("e_p", es[i - 1].E_P, es[i + 1].E_P, r.e_p);
    upd("e_u", es[i - 1].E_U, es[i + 1].E_U, r.e_u);
    upd("e_f", es[i - 1].E_F, es[i + 1].E_F, r.e_f);
    upd("e_i", es[i - 1].E_I, es[i + 1].E_I, r.e_i);
    upd("e_total", es[i - 1].E, es[i + 1].E, r.e_total);
  }
  return worst;
}

DiagnosticsRecord make_record(const DistributionField& f, const FluidField& u, const SimParams& params) {
  const PhaseGrid& g = f.grid;
  const auto gm = global_moments(f);
  const MacroState mac = compute_moments(f, params.rho_floor);
  DiagnosticsRecord r;
  r.time = f.time;
  r.mass = gm.mass;
  r.fluid_momentum = fluid_mean(u);
  r.kinetic_momentum = gm.xi_c;
  r.total_momentum.resize(g.dim);
  for (int k = 0; k < g.dim; ++k) r.total_momentum[k] = r.fluid_momentum[k] + r.kinetic_momentum[k];
  r.kinetic_energy = 0.5 * gm.k2;
  r.fluid_energy = fluid_energy(u);
  const auto ent = entropy_functionals(f, u, params);
  r.entropy = ent.F;
  r.d1 = ent.D1;
  r.d2 = ent.D2;
  const auto e = energies_unchecked(f, u, mac, gm);
  r.e_p = e.E_P;
  // the single-integral form has no cancellation but needs unit mass
  const bool unit = std::abs(gm.mass - 1.0) <= 1e-8;
  r.e_u = unit ? e.E_U : e.E_U_expansion;
  r.e_f = e.E_F;
  r.e_i = e.E_I;
  r.e_total = 2.0 * e.E_P + r.e_u + 2.0 * e.E_F + e.E_I;
  r.dissipation = dissipation(f, u, params.mu);
  r.l1 = lp_norm(f, 1.0);
  r.l2 = lp_norm(f, 2.0);
  r.linf = lp_norm(f, std::numeric_limits<double>::infinity());
  r.residuals["square_expansion"] = square_expansion_residual(f, u);
  if (unit) r.residuals["e_u_formulas"] = std::abs(e.E_U - e.E_U_expansion);
  r.residuals["divergence"] = max_divergence(u);
  return r;
}

}  // namespace flns
