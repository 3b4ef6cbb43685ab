#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "flns/exchange.hpp"
#include "flns/fluid.hpp"
#include "flns/kinetic.hpp"
#include "flns/moments.hpp"
#include "flns/parallel.hpp"

namespace flns {

namespace {

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

/// Bernoulli function z / (e^z - 1).
inline double bernoulli(double z) {
  if (std::abs(z) < 1e-4) return 1.0 - 0.5 * z + z * z / 12.0;
  if (z > 700.0) return z * std::exp(-z);
  return z / std::expm1(z);
}

/// Velocity lines of one column along one velocity axis.
struct LineLayout {
  int n = 0;        // cells per line
  int lines = 1;    // lines per column
  int stride = 1;   // flat-index step along the line
  int line_step = 0;

  LineLayout(const PhaseGrid& g, int axis) : n(g.nxi) {
    if (g.dim == 1) return;
    lines = g.nxi;
    stride = axis == 0 ? g.nxi : 1;
    line_step = axis == 0 ? 1 : g.nxi;
  }
  std::size_t index(int line, int j) const { return std::size_t(line) * line_step + std::size_t(j) * stride; }
};

double column_momentum(const PhaseGrid& g, std::span<const double> col, int axis) {
  double sum = 0.0;
  for (std::size_t v = 0; v < col.size(); ++v) sum += g.xi_at(v, axis) * col[v];
  return sum * g.vel_volume();
}

// ---------------------------------------------------------------------------
// Explicit MUSCL drift: df/dt = -div_xi(rate (c - xi) f)

/// Limited face values of one line: left[q] / right[q] are the reconstructions
/// from cells q and q + 1 at the face between them.
void line_faces(std::span<const double> col, const LineLayout& lay, int line, std::vector<double>& left,
                std::vector<double>& right, std::vector<double>& slope) {
  const int n = lay.n;
  for (int j = 0; j < n; ++j) {
    if (j == 0 || j == n - 1) {
      slope[j] = 0.0;
      continue;
    }
    const double a = col[lay.index(line, j)] - col[lay.index(line, j - 1)];
    const double b = col[lay.index(line, j + 1)] - col[lay.index(line, j)];
    slope[j] = minmod(a, b);
  }
  for (int q = 0; q + 1 < n; ++q) {
    left[q] = col[lay.index(line, q)] + 0.5 * slope[q];
    right[q] = col[lay.index(line, q + 1)] - 0.5 * slope[q + 1];
  }
}

/// Centre c with dxi^d * rate * sum_faces (c - xi_q) f_face(c) = target_rate. The
/// left-hand side is continuous, piecewise linear and nondecreasing in c.
double solve_drift_center(const PhaseGrid& g, std::span<const double> col, int axis, double rate, double target_rate,
                          double fallback) {
  const LineLayout lay(g, axis);
  const int nf = lay.n - 1;
  std::vector<double> lsum(nf, 0.0), rsum(nf, 0.0), left(nf), right(nf), slope(lay.n);
  for (int line = 0; line < lay.lines; ++line) {
    line_faces(col, lay, line, left, right, slope);
    for (int q = 0; q < nf; ++q) {
      lsum[q] += left[q];
      rsum[q] += right[q];
    }
  }
  const double goal = target_rate / (rate * g.vel_volume());
  // interval i: faces q < i are upwinded from the left, faces q >= i from the right
  double s_val = 0.0, w_val = 0.0;
  for (int q = 0; q < nf; ++q) {
    s_val += rsum[q];
    w_val += g.xi_face(q) * rsum[q];
  }
  double best = fallback, best_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= nf; ++i) {
    if (i > 0) {
      const int q = i - 1;
      s_val += lsum[q] - rsum[q];
      w_val += g.xi_face(q) * (lsum[q] - rsum[q]);
    }
    if (s_val <= 0.0) continue;
    const double c = (goal + w_val) / s_val;
    const double lo = i == 0 ? -std::numeric_limits<double>::infinity() : g.xi_face(i - 1);
    const double hi = i == nf ? std::numeric_limits<double>::infinity() : g.xi_face(i);
    if (c >= lo && c <= hi) return c;
    const double gap = c < lo ? lo - c : c - hi;
    if (gap < best_gap) {
      best_gap = gap;
      best = std::clamp(c, lo, hi);
    }
  }
  return best;
}

/// Adds h * (-div flux) of one column to out.
void drift_column_update(const PhaseGrid& g, std::span<const double> col, const double* centers, double rate,
                         double h, std::span<double> out) {
  const double ratio = h / g.dxi();
  for (int axis = 0; axis < g.dim; ++axis) {
    const LineLayout lay(g, axis);
    const int nf = lay.n - 1;
    std::vector<double> left(nf), right(nf), slope(lay.n), flux(nf);
    for (int line = 0; line < lay.lines; ++line) {
      line_faces(col, lay, line, left, right, slope);
      for (int q = 0; q < nf; ++q) {
        const double a = rate * (centers[axis] - g.xi_face(q));
        flux[q] = a * (a > 0 ? left[q] : right[q]);
      }
      for (int j = 0; j < lay.n; ++j) {
        const double fr = j < nf ? flux[j] : 0.0;
        const double fl = j > 0 ? flux[j - 1] : 0.0;
        out[lay.index(line, j)] -= ratio * (fr - fl);
      }
    }
  }
}

/// Stability number of an explicit drift stage: 2 h rate sum_k max_q |c_k - xi_q| / dxi.
double drift_number(const PhaseGrid& g, const double* centers, double rate, double h) {
  double speed = 0.0;
  const double lo = g.xi_face(0), hi = g.xi_face(g.nxi - 2);
  for (int a = 0; a < g.dim; ++a) speed += rate * std::max(std::abs(centers[a] - lo), std::abs(centers[a] - hi));
  return 2.0 * h * speed / g.dxi();
}

/// One forward-Euler drift stage with per-column centres.
void drift_stage(const DistributionField& in, DistributionField& out, const std::vector<double>& centers, double rate,
                 double h, double& max_number) {
  const PhaseGrid& g = in.grid;
  const std::size_t ns = g.space_cells();
  std::vector<double> numbers(ns, 0.0);
  out.values = in.values;
  parallel_for(ns, [&](std::size_t s) {
    const double* c = &centers[s * g.dim];
    numbers[s] = drift_number(g, c, rate, h);
    drift_column_update(g, in.column(s), c, rate, h, out.column(s));
  });
  for (double v : numbers) max_number = std::max(max_number, v);
}

void check_drift_number(double number, double h) {
  if (number > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "velocity drift: stability number " << number << " exceeds 1 (dt = " << h << ")";
    throw CflViolation(msg.str());
  }
}

// ---------------------------------------------------------------------------
// Implicit Chang-Cooper relaxation

struct ImplicitColumn {
  const PhaseGrid& g;
  int axis;
  double align;
  double diff;
  double h;
  LineLayout lay;
  std::vector<double> lower, diag, upper, rhs, sol, cprime;

  ImplicitColumn(const PhaseGrid& grid, int ax, double a, double d, double dt)
      : g(grid), axis(ax), align(a), diff(d), h(dt), lay(grid, ax), lower(lay.n), diag(lay.n), upper(lay.n),
        rhs(lay.n), sol(lay.n), cprime(lay.n) {}

  void build(double center) {
    const double dxi = g.dxi();
    const double k = h * diff / (dxi * dxi);
    std::fill(lower.begin(), lower.end(), 0.0);
    std::fill(upper.begin(), upper.end(), 0.0);
    std::fill(diag.begin(), diag.end(), 1.0);
    for (int q = 0; q + 1 < lay.n; ++q) {
      const double z = align * (g.xi_face(q) - center) * dxi / diff;
      const double bp = bernoulli(z), bm = bernoulli(-z);
      // flux J_q = diff/dxi (B(-z) f_{q+1} - B(z) f_q)
      upper[q] -= k * bm;
      diag[q] += k * bp;
      lower[q + 1] -= k * bp;
      diag[q + 1] += k * bm;
    }
  }

  /// Solves every line of the column in place into out; returns false on a bad pivot.
  bool solve(std::span<const double> in, std::span<double> out) {
    const int n = lay.n;
    for (int line = 0; line < lay.lines; ++line) {
      for (int j = 0; j < n; ++j) rhs[j] = in[lay.index(line, j)];
      double pivot = diag[0];
      if (!(pivot > 0.0) || !std::isfinite(pivot)) return false;
      cprime[0] = upper[0] / pivot;
      sol[0] = rhs[0] / pivot;
      for (int j = 1; j < n; ++j) {
        pivot = diag[j] - lower[j] * cprime[j - 1];
        if (!(pivot > 0.0) || !std::isfinite(pivot)) return false;
        cprime[j] = upper[j] / pivot;
        sol[j] = (rhs[j] - lower[j] * sol[j - 1]) / pivot;
      }
      for (int j = n - 2; j >= 0; --j) sol[j] -= cprime[j] * sol[j + 1];
      for (int j = 0; j < n; ++j) out[lay.index(line, j)] = std::max(sol[j], 0.0);
    }
    return true;
  }
};

[[noreturn]] void fail_column(std::size_t s, int axis, std::span<const double> col) {
  std::ostringstream msg;
  msg << "collision solve failed at column " << s << " axis " << axis << "; column values:";
  msg.precision(6);
  for (std::size_t v = 0; v < col.size() && v < 64; ++v) msg << ' ' << col[v];
  throw LinearSolveFailure(msg.str());
}

/// Implicit relaxation of one column along one axis with the centre tuned so the
/// column momentum along that axis reaches target.
void implicit_column(const PhaseGrid& g, std::size_t s, int axis, double align, double diff, double h, double rho,
                     double m, double target, double rho_floor, std::span<const double> in, std::span<double> out) {
  ImplicitColumn solver(g, axis, align, diff, h);
  if (align == 0.0 || rho <= rho_floor) {
    solver.build(0.0);
    if (!solver.solve(in, out)) fail_column(s, axis, in);
    return;
  }
  const double relax = -std::expm1(-align * h);
  const double slope_model = rho * relax;
  auto residual = [&](double c, std::span<double> dst) {
    solver.build(c);
    if (!solver.solve(in, dst)) fail_column(s, axis, in);
    return column_momentum(g, dst, axis) - target;
  };

  std::vector<double> trial(in.size());
  double c0 = (target - m * (1.0 - relax)) / slope_model;
  double g0 = residual(c0, out);
  const double tol = 1e-16 * rho * (g.xi_max + std::abs(c0));
  if (std::abs(g0) <= tol) return;
  double best_c = c0, best_g = g0;
  double c1 = c0 - g0 / slope_model;
  for (int it = 0; it < 60; ++it) {
    const double g1 = residual(c1, trial);
    if (std::abs(g1) < std::abs(best_g)) {
      best_g = g1;
      best_c = c1;
      std::copy(trial.begin(), trial.end(), out.begin());
    }
    if (std::abs(g1) <= tol) break;
    const double denom = g1 - g0;
    double c2 = denom != 0.0 ? c1 - g1 * (c1 - c0) / denom : c1 - g1 / slope_model;
    if (!std::isfinite(c2)) c2 = c1 - g1 / slope_model;
    if (std::abs(c2 - c1) <= 1e-15 * (1.0 + std::abs(c1))) break;
    c0 = c1;
    g0 = g1;
    c1 = c2;
  }
  (void)best_c;
}

/// Per-column momentum targets after h for every axis (component-major).
std::vector<double> momentum_targets(const PhaseGrid& g, const MacroState& mac, const FluidField& u, double alpha,
                                     double h, bool exchange) {
  const std::size_t ns = g.space_cells();
  std::vector<double> target(g.dim * ns);
  for (int k = 0; k < g.dim; ++k) {
    if (exchange && g.dim == 1) {
      std::vector<double> dm(ns);
      pooled_exchange(mac.rho, mac.m.component(k), u.velocity(k, 0), alpha, h, g.dx(), dm);
      for (std::size_t s = 0; s < ns; ++s) target[k * ns + s] = mac.m(k, s) + dm[s];
      continue;
    }
    for (std::size_t s = 0; s < ns; ++s) {
      const double dm = exchange ? pointwise_exchange(mac.rho[s], mac.m(k, s), u.velocity(k, s), alpha, h)
                                 : frozen_exchange(mac.rho[s], mac.m(k, s), u.velocity(k, s), alpha, h);
      target[k * ns + s] = mac.m(k, s) + dm;
    }
  }
  return target;
}

/// Hands minus the particle momentum change to the fluid.
void apply_exchange(const PhaseGrid& g, const MacroState& before, const DistributionField& f, FluidField& u) {
  const MacroState after = compute_moments(f, 0.0);
  const std::size_t ns = g.space_cells();
  for (int k = 0; k < g.dim; ++k) {
    if (g.dim == 1) {
      double total = 0.0;
      for (std::size_t s = 0; s < ns; ++s) total += (after.m(k, s) - before.m(k, s)) * g.dx();
      const double value = u.velocity(k, 0) - total;
      for (std::size_t s = 0; s < ns; ++s) u.velocity(k, s) = value;
    } else {
      for (std::size_t s = 0; s < ns; ++s) u.velocity(k, s) -= after.m(k, s) - before.m(k, s);
    }
  }
  if (g.dim == 2) project_divergence_free(u);
}

void relax_implicit(DistributionField& f, FluidField& u, const RelaxCoefficients& c, double rho_floor, double h,
                    bool exchange) {
  const PhaseGrid& g = f.grid;
  const double align = c.alpha + c.beta;
  const MacroState start = compute_moments(f, rho_floor);
  const std::size_t ns = g.space_cells();
  // backward Euler damps a mode of rate lambda by 1 / (1 + lambda h); sub-cycle
  // so that stiff relaxation still reaches its equilibrium within one step
  const int substeps = std::max(1, int(std::ceil(h * align / 2.0 - 1e-12)));
  const double hs = h / substeps;
  DistributionField next(g, f.time);
  for (int sub = 1; sub <= substeps; ++sub) {
    // momentum at the end of this sub-step along the exact exchange trajectory
    const auto target = momentum_targets(g, start, u, c.alpha, hs * sub, exchange);
    for (int axis = 0; axis < g.dim; ++axis) {
      parallel_for(ns, [&](std::size_t s) {
        auto in = f.column(s);
        const double m = column_momentum(g, in, axis);
        implicit_column(g, s, axis, align, c.sigma, hs, start.rho[s], m, target[axis * ns + s], rho_floor, in,
                        next.column(s));
      });
      std::swap(f.values, next.values);
    }
  }
  if (exchange) apply_exchange(g, start, f, u);
}

void relax_explicit(DistributionField& f, FluidField& u, const RelaxCoefficients& c, double rho_floor, double h,
                    bool exchange, CflReport* report) {
  const PhaseGrid& g = f.grid;
  const double rate = c.alpha + c.beta;
  const std::size_t ns = g.space_cells();
  const MacroState start = compute_moments(f, rho_floor);
  double number = 0.0;

  auto stage = [&](const DistributionField& in, const FluidField& stage_u, DistributionField& out) {
    const MacroState mac = in.values.data() == f.values.data() ? start : compute_moments(in, rho_floor);
    std::vector<double> centers(ns * g.dim, 0.0);
    parallel_for(ns, [&](std::size_t s) {
      for (int k = 0; k < g.dim; ++k) {
        const double target_rate = c.alpha * (mac.rho[s] * stage_u.velocity(k, s) - mac.m(k, s));
        centers[s * g.dim + k] =
            mac.rho[s] > rho_floor
                ? solve_drift_center(g, in.column(s), k, rate, target_rate, mac.u_f(k, s))
                : stage_u.velocity(k, s);
      }
    });
    drift_stage(in, out, centers, rate, h, number);
    check_drift_number(number, h);
  };

  DistributionField f1(g, f.time), f2(g, f.time);
  stage(f, u, f1);
  FluidField u1 = u;
  if (exchange) {
    const MacroState m1 = compute_moments(f1, 0.0);
    for (int k = 0; k < g.dim; ++k) {
      if (g.dim == 1) {
        double total = 0.0;
        for (std::size_t s = 0; s < ns; ++s) total += (m1.m(k, s) - start.m(k, s)) * g.dx();
        for (std::size_t s = 0; s < ns; ++s) u1.velocity(k, s) = u.velocity(k, s) - total;
      } else {
        for (std::size_t s = 0; s < ns; ++s) u1.velocity(k, s) -= m1.m(k, s) - start.m(k, s);
      }
    }
  }
  stage(f1, u1, f2);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = 0.5 * (f.values[i] + f2.values[i]);
  if (report) report->drift = std::max(report->drift, number);
  if (exchange) apply_exchange(g, start, f, u);
}

}  // namespace

void relax_velocity(DistributionField& f, FluidField& u, const RelaxCoefficients& coeffs, double rho_floor, double dt,
                    bool exchange, CflReport* report) {
  if (dt <= 0) return;
  const double rate = coeffs.alpha + coeffs.beta;
  if (coeffs.sigma > 0.0) {
    relax_implicit(f, u, coeffs, rho_floor, dt, exchange);
  } else if (rate > 0.0) {
    relax_explicit(f, u, coeffs, rho_floor, dt, exchange, report);
  }
  f.time += dt;
}

DistributionField step_collision_fp(DistributionField f, double coeff_align, double coeff_diff, double rho_floor,
                                    double dt) {
  if (coeff_align < 0 || coeff_diff < 0) throw ConfigError("step_collision_fp: coefficients must be nonnegative");
  FluidField frozen(f.grid);
  relax_velocity(f, frozen, RelaxCoefficients{0.0, coeff_align, coeff_diff}, rho_floor, dt, false);
  return f;
}

DistributionField step_drift_fluid(DistributionField f, const FluidField& u, double alpha, double dt) {
  if (alpha == 0.0 || dt <= 0) {
    f.time += std::max(dt, 0.0);
    return f;
  }
  const PhaseGrid& g = f.grid;
  const std::size_t ns = g.space_cells();
  std::vector<double> centers(ns * g.dim);
  for (std::size_t s = 0; s < ns; ++s)
    for (int k = 0; k < g.dim; ++k) centers[s * g.dim + k] = u.velocity(k, s);
  double number = 0.0;
  DistributionField f1(g, f.time), f2(g, f.time);
  drift_stage(f, f1, centers, alpha, dt, number);
  check_drift_number(number, dt);
  drift_stage(f1, f2, centers, alpha, dt, number);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = 0.5 * (f.values[i] + f2.values[i]);
  f.time += dt;
  return f;
}

double max_stable_dt(const DistributionField& f, const FluidField& u, const SimParams& params) {
  const PhaseGrid& g = f.grid;
  const double rate = params.alpha + params.effective_beta();
  // transport normally advances dt/2 per call; the degenerate step runs it over the full dt
  const bool degenerate = rate == 0.0 && params.effective_sigma() == 0.0;
  double dt = (degenerate ? 1.0 : 2.0) * kTransportCourantMax * g.dx() / (g.xi_max - 0.5 * g.dxi());
  if (params.effective_sigma() == 0.0 && rate > 0.0) {
    const MacroState mac = compute_moments(f, params.rho_floor);
    double speed = 0.0;
    for (int k = 0; k < g.dim; ++k) {
      double cmax = 0.0;
      for (std::size_t s = 0; s < g.space_cells(); ++s)
        cmax = std::max({cmax, std::abs(mac.u_f(k, s)), std::abs(u.velocity(k, s))});
      speed += rate * (g.xi_max - g.dxi() + cmax + g.dxi());
    }
    dt = std::min(dt, g.dxi() / (2.0 * speed));
  }
  return dt;
}

KineticStepPlan plan_kinetic_step(const DistributionField& f, const FluidField& u, const SimParams& params) {
  KineticStepPlan plan;
  plan.dt = params.cfl * max_stable_dt(f, u, params);
  plan.splitting = Splitting::Strang;
  plan.substeps = {OperatorTag::TransportX, OperatorTag::DriftFluid, OperatorTag::CollisionFP,
                   OperatorTag::TransportX};
  const bool degenerate = params.alpha + params.effective_beta() == 0.0 && params.effective_sigma() == 0.0;
  plan.cfl_report.transport = transport_cfl(f.grid, degenerate ? plan.dt : 0.5 * plan.dt);
  return plan;
}

DistributionField step_kinetic(const DistributionField& f, const FluidField& u, const SimParams& params, double dt) {
  if (params.alpha + params.effective_beta() == 0.0 && params.effective_sigma() == 0.0) return step_transport(f, dt);
  DistributionField out = step_transport(f, 0.5 * dt);
  FluidField frozen = u;
  relax_velocity(out, frozen,
                 RelaxCoefficients{params.alpha, params.effective_beta(), params.effective_sigma()},
                 params.rho_floor, dt, false);
  out = step_transport(std::move(out), 0.5 * dt, true);
  out.time = f.time + dt;
  return out;
}

}  // namespace flns
