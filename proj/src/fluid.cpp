#include "flns/fluid.hpp"

#include <algorithm>
#include <cmath>

#include "flns/spectral.hpp"

namespace flns {

namespace {

using Spectrum = SpectralWorkspace::Spectrum;

bool dropped_in_projection(const SpectralWorkspace& ws, std::size_t i) {
  return ws.nyquist(i, 0) || ws.nyquist(i, 1);
}

void project(const SpectralWorkspace& ws, Spectrum& a, Spectrum& b) {
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (dropped_in_projection(ws, i)) {
      a[i] = b[i] = 0.0;
      continue;
    }
    const double kx = ws.wavenumber(i, 0), ky = ws.wavenumber(i, 1);
    const auto dot = (kx * a[i] + ky * b[i]) / ws.k_squared(i);
    a[i] -= kx * dot;
    b[i] -= ky * dot;
  }
}

/// Nonlinear term (omega v, -omega u) of the rotational form, dealiased, with the
/// mean mode removed, plus the source spectrum. Not projected.
void nonlinear(SpectralWorkspace& ws, const Spectrum& a, const Spectrum& b, const Spectrum& sa, const Spectrum& sb,
               Spectrum& na, Spectrum& nb) {
  const std::size_t n = a.size();
  Spectrum ta(n), tb(n), tw(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!ws.kept(i)) continue;
    ta[i] = a[i];
    tb[i] = b[i];
    // omega = d_x v - d_y u
    tw[i] = std::complex<double>(0.0, 1.0) * (ws.wavenumber(i, 0) * b[i] - ws.wavenumber(i, 1) * a[i]);
  }
  const auto u = ws.backward(ta), v = ws.backward(tb), w = ws.backward(tw);
  std::vector<double> pa(n), pb(n);
  for (std::size_t i = 0; i < n; ++i) {
    pa[i] = w[i] * v[i];
    pb[i] = -w[i] * u[i];
  }
  na = ws.forward(pa);
  nb = ws.forward(pb);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || !ws.kept(i)) na[i] = nb[i] = 0.0;
    na[i] += sa[i];
    nb[i] += sb[i];
  }
}

}  // namespace

VectorField coupling_source(const MacroState& macro, const FluidField& u, double alpha) {
  const std::size_t n = macro.rho.size();
  VectorField out(macro.dim, n);
  for (int k = 0; k < macro.dim; ++k)
    for (std::size_t s = 0; s < n; ++s) out(k, s) = alpha * (macro.m(k, s) - macro.rho[s] * u.velocity(k, s));
  return out;
}

void project_divergence_free(FluidField& u) {
  const PhaseGrid& g = u.grid;
  if (g.dim == 1) {
    auto comp = u.velocity.component(0);
    double mean = 0.0;
    for (double v : comp) mean += v;
    mean /= double(comp.size());
    std::fill(comp.begin(), comp.end(), mean);
    return;
  }
  auto& ws = spectral_workspace(2, g.nx);
  auto a = ws.forward(u.velocity.component(0));
  auto b = ws.forward(u.velocity.component(1));
  project(ws, a, b);
  const auto ra = ws.backward(a), rb = ws.backward(b);
  std::copy(ra.begin(), ra.end(), u.velocity.component(0).begin());
  std::copy(rb.begin(), rb.end(), u.velocity.component(1).begin());
}

double max_divergence(const FluidField& u) {
  const PhaseGrid& g = u.grid;
  if (g.dim == 1) return 0.0;
  const auto dx = spectral_derivative(u.velocity.component(0), 2, g.nx, 0);
  const auto dy = spectral_derivative(u.velocity.component(1), 2, g.nx, 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < dx.size(); ++i) worst = std::max(worst, std::abs(dx[i] + dy[i]));
  return worst;
}

double gradient_energy(const FluidField& u) {
  const PhaseGrid& g = u.grid;
  if (g.dim == 1) return 0.0;
  auto& ws = spectral_workspace(2, g.nx);
  const double n2 = double(ws.size()) * double(ws.size());
  double sum = 0.0;
  for (int k = 0; k < 2; ++k) {
    const auto spec = ws.forward(u.velocity.component(k));
    for (std::size_t i = 0; i < spec.size(); ++i) sum += ws.k_squared(i) * std::norm(spec[i]);
  }
  // Parseval on the unit torus: int |g|^2 = sum |g_hat|^2 / N^2 with N cells
  return sum / n2 * double(ws.size()) * g.space_volume();
}

FluidField step_ns_2d(const FluidField& u, const VectorField& source, double mu, double dt) {
  const PhaseGrid& g = u.grid;
  if (g.dim != 2) throw ConfigError("step_ns_2d: requires d = 2");
  auto& ws = spectral_workspace(2, g.nx);
  const std::size_t n = ws.size();
  auto a = ws.forward(u.velocity.component(0));
  auto b = ws.forward(u.velocity.component(1));
  const auto sa = ws.forward(source.component(0));
  const auto sb = ws.forward(source.component(1));
  const auto& e = ws.integrating_factor(mu, dt);

  Spectrum na(n), nb(n), ma(n), mb(n), a1(n), b1(n);
  nonlinear(ws, a, b, sa, sb, na, nb);
  project(ws, na, nb);
  for (std::size_t i = 0; i < n; ++i) {
    a1[i] = e[i] * (a[i] + dt * na[i]);
    b1[i] = e[i] * (b[i] + dt * nb[i]);
  }
  project(ws, a1, b1);
  nonlinear(ws, a1, b1, sa, sb, ma, mb);
  project(ws, ma, mb);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = e[i] * a[i] + 0.5 * dt * (e[i] * na[i] + ma[i]);
    b[i] = e[i] * b[i] + 0.5 * dt * (e[i] * nb[i] + mb[i]);
  }
  project(ws, a, b);

  FluidField out(g);
  const auto ra = ws.backward(a), rb = ws.backward(b);
  std::copy(ra.begin(), ra.end(), out.velocity.component(0).begin());
  std::copy(rb.begin(), rb.end(), out.velocity.component(1).begin());

  // pressure: the gradient part of the unprojected right-hand side gives p + |u|^2 / 2
  nonlinear(ws, a, b, sa, sb, na, nb);
  Spectrum ph(n);
  for (std::size_t i = 1; i < n; ++i) {
    if (dropped_in_projection(ws, i)) continue;
    const double kx = ws.wavenumber(i, 0), ky = ws.wavenumber(i, 1);
    ph[i] = std::complex<double>(0.0, -1.0) * (kx * na[i] + ky * nb[i]) / ws.k_squared(i);
  }
  const auto total = ws.backward(ph);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.pressure[i] = total[i] - 0.5 * (ra[i] * ra[i] + rb[i] * rb[i]);
    mean += out.pressure[i];
  }
  mean /= double(n);
  for (double& p : out.pressure) p -= mean;
  return out;
}

std::vector<double> step_fluid_1d(std::span<const double> u_mean, const MacroState& macro, double alpha, double dt) {
  const std::size_t n = macro.rho.size();
  const double dx = 1.0 / double(n);
  double total_rho = 0.0;
  for (double r : macro.rho) total_rho += r * dx;
  std::vector<double> out(u_mean.begin(), u_mean.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    double total_m = 0.0;
    for (std::size_t s = 0; s < n; ++s) total_m += macro.m(int(k), s) * dx;
    // du/dt = -alpha (u R - M)
    const double lam = alpha * total_rho;
    const double rate = -alpha * (out[k] * total_rho - total_m);
    out[k] += rate * dt * (std::abs(lam * dt) < 1e-12 ? 1.0 - 0.5 * lam * dt : -std::expm1(-lam * dt) / (lam * dt));
  }
  return out;
}

}  // namespace flns
