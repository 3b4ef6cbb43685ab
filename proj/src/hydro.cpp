#include "flns/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flns/exchange.hpp"
#include "flns/fluid.hpp"
#include "flns/parallel.hpp"

namespace flns {

namespace {

inline double mc_slope(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  const double s = a > 0 ? 1.0 : -1.0;
  return s * std::min({2.0 * std::abs(a), 2.0 * std::abs(b), 0.5 * std::abs(a + b)});
}

struct Lines {
  int count;
  int n;
  std::size_t stride;
  std::size_t step;
  Lines(const PhaseGrid& g, int axis) : count(g.dim == 1 ? 1 : g.nx), n(g.nx) {
    stride = (g.dim == 2 && axis == 0) ? std::size_t(g.nx) : 1;
    step = (g.dim == 2 && axis == 0) ? 1 : std::size_t(g.nx);
  }
  std::size_t index(int line, int i) const { return line * step + ((i + n) % n) * stride; }
};

/// rhs = -div F(rho, m) over all axes.
void euler_rhs(const PhaseGrid& g, const std::vector<double>& rho, const VectorField& m, std::vector<double>& drho,
               VectorField& dm) {
  const int d = g.dim;
  const double inv_dx = 1.0 / g.dx();
  std::fill(drho.begin(), drho.end(), 0.0);
  std::fill(dm.data.begin(), dm.data.end(), 0.0);
  for (int axis = 0; axis < d; ++axis) {
    const Lines lines(g, axis);
    parallel_for(lines.count, [&](std::size_t line) {
      const int n = lines.n;
      // primitive variables along the line: rho, v_0, v_1
      std::vector<double> w[3];
      for (int c = 0; c <= d; ++c) w[c].resize(n);
      for (int i = 0; i < n; ++i) {
        const std::size_t s = lines.index(int(line), i);
        w[0][i] = rho[s];
        for (int k = 0; k < d; ++k) w[k + 1][i] = m(k, s) / rho[s];
      }
      std::vector<double> slope[3];
      for (int c = 0; c <= d; ++c) {
        slope[c].resize(n);
        for (int i = 0; i < n; ++i) {
          const int im = (i + n - 1) % n, ip = (i + 1) % n;
          slope[c][i] = mc_slope(w[c][i] - w[c][im], w[c][ip] - w[c][i]);
        }
      }
      for (int i = 0; i < n; ++i)
        if (w[0][i] - 0.5 * std::abs(slope[0][i]) <= 0.0)
          for (int c = 0; c <= d; ++c) slope[c][i] = 0.0;
      // flux at face i + 1/2
      std::vector<double> flux[3];
      for (int c = 0; c <= d; ++c) flux[c].resize(n);
      for (int i = 0; i < n; ++i) {
        const int ip = (i + 1) % n;
        double wl[3] = {}, wr[3] = {}, ul[3] = {}, ur[3] = {}, fl[3] = {}, fr[3] = {};
        for (int c = 0; c <= d; ++c) {
          wl[c] = w[c][i] + 0.5 * slope[c][i];
          wr[c] = w[c][ip] - 0.5 * slope[c][ip];
        }
        ul[0] = wl[0];
        ur[0] = wr[0];
        for (int k = 0; k < d; ++k) {
          ul[k + 1] = wl[0] * wl[k + 1];
          ur[k + 1] = wr[0] * wr[k + 1];
        }
        fl[0] = ul[axis + 1];
        fr[0] = ur[axis + 1];
        for (int k = 0; k < d; ++k) {
          fl[k + 1] = ul[k + 1] * wl[axis + 1] + (k == axis ? wl[0] : 0.0);
          fr[k + 1] = ur[k + 1] * wr[axis + 1] + (k == axis ? wr[0] : 0.0);
        }
        const double speed = std::max(std::abs(wl[axis + 1]), std::abs(wr[axis + 1])) + 1.0;
        for (int c = 0; c <= d; ++c) flux[c][i] = 0.5 * (fl[c] + fr[c]) - 0.5 * speed * (ur[c] - ul[c]);
      }
      for (int i = 0; i < n; ++i) {
        const std::size_t s = lines.index(int(line), i);
        const int im = (i + n - 1) % n;
        drho[s] -= inv_dx * (flux[0][i] - flux[0][im]);
        for (int k = 0; k < d; ++k) dm(k, s) -= inv_dx * (flux[k + 1][i] - flux[k + 1][im]);
      }
    });
  }
}

void check_vacuum(const std::vector<double>& rho, const char* where) {
  const double low = *std::min_element(rho.begin(), rho.end());
  if (!(low >= kHydroRhoMin)) {
    std::ostringstream msg;
    msg << where << ": density " << low << " below the floor " << kHydroRhoMin;
    throw VacuumBreach(msg.str());
  }
}

/// Exact drag exchange between m and the fluid over h; updates both.
void exchange(HydroState& s, double h, bool frozen_fluid) {
  const PhaseGrid& g = s.grid;
  const std::size_t n = g.space_cells();
  for (int k = 0; k < g.dim; ++k) {
    if (frozen_fluid) {
      for (std::size_t i = 0; i < n; ++i) s.m(k, i) += frozen_exchange(s.rho[i], s.m(k, i), s.u.velocity(k, i), 1.0, h);
    } else if (g.dim == 1) {
      std::vector<double> dm(n);
      const double u_new = pooled_exchange(s.rho, s.m.component(k), s.u.velocity(k, 0), 1.0, h, g.dx(), dm);
      for (std::size_t i = 0; i < n; ++i) {
        s.m(k, i) += dm[i];
        s.u.velocity(k, i) = u_new;
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double dm = pointwise_exchange(s.rho[i], s.m(k, i), s.u.velocity(k, i), 1.0, h);
        s.m(k, i) += dm;
        s.u.velocity(k, i) -= dm;
      }
    }
  }
  if (!frozen_fluid && g.dim == 2) project_divergence_free(s.u);
}

}  // namespace

double hydro_max_dt(const HydroState& s) {
  const PhaseGrid& g = s.grid;
  double speed = 0.0;
  for (int k = 0; k < g.dim; ++k) {
    double vmax = 0.0;
    for (std::size_t i = 0; i < s.rho.size(); ++i) vmax = std::max(vmax, std::abs(s.m(k, i) / s.rho[i]));
    speed += vmax + 1.0;
  }
  return g.dx() / speed;
}

void euler_transport(HydroState& s, double dt) {
  const PhaseGrid& g = s.grid;
  check_vacuum(s.rho, "euler_transport");
  const std::size_t n = g.space_cells();
  std::vector<double> drho(n), rho1(n);
  VectorField dm(g.dim, n), m1(g.dim, n);
  euler_rhs(g, s.rho, s.m, drho, dm);
  for (std::size_t i = 0; i < n; ++i) rho1[i] = s.rho[i] + dt * drho[i];
  for (std::size_t i = 0; i < m1.data.size(); ++i) m1.data[i] = s.m.data[i] + dt * dm.data[i];
  check_vacuum(rho1, "euler_transport");
  euler_rhs(g, rho1, m1, drho, dm);
  for (std::size_t i = 0; i < n; ++i) s.rho[i] = 0.5 * (s.rho[i] + rho1[i] + dt * drho[i]);
  for (std::size_t i = 0; i < m1.data.size(); ++i) s.m.data[i] = 0.5 * (s.m.data[i] + m1.data[i] + dt * dm.data[i]);
  check_vacuum(s.rho, "euler_transport");
}

HydroState step_euler_isothermal(HydroState s, double dt) {
  exchange(s, 0.5 * dt, true);
  euler_transport(s, dt);
  exchange(s, 0.5 * dt, true);
  s.time += dt;
  return s;
}

HydroState step_hydro_coupled(HydroState s, double mu, double dt) {
  euler_transport(s, 0.5 * dt);
  exchange(s, 0.5 * dt, false);
  if (s.grid.dim == 2) {
    const VectorField none(2, s.grid.space_cells());
    s.u = step_ns_2d(s.u, none, mu, dt);
  }
  exchange(s, 0.5 * dt, false);
  euler_transport(s, 0.5 * dt);
  s.time += dt;
  return s;
}

Snapshot pack_hydro(const HydroState& s) {
  Snapshot snap;
  snap.subtype = "HYDR";
  snap.grid = s.grid;
  snap.time = s.time;
  auto& p = snap.payload;
  p.insert(p.end(), s.rho.begin(), s.rho.end());
  p.insert(p.end(), s.m.data.begin(), s.m.data.end());
  p.insert(p.end(), s.u.velocity.data.begin(), s.u.velocity.data.end());
  p.insert(p.end(), s.u.pressure.begin(), s.u.pressure.end());
  return snap;
}

HydroState unpack_hydro(const Snapshot& snap) {
  if (snap.subtype != "HYDR") throw Error("snapshot: expected a HYDR snapshot, got " + snap.subtype);
  HydroState s(snap.grid);
  s.time = snap.time;
  const std::size_t n = s.rho.size(), nm = s.m.data.size();
  if (snap.payload.size() != n + 2 * nm + n) throw Error("snapshot: payload length does not match header");
  auto it = snap.payload.begin();
  std::copy_n(it, n, s.rho.begin());
  std::copy_n(it + n, nm, s.m.data.begin());
  std::copy_n(it + n + nm, nm, s.u.velocity.data.begin());
  std::copy_n(it + n + 2 * nm, n, s.u.pressure.begin());
  return s;
}

}  // namespace flns
