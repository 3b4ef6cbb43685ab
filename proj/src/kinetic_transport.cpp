#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "flns/kinetic.hpp"
#include "flns/parallel.hpp"

namespace flns {

namespace {

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

/// Upwind MUSCL (minmod) flux difference of one periodic line, written as a rate into out.
void muscl_rate(const std::vector<double>& g, std::vector<double>& flux, std::vector<double>& out, double speed,
                double dx) {
  const int n = static_cast<int>(g.size());
  auto slope = [&](int i) { return minmod(g[i] - g[(i + n - 1) % n], g[(i + 1) % n] - g[i]); };
  // flux[i] sits on the face between cell i and i + 1
  for (int i = 0; i < n; ++i) {
    const double face = speed > 0 ? g[i] + 0.5 * slope(i) : g[(i + 1) % n] - 0.5 * slope((i + 1) % n);
    flux[i] = speed * face;
  }
  for (int i = 0; i < n; ++i) out[i] = -(flux[i] - flux[(i + n - 1) % n]) / dx;
}

/// SSP-RK2 step of the semi-discrete MUSCL scheme, so the time error is second order at fixed dx.
void advect_line(std::vector<double>& g, std::vector<double>& stage, std::vector<double>& flux,
                 std::vector<double>& rate, double speed, double dt, double dx) {
  const std::size_t n = g.size();
  muscl_rate(g, flux, rate, speed, dx);
  for (std::size_t i = 0; i < n; ++i) stage[i] = g[i] + dt * rate[i];
  muscl_rate(stage, flux, rate, speed, dx);
  for (std::size_t i = 0; i < n; ++i) g[i] = 0.5 * g[i] + 0.5 * (stage[i] + dt * rate[i]);
}

void sweep_axis(DistributionField& f, int axis, double dt) {
  const PhaseGrid& g = f.grid;
  const std::size_t nv = g.vel_cells();
  const std::size_t nx = g.nx;
  const std::size_t lines_per_v = g.dim == 1 ? 1 : nx;
  const std::size_t stride = g.dim == 1 ? nv : (axis == 0 ? nx * nv : nv);
  const std::size_t nlines = lines_per_v * nv;

  parallel_for(nlines, [&](std::size_t line) {
    const std::size_t v = line % nv;
    const std::size_t other = line / nv;
    const double speed = g.xi_at(v, axis);
    if (speed == 0.0) return;
    std::size_t base = v;
    if (g.dim == 2) base += (axis == 0 ? other * nv : other * nx * nv);
    std::vector<double> buf(nx), stage(nx), flux(nx), rate(nx);
    for (std::size_t i = 0; i < nx; ++i) buf[i] = f.values[base + i * stride];
    advect_line(buf, stage, flux, rate, speed, dt, g.dx());
    for (std::size_t i = 0; i < nx; ++i) f.values[base + i * stride] = buf[i];
  });
}

}  // namespace

double transport_cfl(const PhaseGrid& grid, double dt) {
  return (grid.xi_max - 0.5 * grid.dxi()) * dt / grid.dx();
}

DistributionField step_transport(DistributionField f, double dt, bool reverse_axes) {
  if (dt <= 0) return f;
  const double nu = transport_cfl(f.grid, dt);
  if (nu > kTransportCourantMax + 1e-12) {
    std::ostringstream msg;
    msg << "step_transport: Courant number " << nu << " exceeds " << kTransportCourantMax << " (dt = " << dt << ")";
    throw CflViolation(msg.str());
  }
  for (int k = 0; k < f.grid.dim; ++k) {
    const int axis = reverse_axes ? f.grid.dim - 1 - k : k;
    sweep_axis(f, axis, dt);
  }
  f.time += dt;
  return f;
}

std::string KineticStepPlan::to_json_line(long step, double wall_seconds) const {
  std::ostringstream out;
  out.precision(17);
  out << "{\"step\":" << step << ",\"dt\":" << dt << ",\"splitting\":\""
      << (splitting == Splitting::Strang ? "Strang" : "Lie") << "\",\"operators\":[";
  for (std::size_t i = 0; i < substeps.size(); ++i) {
    if (i) out << ',';
    switch (substeps[i]) {
      case OperatorTag::TransportX: out << "\"TransportX\""; break;
      case OperatorTag::DriftFluid: out << "\"DriftFluid\""; break;
      case OperatorTag::CollisionFP: out << "\"CollisionFP\""; break;
    }
  }
  out << "],\"cfl_transport\":" << cfl_report.transport << ",\"cfl_drift\":" << cfl_report.drift
      << ",\"wall_time_s\":" << wall_seconds << '}';
  return out.str();
}

}  // namespace flns
