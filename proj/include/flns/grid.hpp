#pragma once

#include <cmath>
#include <cstddef>

#include "flns/errors.hpp"

namespace flns {

/// Tensor grid on T^d x [-xi_max, xi_max]^d with d in {1, 2}.
///
/// Space is the unit torus per axis (periodic); velocity is a box whose outer
/// faces carry zero flux. Flat indices are row-major: a phase cell is
/// space_index * vel_cells() + vel_index, and within each part axis 0 is the
/// slowest-varying axis.
struct PhaseGrid {
  int dim = 1;
  int nx = 64;
  int nxi = 64;
  double xi_max = 6.0;

  PhaseGrid() = default;
  PhaseGrid(int d, int nx_, int nxi_, double xi_max_) : dim(d), nx(nx_), nxi(nxi_), xi_max(xi_max_) {
    validate();
  }

  void validate() const {
    if (dim != 1 && dim != 2) throw ConfigError("PhaseGrid: dim must be 1 or 2");
    if (nx < 4 || nx % 2 != 0) throw ConfigError("PhaseGrid: nx must be even and >= 4");
    if (nxi < 4 || nxi % 2 != 0) throw ConfigError("PhaseGrid: nxi must be even and >= 4");
    if (!(xi_max > 0.0)) throw ConfigError("PhaseGrid: xi_max must be positive");
  }

  double dx() const { return 1.0 / nx; }
  double dxi() const { return 2.0 * xi_max / nxi; }

  std::size_t space_cells() const { return dim == 1 ? std::size_t(nx) : std::size_t(nx) * nx; }
  std::size_t vel_cells() const { return dim == 1 ? std::size_t(nxi) : std::size_t(nxi) * nxi; }
  std::size_t phase_cells() const { return space_cells() * vel_cells(); }

  /// Spatial cell volume dx^d.
  double space_volume() const { return std::pow(dx(), dim); }
  /// Velocity cell volume dxi^d.
  double vel_volume() const { return std::pow(dxi(), dim); }
  double phase_volume() const { return space_volume() * vel_volume(); }

  double x_center(int i) const { return (i + 0.5) * dx(); }
  double xi_center(int j) const { return -xi_max + (j + 0.5) * dxi(); }
  /// Position of the face between velocity cells j and j + 1.
  double xi_face(int j) const { return -xi_max + (j + 1) * dxi(); }

  /// Per-axis index of a flat spatial (or velocity) index.
  int space_coord(std::size_t s, int axis) const {
    if (dim == 1) return static_cast<int>(s);
    return axis == 0 ? static_cast<int>(s / nx) : static_cast<int>(s % nx);
  }
  int vel_coord(std::size_t v, int axis) const {
    if (dim == 1) return static_cast<int>(v);
    return axis == 0 ? static_cast<int>(v / nxi) : static_cast<int>(v % nxi);
  }
  /// Velocity component `axis` at the centre of flat velocity cell v.
  double xi_at(std::size_t v, int axis) const { return xi_center(vel_coord(v, axis)); }
  double x_at(std::size_t s, int axis) const { return x_center(space_coord(s, axis)); }

  bool operator==(const PhaseGrid& o) const {
    return dim == o.dim && nx == o.nx && nxi == o.nxi && xi_max == o.xi_max;
  }
};

}  // namespace flns
