#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flns/grid.hpp"

namespace flns {

/// d-component field on the spatial cells, stored component-major.
struct VectorField {
  int dim = 1;
  std::size_t n = 0;
  std::vector<double> data;

  VectorField() = default;
  VectorField(int d, std::size_t cells, double value = 0.0) : dim(d), n(cells), data(d * cells, value) {}

  double& operator()(int k, std::size_t s) { return data[k * n + s]; }
  double operator()(int k, std::size_t s) const { return data[k * n + s]; }
  std::span<double> component(int k) { return {data.data() + k * n, n}; }
  std::span<const double> component(int k) const { return {data.data() + k * n, n}; }
};

/// Cell averages of the particle distribution f(x, xi) on a phase grid.
struct DistributionField {
  PhaseGrid grid;
  std::vector<double> values;
  double time = 0.0;

  DistributionField() = default;
  explicit DistributionField(const PhaseGrid& g, double t = 0.0)
      : grid(g), values(g.phase_cells(), 0.0), time(t) {}

  double& at(std::size_t s, std::size_t v) { return values[s * grid.vel_cells() + v]; }
  double at(std::size_t s, std::size_t v) const { return values[s * grid.vel_cells() + v]; }

  std::span<double> column(std::size_t s) {
    return {values.data() + s * grid.vel_cells(), grid.vel_cells()};
  }
  std::span<const double> column(std::size_t s) const {
    return {values.data() + s * grid.vel_cells(), grid.vel_cells()};
  }

  /// Discrete total mass sum(f) dx^d dxi^d.
  double mass() const;
  double max_value() const;
  double min_value() const;
  /// Largest fraction of a column's mass held by its outermost velocity layer.
  double tail_fraction() const;
};

/// Incompressible fluid velocity and (diagnostic) pressure on the spatial cells.
/// In d = 1 incompressibility forces a spatially constant velocity.
struct FluidField {
  PhaseGrid grid;
  VectorField velocity;
  std::vector<double> pressure;

  FluidField() = default;
  explicit FluidField(const PhaseGrid& g)
      : grid(g), velocity(g.dim, g.space_cells()), pressure(g.space_cells(), 0.0) {}

  /// u_c = integral of u over the torus.
  std::vector<double> mean_velocity() const;
};

/// Velocity moments of f on the spatial cells.
struct MacroState {
  int dim = 1;
  std::vector<double> rho;
  VectorField m;
  VectorField u_f;
  /// Symmetric d x d tensor per cell, entry (a, b) stored as component a * d + b.
  VectorField ptilde;

  double ptilde_at(int a, int b, std::size_t s) const { return ptilde(a * dim + b, s); }
};

enum class RunMode { physical, scaled };

struct SimParams {
  double alpha = 1.0;
  double beta = 1.0;
  double sigma = 1.0;
  double mu = 0.05;
  double epsilon = 0.1;
  RunMode mode = RunMode::physical;
  double rho_floor = 1e-12;
  double cfl = 0.4;

  /// beta and sigma actually used: 1/epsilon each in scaled mode.
  double effective_beta() const { return mode == RunMode::scaled ? 1.0 / epsilon : beta; }
  double effective_sigma() const { return mode == RunMode::scaled ? 1.0 / epsilon : sigma; }

  void validate() const {
    if (alpha < 0 || beta < 0 || sigma < 0 || mu < 0)
      throw ConfigError("SimParams: alpha, beta, sigma, mu must be nonnegative");
    if (mode == RunMode::scaled && !(epsilon > 0)) throw ConfigError("SimParams: epsilon must be positive");
    if (!(cfl > 0 && cfl <= 0.9)) throw ConfigError("SimParams: cfl must lie in (0, 0.9]");
  }
};

}  // namespace flns
