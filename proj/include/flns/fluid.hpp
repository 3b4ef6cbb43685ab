#pragma once

#include <span>
#include <vector>

#include "flns/fields.hpp"

namespace flns {

/// Particle drag on the fluid, alpha (m - rho u) per cell. Vacuum cells give 0.
VectorField coupling_source(const MacroState& macro, const FluidField& u, double alpha);

/// Leray projection onto mean-preserving divergence-free fields. In d = 1 the
/// velocity is replaced by its spatial mean.
void project_divergence_free(FluidField& u);

/// Max norm of the spectral divergence (0 in d = 1).
double max_divergence(const FluidField& u);

/// integral |grad u|^2 dx computed spectrally (0 in d = 1).
double gradient_energy(const FluidField& u);

/// One pseudo-spectral step of
///   du/dt + u . grad u + grad p = mu lap u + source,  div u = 0
/// in d = 2: rotational nonlinearity with 2/3 dealiasing, integrating factor for
/// the viscous term, RK2, Leray projection of every stage. The source is held
/// fixed over the step. The returned pressure has zero mean.
FluidField step_ns_2d(const FluidField& u, const VectorField& source, double mu, double dt);

/// Exact solution over dt of du/dt = -alpha (u int rho dx - int m dx) for the
/// spatially constant d = 1 fluid, with the moments frozen.
std::vector<double> step_fluid_1d(std::span<const double> u_mean, const MacroState& macro, double alpha, double dt);

}  // namespace flns
