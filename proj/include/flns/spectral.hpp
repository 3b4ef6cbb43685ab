#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace flns {

/// FFT plans and wavenumber tables for periodic fields on the unit torus with
/// nx cells per axis (d = 1 or 2), row-major with axis 0 slowest.
///
/// Plans are built with FFTW_ESTIMATE so results do not depend on timing.
/// A workspace is not safe for concurrent use.
class SpectralWorkspace {
 public:
  using Spectrum = std::vector<std::complex<double>>;

  SpectralWorkspace(int dim, int nx);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  std::size_t size() const { return size_; }

  Spectrum forward(std::span<const double> field);
  /// Inverse transform, normalized, real part.
  std::vector<double> backward(const Spectrum& spec);

  /// Angular wavenumber 2 pi k along axis for mode idx.
  double wavenumber(std::size_t idx, int axis) const { return kvec_[axis][idx]; }
  double k_squared(std::size_t idx) const { return k2_[idx]; }
  /// 2/3-rule mask: false for modes with any |k_i| > nx / 3.
  bool kept(std::size_t idx) const { return mask_[idx] != 0; }
  /// Mode has |k| = nx / 2 along axis (no symmetric partner).
  bool nyquist(std::size_t idx, int axis) const { return (nyquist_[idx] >> axis) & 1; }

  /// exp(-mu |k|^2 h) per mode; cached for the most recent (mu, h).
  const std::vector<double>& integrating_factor(double mu, double h);

 private:
  int dim_;
  int nx_;
  std::size_t size_;
  void* buffer_;
  void* plan_forward_;
  void* plan_backward_;
  std::vector<double> kvec_[2];
  std::vector<double> k2_;
  std::vector<char> mask_;
  std::vector<char> nyquist_;
  std::vector<double> factor_;
  double factor_mu_ = -1.0;
  double factor_h_ = -1.0;
};

/// Shared workspace for (dim, nx); created on first use.
SpectralWorkspace& spectral_workspace(int dim, int nx);

/// Spectral derivative along axis of a periodic scalar field.
std::vector<double> spectral_derivative(std::span<const double> field, int dim, int nx, int axis);

}  // namespace flns
