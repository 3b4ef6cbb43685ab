#include "flns/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

namespace flns {

namespace {

int signed_mode(int i, int n) { return i <= n / 2 ? i : i - n; }

}  // namespace

SpectralWorkspace::SpectralWorkspace(int dim, int nx)
    : dim_(dim), nx_(nx), size_(dim == 1 ? std::size_t(nx) : std::size_t(nx) * nx) {
  auto* buf = fftw_alloc_complex(size_);
  buffer_ = buf;
  if (dim == 1) {
    plan_forward_ = fftw_plan_dft_1d(nx, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_backward_ = fftw_plan_dft_1d(nx, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    plan_forward_ = fftw_plan_dft_2d(nx, nx, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_backward_ = fftw_plan_dft_2d(nx, nx, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  const double two_pi = 2.0 * std::numbers::pi;
  kvec_[0].assign(size_, 0.0);
  kvec_[1].assign(size_, 0.0);
  k2_.assign(size_, 0.0);
  mask_.assign(size_, 1);
  nyquist_.assign(size_, 0);
  for (std::size_t idx = 0; idx < size_; ++idx) {
    int ks[2] = {0, 0};
    if (dim == 1) {
      ks[0] = signed_mode(int(idx), nx);
    } else {
      ks[0] = signed_mode(int(idx / nx), nx);
      ks[1] = signed_mode(int(idx % nx), nx);
    }
    for (int a = 0; a < dim; ++a) {
      kvec_[a][idx] = two_pi * ks[a];
      k2_[idx] += kvec_[a][idx] * kvec_[a][idx];
      if (3 * std::abs(ks[a]) > nx) mask_[idx] = 0;
      if (2 * std::abs(ks[a]) == nx) nyquist_[idx] |= char(1 << a);
    }
  }
}

SpectralWorkspace::~SpectralWorkspace() {
  fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
  fftw_free(buffer_);
}

SpectralWorkspace::Spectrum SpectralWorkspace::forward(std::span<const double> field) {
  auto* buf = static_cast<fftw_complex*>(buffer_);
  for (std::size_t i = 0; i < size_; ++i) {
    buf[i][0] = field[i];
    buf[i][1] = 0.0;
  }
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  Spectrum out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = {buf[i][0], buf[i][1]};
  return out;
}

std::vector<double> SpectralWorkspace::backward(const Spectrum& spec) {
  auto* buf = static_cast<fftw_complex*>(buffer_);
  for (std::size_t i = 0; i < size_; ++i) {
    buf[i][0] = spec[i].real();
    buf[i][1] = spec[i].imag();
  }
  fftw_execute(static_cast<fftw_plan>(plan_backward_));
  std::vector<double> out(size_);
  const double scale = 1.0 / double(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = buf[i][0] * scale;
  return out;
}

const std::vector<double>& SpectralWorkspace::integrating_factor(double mu, double h) {
  if (mu != factor_mu_ || h != factor_h_ || factor_.size() != size_) {
    factor_.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) factor_[i] = std::exp(-mu * k2_[i] * h);
    factor_mu_ = mu;
    factor_h_ = h;
  }
  return factor_;
}

SpectralWorkspace& spectral_workspace(int dim, int nx) {
  static std::mutex lock;
  static std::map<std::pair<int, int>, std::unique_ptr<SpectralWorkspace>> cache;
  std::lock_guard<std::mutex> guard(lock);
  auto& slot = cache[{dim, nx}];
  if (!slot) slot = std::make_unique<SpectralWorkspace>(dim, nx);
  return *slot;
}

std::vector<double> spectral_derivative(std::span<const double> field, int dim, int nx, int axis) {
  auto& ws = spectral_workspace(dim, nx);
  auto spec = ws.forward(field);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (ws.nyquist(i, axis)) {
      spec[i] = 0.0;
      continue;
    }
    spec[i] *= std::complex<double>(0.0, ws.wavenumber(i, axis));
  }
  return ws.backward(spec);
}

}  // namespace flns
