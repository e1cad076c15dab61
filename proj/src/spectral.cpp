#include "tnls/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace tnls {

namespace {
// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

SpectralWorkspace::SpectralWorkspace(std::size_t n, double length) : n_(n) {
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("SpectralWorkspace: n must be a power of two");
  if (!(length > 0.0))
    throw std::invalid_argument("SpectralWorkspace: length must be > 0");

  k_.resize(n);
  const double dk = 2.0 * std::numbers::pi / length;
  for (std::size_t j = 0; j < n; ++j) {
    const auto sj = static_cast<std::ptrdiff_t>(j);
    const auto sn = static_cast<std::ptrdiff_t>(n);
    k_[j] = dk * static_cast<double>(sj <= sn / 2 ? sj : sj - sn);
  }

  buffer_.resize(n);
  auto* buf = reinterpret_cast<fftw_complex*>(buffer_.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD,
                               FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD,
                               FFTW_ESTIMATE);
  if (plan_fwd_ == nullptr || plan_bwd_ == nullptr)
    throw std::runtime_error("SpectralWorkspace: FFTW planning failed");
}

SpectralWorkspace::~SpectralWorkspace() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

double SpectralWorkspace::max_wavenumber() const { return k_[n_ / 2]; }

void SpectralWorkspace::forward(std::span<std::complex<double>> data) {
  if (data.size() != n_) throw std::invalid_argument("forward: size mismatch");
  std::copy(data.begin(), data.end(), buffer_.begin());
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  std::copy(buffer_.begin(), buffer_.end(), data.begin());
}

void SpectralWorkspace::inverse(std::span<std::complex<double>> data) {
  if (data.size() != n_) throw std::invalid_argument("inverse: size mismatch");
  std::copy(data.begin(), data.end(), buffer_.begin());
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::size_t j = 0; j < n_; ++j) data[j] = buffer_[j] * scale;
}

std::vector<std::complex<double>> SpectralWorkspace::derivative(
    std::span<const std::complex<double>> values) {
  if (values.size() != n_) throw std::invalid_argument("derivative: size mismatch");
  std::vector<std::complex<double>> out(values.begin(), values.end());
  forward(out);
  const std::complex<double> i_unit(0.0, 1.0);
  for (std::size_t j = 0; j < n_; ++j) out[j] *= i_unit * k_[j];
  out[n_ / 2] = 0.0;  // Nyquist
  inverse(out);
  return out;
}

void SpectralWorkspace::apply_multiplier(
    std::span<std::complex<double>> values,
    std::span<const std::complex<double>> multiplier) {
  if (values.size() != n_ || multiplier.size() != n_)
    throw std::invalid_argument("apply_multiplier: size mismatch");
  forward(values);
  for (std::size_t j = 0; j < n_; ++j) values[j] *= multiplier[j];
  inverse(values);
}

}  // namespace tnls
