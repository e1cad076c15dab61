#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tnls {

/// FFT workspace for a periodic grid of n points over a domain of the
/// given length. Wraps FFTW plans; one workspace per grid (and per
/// thread: execution reuses an internal buffer).
class SpectralWorkspace {
 public:
  SpectralWorkspace(std::size_t n, double length);
  ~SpectralWorkspace();

  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  std::size_t size() const { return n_; }

  /// Signed wavenumbers k_j = (2*pi/L) * {0, 1, ..., n/2, -n/2+1, ..., -1}.
  std::span<const double> wavenumbers() const { return k_; }
  double max_wavenumber() const;

  /// In-place unnormalized forward DFT / normalized (1/n) inverse.
  void forward(std::span<std::complex<double>> data);
  void inverse(std::span<std::complex<double>> data);

  /// Spectral d/dx. The Nyquist mode is zeroed (its derivative has no
  /// consistent sign on a real grid).
  std::vector<std::complex<double>> derivative(
      std::span<const std::complex<double>> values);

  /// Applies a diagonal Fourier multiplier m(k): values <- F^-1 m F values.
  void apply_multiplier(std::span<std::complex<double>> values,
                        std::span<const std::complex<double>> multiplier);

 private:
  std::size_t n_;
  std::vector<double> k_;
  std::vector<std::complex<double>> buffer_;
  void* plan_fwd_;  // fftw_plan
  void* plan_bwd_;
};

}  // namespace tnls
