#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <vector>

#include "tnls/geometry.hpp"

namespace tnls {

using Complex = std::complex<double>;

/// Nonlinearity parameters with the regime thresholds precomputed.
struct ModelParams {
  double lambda = 1.0;  // repulsive coupling, > 0
  double p = 5.0;       // power, > 1

  void validate() const;

  bool pseudoconformal_valid() const { return p > 3.0; }
  bool wave_op_valid() const { return p > wave_op_threshold(); }
  bool completeness_valid() const { return p > 4.0; }

  static double wave_op_threshold();  // (3 + sqrt(17)) / 2
};

/// Samples of the reduced wave function psi on a Grid, plus the time stamp.
struct WaveFunction {
  std::shared_ptr<const Grid> grid;
  std::vector<Complex> values;
  double time = 0.0;

  std::size_t size() const { return values.size(); }
};

WaveFunction make_wavefunction(std::shared_ptr<const Grid> grid, double time = 0.0);

/// Gaussian packet exp(-(r_* - center)^2 / (2 width^2) + i momentum r_*),
/// scaled by the given amplitude.
WaveFunction gaussian_packet(std::shared_ptr<const Grid> grid, double center,
                             double width, double momentum,
                             double amplitude = 1.0, double time = 0.0);

/// Rectangle-rule L2 norm over the periodic lattice.
double l2_norm(const WaveFunction& psi);
double sup_norm(const WaveFunction& psi);
/// L^q norm, q >= 1; q = infinity maps to sup_norm.
double lq_norm(const WaveFunction& psi, double q);

struct EnergyParts {
  double kinetic = 0.0;    // |d psi / d r_*|^2, spectral derivative
  double potential = 0.0;  // V |psi|^2
  double nonlinear = 0.0;  // (2 lambda / (p+1)) r^{-(p-1)} |psi|^{p+1}
  double total() const { return kinetic + potential + nonlinear; }
  double quadratic() const { return kinetic + potential; }
};

EnergyParts energy(const WaveFunction& psi, const ModelParams& model);

/// Unitary picture change u = psi / r and its inverse. The weighted
/// L2(r^2 dr_*) norm of u equals the L2(dr_*) norm of psi.
std::vector<Complex> to_radial(const WaveFunction& psi);
WaveFunction from_radial(std::shared_ptr<const Grid> grid,
                         const std::vector<Complex>& u, double time = 0.0);
double weighted_radial_norm(const Grid& grid, const std::vector<Complex>& u);

/// Plain-text serialization: header "t=<time> n=<n> M=<M>", then one
/// "r_star real imag" line per grid point, 17 significant digits.
void save_wavefunction(std::ostream& os, const WaveFunction& psi);
void save_wavefunction(const std::string& path, const WaveFunction& psi);
WaveFunction load_wavefunction(std::istream& is);
WaveFunction load_wavefunction(const std::string& path);

}  // namespace tnls
