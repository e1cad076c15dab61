#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tnls/solver.hpp"
#include "tnls/state.hpp"

namespace tnls {

/// One time-slice of all monitored observables.
struct DiagnosticsRecord {
  double time = 0.0;
  double l2 = 0.0;
  double e_kin = 0.0, e_pot = 0.0, e_nl = 0.0;
  double dilation = 0.0;               // <psi, A_alpha psi>
  double gamma_obs = 0.0;              // <psi, gamma psi>
  double local_decay_integrand = 0.0;  // ||(1+r_*^2)^{-beta/2} psi||^2
  double pseudoconformal = 0.0;        // <(r_*/2t - D)^2>, NaN for t < 1
  double nonlinear_mass = 0.0;         // integral of r^{-(p-1)} |psi|^{p+1}
  double potential_expectation = 0.0;  // <psi, V psi>
  double linf = 0.0;
};

/// Weight parameters of the smoothed dilation observable gamma.
struct WeightConfig {
  double sigma = 1.0;  // in (1/2, 3/2)
  double R = 10.0;     // half-width of the near-region window

  double beta() const { return sigma + 1.0; }
  void validate() const;
};

/// Expectation of the dilation generator centered at the potential
/// maximum, A = ((r_* - alpha) D + D (r_* - alpha)) / 2. The symmetric
/// operator makes the value real; the imaginary residue is checked to
/// stay below 1e-10 of the scale.
double dilation_expectation(const WaveFunction& psi);

struct ExpectationResult {
  double value = 0.0;
  double imag_residual = 0.0;
};
ExpectationResult dilation_expectation_full(const WaveFunction& psi);

/// g(s) = integral_0^s (1+t^2)^{-sigma} dt and its derivative tabulated
/// on a grid, shifted by alpha. Adaptive Simpson quadrature to 1e-12;
/// one-time cost per (grid, sigma).
class GammaWeight {
 public:
  GammaWeight(const Grid& grid, double sigma);
  std::span<const double> g() const { return g_; }
  std::span<const double> g_prime() const { return gp_; }
  double sigma() const { return sigma_; }

 private:
  double sigma_;
  std::vector<double> g_, gp_;
};

/// Antiderivative g(s) itself, for scalar use and the arctan cross-check
/// at sigma = 1.
double gamma_weight_antiderivative(double s, double sigma);

double gamma_expectation(const WaveFunction& psi, const GammaWeight& weight);
double gamma_expectation(const WaveFunction& psi, const WeightConfig& w);
ExpectationResult gamma_expectation_full(const WaveFunction& psi,
                                         const GammaWeight& weight);

struct CommutatorResiduals {
  /// Relative L2 residual of i[H, A_alpha] = 2 D^2 - (r_* - alpha) V'
  /// applied to the test function through independent discrete routes.
  double operator_identity = 0.0;
  /// Max relative pointwise residual of the chain-rule identity
  /// |psi|^2 d(r^{1-p}|psi|^{p-1}) = ((p-1)/(p+1)) r^2 d(r^{-p-1}|psi|^{p+1}),
  /// over points with |psi| > 1e-6 max|psi|, scaled by the sup of the
  /// right-hand side.
  double algebraic_identity = 0.0;
};
CommutatorResiduals commutator_identity_check(const WaveFunction& psi,
                                              const ModelParams& model);

/// Both local-decay integrands at one time slice: the weighted L2 mass
/// ||(1+r_*^2)^{-beta/2} psi||^2 and the near-region nonlinear mass
/// integral_{-R}^{R} r^{-p-1} |psi|^{p+1} dr_*.
std::pair<double, double> local_decay_integrands(const WaveFunction& psi,
                                                 const WeightConfig& w,
                                                 const ModelParams& model);

/// Trapezoid-in-time accumulator for the local-decay integrals, with the
/// bound proxy 2 ||psi0||_2 (quadratic energy)^{1/2} frozen from the
/// first sample.
class LocalDecayAccumulator {
 public:
  LocalDecayAccumulator(WeightConfig w, ModelParams model);
  void add(const WaveFunction& psi);

  double weighted_integral() const { return weighted_integral_; }
  double window_integral() const { return window_integral_; }
  double bound_proxy() const { return bound_proxy_; }
  std::size_t samples() const { return count_; }

 private:
  WeightConfig w_;
  ModelParams model_;
  double weighted_integral_ = 0.0, window_integral_ = 0.0;
  double bound_proxy_ = 0.0;
  double last_t_ = 0.0, last_weighted_ = 0.0, last_window_ = 0.0;
  std::size_t count_ = 0;
};

/// ||(r_*/2t - D) psi||^2 for t >= 1, evaluated directly in physical
/// space with a spectral derivative.
double pseudoconformal_observable(const WaveFunction& psi, double t);
/// Equivalent route ||D (e^{-i r_*^2 / 4t} psi)||^2 via the quadratic
/// phase factorization. Cross-check only; the chirp must stay resolved.
double pseudoconformal_via_factorization(const WaveFunction& psi, double t);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t samples = 0;
};
/// OLS fit of log(value) against log(t) over samples with t in
/// [t0, t1]. Requires at least 8 samples in the window, all positive.
SlopeFit decay_slope_fit(std::span<const std::pair<double, double>> series,
                         double t0, double t1);

struct PositivityValue {
  double closed_form = 0.0;      // sigma (1+s^2)^{-sigma-2} (5 + (3-2 sigma) s^2)
  double derivative_route = 0.0; // -(2/s) g'' - (1/2) g''' from g's derivatives
};
/// The curvature expression controlling positivity of the smoothed
/// dilation commutator. Positive for 0 < sigma < 3/2; s = 0 uses the
/// removable limit 5 sigma.
PositivityValue gamma_weight_positivity(double s, double sigma);

struct MonotonicityReport {
  bool ok = true;
  double worst_defect = 0.0;          // most negative increment found
  double first_violation_time = 0.0;  // meaningful when !ok
  double tolerance = 0.0;
};
/// Checks that a recorded observable is nondecreasing within
/// tol_factor times its running max magnitude.
MonotonicityReport check_nondecreasing(
    std::span<const std::pair<double, double>> series,
    double tol_factor = 1e-7);

/// Full diagnostics row. Pass the model used for the run; the
/// pseudoconformal column is NaN before t = 1.
DiagnosticsRecord compute_record(const WaveFunction& psi,
                                 const ModelParams& model,
                                 const WeightConfig& w,
                                 const GammaWeight& gamma_weight);

/// CSV with header "t,l2,e_kin,e_pot,e_nl,dilation,gamma,locdec,pconf,
/// nlmass,vexp,linf", full round-trip precision. Comment lines may be
/// passed through as "# "-prefixed header rows.
void write_csv(std::ostream& os, std::span<const DiagnosticsRecord> records,
               std::span<const std::string> comment_lines = {});

}  // namespace tnls
