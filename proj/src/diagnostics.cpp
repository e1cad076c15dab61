#include "tnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "tnls/spectral.hpp"

namespace tnls {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// <psi, A psi> with A = (w D + D w)/2 = w D - (i/2) w', evaluated with a
// spectral derivative and rectangle-rule quadrature.
ExpectationResult symmetrized_expectation(const WaveFunction& psi,
                                          std::span<const double> w,
                                          std::span<const double> w_prime,
                                          SpectralWorkspace& ws) {
  const auto dpsi = ws.derivative(psi.values);
  const Complex minus_i(0.0, -1.0);
  Complex acc(0.0, 0.0);
  double op_norm_sq = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const Complex a = w[i] * (minus_i * dpsi[i]) +
                      Complex(0.0, -0.5) * w_prime[i] * psi.values[i];
    acc += std::conj(psi.values[i]) * a;
    op_norm_sq += std::norm(a);
  }
  const double h = psi.grid->spacing();
  acc *= h;
  const double scale =
      std::max(std::abs(acc), l2_norm(psi) * std::sqrt(op_norm_sq * h));
  ExpectationResult res;
  res.value = acc.real();
  res.imag_residual = scale > 0.0 ? std::abs(acc.imag()) / scale : 0.0;
  return res;
}

std::vector<std::complex<double>> second_derivative(
    SpectralWorkspace& ws, std::span<const Complex> values) {
  std::vector<Complex> out(values.begin(), values.end());
  ws.forward(out);
  const auto k = ws.wavenumbers();
  for (std::size_t j = 0; j < out.size(); ++j) out[j] *= -k[j] * k[j];
  ws.inverse(out);
  return out;
}

// Adaptive Simpson quadrature of (1+t^2)^{-sigma}.
double weight_integrand(double t, double sigma) {
  return std::pow(1.0 + t * t, -sigma);
}

double adaptive_simpson(double a, double b, double fa, double fm, double fb,
                        double whole, double tol, double sigma, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = weight_integrand(lm, sigma);
  const double frm = weight_integrand(rm, sigma);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, sigma, depth - 1) +
         adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, sigma, depth - 1);
}

double integrate_weight(double a, double b, double sigma, double tol = 1e-13) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = weight_integrand(a, sigma);
  const double fm = weight_integrand(m, sigma);
  const double fb = weight_integrand(b, sigma);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(a, b, fa, fm, fb, whole, tol, sigma, 48);
}

}  // namespace

void WeightConfig::validate() const {
  if (!(sigma > 0.5 && sigma < 1.5))
    throw std::invalid_argument("WeightConfig: sigma must lie in (1/2, 3/2)");
  if (!(R > 0.0)) throw std::invalid_argument("WeightConfig: R must be > 0");
}

ExpectationResult dilation_expectation_full(const WaveFunction& psi) {
  const Grid& g = *psi.grid;
  const double alpha = g.params().alpha();
  std::vector<double> w(g.size()), wp(g.size(), 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) w[i] = g.r_star()[i] - alpha;
  SpectralWorkspace ws(g.size(), g.length());
  return symmetrized_expectation(psi, w, wp, ws);
}

double dilation_expectation(const WaveFunction& psi) {
  return dilation_expectation_full(psi).value;
}

double gamma_weight_antiderivative(double s, double sigma) {
  return integrate_weight(0.0, s, sigma);
}

GammaWeight::GammaWeight(const Grid& grid, double sigma) : sigma_(sigma) {
  if (!(sigma > 0.5 && sigma < 1.5))
    throw std::invalid_argument("GammaWeight: sigma must lie in (1/2, 3/2)");
  const double alpha = grid.params().alpha();
  const std::size_t n = grid.size();
  g_.resize(n);
  gp_.resize(n);
  // Cumulative quadrature along the (sorted) lattice.
  double prev_s = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = grid.r_star()[i] - alpha;
    acc += integrate_weight(prev_s, s, sigma);
    g_[i] = acc;
    gp_[i] = weight_integrand(s, sigma);
    prev_s = s;
  }
}

ExpectationResult gamma_expectation_full(const WaveFunction& psi,
                                         const GammaWeight& weight) {
  SpectralWorkspace ws(psi.size(), psi.grid->length());
  return symmetrized_expectation(psi, weight.g(), weight.g_prime(), ws);
}

double gamma_expectation(const WaveFunction& psi, const GammaWeight& weight) {
  return gamma_expectation_full(psi, weight).value;
}

double gamma_expectation(const WaveFunction& psi, const WeightConfig& w) {
  w.validate();
  return gamma_expectation(psi, GammaWeight(*psi.grid, w.sigma));
}

CommutatorResiduals commutator_identity_check(const WaveFunction& psi,
                                              const ModelParams& model) {
  const Grid& g = *psi.grid;
  const std::size_t n = g.size();
  const double alpha = g.params().alpha();
  SpectralWorkspace ws(n, g.length());
  const Complex minus_i(0.0, -1.0);

  std::vector<double> w(n), wp(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) w[i] = g.r_star()[i] - alpha;

  const auto apply_dilation = [&](std::span<const Complex> f) {
    const auto df = ws.derivative(f);
    std::vector<Complex> out(n);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = w[i] * (minus_i * df[i]) + Complex(0.0, -0.5) * f[i];
    return out;
  };
  const auto apply_hamiltonian = [&](std::span<const Complex> f) {
    auto out = second_derivative(ws, f);
    for (std::size_t i = 0; i < n; ++i) out[i] = -out[i] + g.V()[i] * f[i];
    return out;
  };

  // Route one: the commutator assembled from the discrete operators.
  const auto a_psi = apply_dilation(psi.values);
  const auto h_psi = apply_hamiltonian(psi.values);
  const auto h_a = apply_hamiltonian(a_psi);
  const auto a_h = apply_dilation(h_psi);

  // Route two: the closed form 2 D^2 - (r_* - alpha) V'.
  auto d2 = second_derivative(ws, psi.values);
  double num = 0.0, den = 0.0;
  const Complex i_unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex lhs = i_unit * (h_a[i] - a_h[i]);
    const Complex rhs = -2.0 * d2[i] - w[i] * g.dV()[i] * psi.values[i];
    num += std::norm(lhs - rhs);
    den += std::norm(rhs);
  }

  CommutatorResiduals res;
  res.operator_identity = den > 0.0 ? std::sqrt(num / den) : 0.0;

  // Chain-rule identity of the nonlinear commutator, checked pointwise.
  const double p = model.p;
  std::vector<Complex> lhs_arg(n), rhs_arg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double amp = std::abs(psi.values[i]);
    const double r = g.r()[i];
    lhs_arg[i] = std::pow(r, 1.0 - p) * std::pow(amp, p - 1.0);
    rhs_arg[i] = std::pow(r, -1.0 - p) * std::pow(amp, p + 1.0);
  }
  const auto d_lhs = ws.derivative(lhs_arg);
  const auto d_rhs = ws.derivative(rhs_arg);

  const double amp_max = sup_norm(psi);
  const double cutoff = 1e-6 * amp_max;
  double scale = 0.0;
  std::vector<double> lhs_val(n, 0.0), rhs_val(n, 0.0);
  std::vector<bool> mask(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double amp = std::abs(psi.values[i]);
    if (amp <= cutoff) continue;
    mask[i] = true;
    const double r = g.r()[i];
    lhs_val[i] = amp * amp * d_lhs[i].real();
    rhs_val[i] = (p - 1.0) / (p + 1.0) * r * r * d_rhs[i].real();
    scale = std::max(scale, std::abs(rhs_val[i]));
  }
  double worst = 0.0;
  if (scale > 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) worst = std::max(worst, std::abs(lhs_val[i] - rhs_val[i]) / scale);
  }
  res.algebraic_identity = worst;
  return res;
}

std::pair<double, double> local_decay_integrands(const WaveFunction& psi,
                                                 const WeightConfig& w,
                                                 const ModelParams& model) {
  const Grid& g = *psi.grid;
  const double beta = w.beta();
  double weighted = 0.0, window = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rs = g.r_star()[i];
    const double density = std::norm(psi.values[i]);
    weighted += std::pow(1.0 + rs * rs, -beta) * density;
    if (std::abs(rs) <= w.R) {
      window += std::pow(g.r()[i], -1.0 - model.p) *
                std::pow(std::abs(psi.values[i]), model.p + 1.0);
    }
  }
  const double h = g.spacing();
  return {weighted * h, window * h};
}

LocalDecayAccumulator::LocalDecayAccumulator(WeightConfig w, ModelParams model)
    : w_(w), model_(model) {
  w_.validate();
}

void LocalDecayAccumulator::add(const WaveFunction& psi) {
  const auto [weighted, window] = local_decay_integrands(psi, w_, model_);
  if (count_ == 0) {
    bound_proxy_ = 2.0 * l2_norm(psi) * std::sqrt(energy(psi, model_).quadratic());
  } else {
    const double dt = psi.time - last_t_;
    weighted_integral_ += 0.5 * dt * (weighted + last_weighted_);
    window_integral_ += 0.5 * dt * (window + last_window_);
  }
  last_t_ = psi.time;
  last_weighted_ = weighted;
  last_window_ = window;
  ++count_;
}

double pseudoconformal_observable(const WaveFunction& psi, double t) {
  if (!(t >= 1.0))
    throw std::domain_error("pseudoconformal_observable: requires t >= 1");
  const Grid& g = *psi.grid;
  SpectralWorkspace ws(g.size(), g.length());
  const auto dpsi = ws.derivative(psi.values);
  const Complex minus_i(0.0, -1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Complex v =
        (g.r_star()[i] / (2.0 * t)) * psi.values[i] - minus_i * dpsi[i];
    sum += std::norm(v);
  }
  return sum * g.spacing();
}

double pseudoconformal_via_factorization(const WaveFunction& psi, double t) {
  if (!(t >= 1.0))
    throw std::domain_error("pseudoconformal_via_factorization: requires t >= 1");
  const Grid& g = *psi.grid;
  std::vector<Complex> chirped(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rs = g.r_star()[i];
    chirped[i] = std::polar(1.0, -rs * rs / (4.0 * t)) * psi.values[i];
  }
  SpectralWorkspace ws(g.size(), g.length());
  const auto d = ws.derivative(chirped);
  double sum = 0.0;
  for (const auto& v : d) sum += std::norm(v);
  return sum * g.spacing();
}

SlopeFit decay_slope_fit(std::span<const std::pair<double, double>> series,
                         double t0, double t1) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [t, v] : series) {
    if (t < t0 || t > t1) continue;
    if (!(v > 0.0))
      throw std::invalid_argument("decay_slope_fit: nonpositive value in window");
    pts.emplace_back(std::log(t), std::log(v));
  }
  if (pts.size() < 8)
    throw std::invalid_argument("decay_slope_fit: fewer than 8 samples in window");

  const auto n = static_cast<double>(pts.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : pts) { sx += x; sy += y; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  SlopeFit fit;
  fit.samples = pts.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto& [x, y] : pts) {
    const double resid = y - (fit.intercept + fit.slope * x);
    ss_res += resid * resid;
  }
  fit.stderr_slope =
      pts.size() > 2 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
  return fit;
}

PositivityValue gamma_weight_positivity(double s, double sigma) {
  PositivityValue out;
  const double q = 1.0 + s * s;
  out.closed_form =
      sigma * std::pow(q, -sigma - 2.0) * (5.0 + (3.0 - 2.0 * sigma) * s * s);

  // Derivative route: g'' and g''' by sixth-order central differences of
  // the defining integrand g'(s) = (1+s^2)^{-sigma}, step scaled to the
  // local variation length.
  const double h = 5e-3 * std::sqrt(q);
  double f[7];
  for (int j = -3; j <= 3; ++j) f[j + 3] = weight_integrand(s + j * h, sigma);
  const double g2 =
      (-f[0] + 9.0 * f[1] - 45.0 * f[2] + 45.0 * f[4] - 9.0 * f[5] + f[6]) /
      (60.0 * h);
  const double g3 = (2.0 * f[0] - 27.0 * f[1] + 270.0 * f[2] - 490.0 * f[3] +
                     270.0 * f[4] - 27.0 * f[5] + 2.0 * f[6]) /
                    (180.0 * h * h);
  if (std::abs(s) < 1e-12) {
    // Removable limit: -(2/s) g'' -> -2 g'''(0), so the value is -(5/2) g'''(0).
    out.derivative_route = -2.5 * g3;
  } else {
    out.derivative_route = -(2.0 / s) * g2 - 0.5 * g3;
  }
  return out;
}

MonotonicityReport check_nondecreasing(
    std::span<const std::pair<double, double>> series, double tol_factor) {
  MonotonicityReport rep;
  double running_max = 0.0;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    running_max = std::max(running_max, std::abs(series[i].second));
    const double tol = tol_factor * std::max(running_max, 1e-12);
    const double inc = series[i + 1].second - series[i].second;
    rep.tolerance = tol;
    if (inc < rep.worst_defect) rep.worst_defect = inc;
    if (inc < -tol && rep.ok) {
      rep.ok = false;
      rep.first_violation_time = series[i + 1].first;
    }
  }
  return rep;
}

DiagnosticsRecord compute_record(const WaveFunction& psi,
                                 const ModelParams& model,
                                 const WeightConfig& w,
                                 const GammaWeight& gamma_weight) {
  DiagnosticsRecord rec;
  rec.time = psi.time;
  rec.l2 = l2_norm(psi);
  const EnergyParts e = energy(psi, model);
  rec.e_kin = e.kinetic;
  rec.e_pot = e.potential;
  rec.e_nl = e.nonlinear;
  rec.dilation = dilation_expectation(psi);
  rec.gamma_obs = gamma_expectation(psi, gamma_weight);
  const auto [weighted, window] = local_decay_integrands(psi, w, model);
  rec.local_decay_integrand = weighted;
  rec.pseudoconformal =
      psi.time >= 1.0 ? pseudoconformal_observable(psi, psi.time) : kNaN;
  double nl_mass = 0.0, vexp = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    nl_mass += std::pow(psi.grid->r()[i], 1.0 - model.p) *
               std::pow(std::abs(psi.values[i]), model.p + 1.0);
    vexp += psi.grid->V()[i] * std::norm(psi.values[i]);
  }
  rec.nonlinear_mass = nl_mass * psi.grid->spacing();
  rec.potential_expectation = vexp * psi.grid->spacing();
  rec.linf = sup_norm(psi);
  return rec;
}

void write_csv(std::ostream& os, std::span<const DiagnosticsRecord> records,
               std::span<const std::string> comment_lines) {
  for (const auto& line : comment_lines) os << "# " << line << "\n";
  os << "t,l2,e_kin,e_pot,e_nl,dilation,gamma,locdec,pconf,nlmass,vexp,linf\n";
  os << std::setprecision(17);
  for (const auto& r : records) {
    os << r.time << ',' << r.l2 << ',' << r.e_kin << ',' << r.e_pot << ','
       << r.e_nl << ',' << r.dilation << ',' << r.gamma_obs << ','
       << r.local_decay_integrand << ',' << r.pseudoconformal << ','
       << r.nonlinear_mass << ',' << r.potential_expectation << ',' << r.linf
       << "\n";
  }
}

}  // namespace tnls
