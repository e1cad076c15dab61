#include "tnls/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace tnls {

namespace {

// Steps spanning an interval exactly: the count is rounded and the
// actual dt adjusted so the endpoint lands on the sample time.
void propagate_span(WaveFunction& psi, const ModelParams& model,
                    EvolutionMode mode, double span, double dt) {
  if (span == 0.0) return;
  const auto count = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(std::abs(span / dt))));
  const double dt_adj = span / static_cast<double>(count);
  Propagator prop(psi.grid, model, mode, dt_adj);
  prop.step_block(psi, count);
}

double l2_distance(const WaveFunction& a, const WaveFunction& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    sum += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(sum * a.grid->spacing());
}

}  // namespace

double StrichartzExponents::IdentityResiduals::max() const {
  return std::max({young, admissibility, duality});
}

StrichartzExponents strichartz_exponents(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("strichartz_exponents: p must be > 1");
  StrichartzExponents e;
  e.p = p;
  e.q = p + 1.0;
  e.q_prime = e.q / (e.q - 1.0);
  e.kappa = 2.0 * (p + 1.0) / (p - 1.0);
  e.k = 2.0 * (p - 1.0) * (p + 1.0) / (p + 3.0);
  e.admissible_wave_op = p > ModelParams::wave_op_threshold();
  e.admissible_completeness = p > 4.0;
  return e;
}

StrichartzExponents::IdentityResiduals
StrichartzExponents::identity_residuals() const {
  IdentityResiduals r;
  r.young = std::abs(1.0 + 1.0 / k - (1.0 / kappa + p / k));
  r.admissibility = std::abs((0.5 - 1.0 / q) * kappa - 1.0);
  r.duality = std::abs(p * q_prime - q);
  return r;
}

std::vector<std::pair<double, double>> dispersive_ratio(
    const WaveFunction& phi, double q, std::vector<double> t_samples,
    EvolutionMode mode, double dt) {
  if (mode == EvolutionMode::nonlinear)
    throw std::invalid_argument("dispersive_ratio: linear modes only");
  if (!(q >= 2.0)) throw std::invalid_argument("dispersive_ratio: q must be >= 2");
  std::sort(t_samples.begin(), t_samples.end());
  if (!t_samples.empty() && t_samples.front() < 0.0)
    throw std::invalid_argument("dispersive_ratio: negative sample time");

  const double q_prime = std::isinf(q) ? 1.0 : q / (q - 1.0);
  const double exponent = 0.5 - (std::isinf(q) ? 0.0 : 1.0 / q);
  const double denom = lq_norm(phi, q_prime);

  ModelParams linear;  // unused by the linear modes
  WaveFunction psi = phi;
  std::vector<std::pair<double, double>> out;
  double t_now = 0.0;
  for (double t : t_samples) {
    // One exact step suffices in free mode; the kinetic factor is exact
    // at any dt.
    const double span = t - t_now;
    if (mode == EvolutionMode::free_particle) {
      propagate_span(psi, linear, mode, span, span);
    } else {
      propagate_span(psi, linear, mode, span, dt);
    }
    t_now = t;
    const double ratio = std::pow(t, exponent) * lq_norm(psi, q) / denom;
    out.emplace_back(t, ratio);
  }
  return out;
}

ScatteringResult extract_asymptotic_state(const WaveFunction& psi0,
                                          const ModelParams& model,
                                          std::vector<double> schedule,
                                          double dt) {
  if (schedule.empty())
    throw std::invalid_argument("extract_asymptotic_state: empty schedule");
  std::sort(schedule.begin(), schedule.end());
  if (!model.completeness_valid()) {
    std::clog << "extract_asymptotic_state: p = " << model.p
              << " is below the completeness regime (p > 4); proceeding "
                 "in exploratory mode\n";
  }
  if (!domain_guard_ok(psi0, schedule.back()))
    throw std::runtime_error(
        "extract_asymptotic_state: grid too small for the largest horizon time");

  ModelParams linear;
  ScatteringResult result;
  WaveFunction psi = psi0;
  WaveFunction phi_prev;
  bool have_prev = false;
  double t_now = psi0.time;
  for (double T : schedule) {
    propagate_span(psi, model, EvolutionMode::nonlinear, T - t_now, dt);
    t_now = T;
    WaveFunction phi = psi;
    propagate_span(phi, linear, EvolutionMode::linear_with_V, -T, dt);
    if (have_prev)
      result.residual_history.emplace_back(T, l2_distance(phi, phi_prev));
    phi_prev = std::move(phi);
    have_prev = true;
  }
  result.psi_plus = std::move(phi_prev);
  result.psi_plus.time = 0.0;
  return result;
}

WaveOperatorResult construct_wave_operator(const WaveFunction& psi_plus,
                                           const ModelParams& model,
                                           const WaveOperatorOptions& opts,
                                           double dt) {
  if (!(opts.T > 0.0 && opts.T_max > opts.T))
    throw std::invalid_argument("construct_wave_operator: need 0 < T < T_max");
  if (!model.wave_op_valid()) {
    std::clog << "construct_wave_operator: p = " << model.p
              << " is below the wave-operator regime; proceeding\n";
  }

  const auto grid = psi_plus.grid;
  const double p = model.p;
  const auto exps = strichartz_exponents(p);
  ModelParams linear;

  const auto j_count = static_cast<std::size_t>(
      std::ceil((opts.T_max - opts.T) / opts.node_spacing));
  const double delta = (opts.T_max - opts.T) / static_cast<double>(j_count);
  const std::size_t n_nodes = j_count + 1;

  // Free term e^{-it H} psi_plus along the node ladder.
  std::vector<WaveFunction> free_term;
  free_term.reserve(n_nodes);
  {
    WaveFunction f = psi_plus;
    f.time = 0.0;
    propagate_span(f, linear, EvolutionMode::linear_with_V, opts.T, dt);
    free_term.push_back(f);
    for (std::size_t j = 1; j < n_nodes; ++j) {
      propagate_span(f, linear, EvolutionMode::linear_with_V, delta, dt);
      free_term.push_back(f);
    }
  }

  const auto nonlinearity = [&](const WaveFunction& psi) {
    WaveFunction out = psi;
    const auto r = grid->r();
    for (std::size_t i = 0; i < out.size(); ++i)
      out.values[i] = std::pow(r[i], 1.0 - p) *
                      std::pow(std::abs(psi.values[i]), p - 1.0) *
                      psi.values[i];
    return out;
  };

  // Discrete X_T norm: L^k in time (trapezoid over nodes) of L^q in space.
  const auto x_norm = [&](const std::vector<WaveFunction>& states) {
    double acc = 0.0;
    for (std::size_t j = 0; j < states.size(); ++j) {
      const double wgt = (j == 0 || j + 1 == states.size()) ? 0.5 : 1.0;
      acc += wgt * delta * std::pow(lq_norm(states[j], exps.q), exps.k);
    }
    return std::pow(acc, 1.0 / exps.k);
  };

  // Truncation-tail estimate from the measured decay of the free term's
  // interaction integrand at the last two nodes.
  WaveOperatorResult result;
  {
    const double g_a = model.lambda * l2_norm(nonlinearity(free_term[n_nodes - 2]));
    const double g_b = model.lambda * l2_norm(nonlinearity(free_term[n_nodes - 1]));
    const double t_a = opts.T_max - delta, t_b = opts.T_max;
    if (g_b > 0.0 && g_a > g_b) {
      const double gamma = std::log(g_a / g_b) / std::log(t_b / t_a);
      result.tail_estimate =
          gamma > 1.0 ? g_b * t_b / (gamma - 1.0)
                      : std::numeric_limits<double>::infinity();
    }
  }

  std::vector<WaveFunction> iterate = free_term;
  const double ref_norm = std::max(x_norm(free_term), 1e-300);
  const Complex minus_i_lambda(0.0, -model.lambda);

  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    // Backward sweep accumulating the interaction integral
    // A_j = int_{t_j}^{T_max} e^{-i (t_j - s) H} N(psi_s) ds (trapezoid).
    std::vector<WaveFunction> next(n_nodes);
    WaveFunction acc = make_wavefunction(grid, opts.T_max);
    next[n_nodes - 1] = free_term[n_nodes - 1];
    for (std::size_t j = n_nodes - 1; j-- > 0;) {
      WaveFunction upper = nonlinearity(iterate[j + 1]);
      for (std::size_t i = 0; i < acc.size(); ++i)
        acc.values[i] += 0.5 * delta * upper.values[i];
      propagate_span(acc, linear, EvolutionMode::linear_with_V, -delta, dt);
      const WaveFunction lower = nonlinearity(iterate[j]);
      for (std::size_t i = 0; i < acc.size(); ++i)
        acc.values[i] += 0.5 * delta * lower.values[i];
      next[j] = free_term[j];
      for (std::size_t i = 0; i < acc.size(); ++i)
        next[j].values[i] += minus_i_lambda * acc.values[i];
    }

    std::vector<WaveFunction> diff(n_nodes);
    for (std::size_t j = 0; j < n_nodes; ++j) {
      diff[j] = next[j];
      for (std::size_t i = 0; i < diff[j].size(); ++i)
        diff[j].values[i] -= iterate[j].values[i];
    }
    const double d = x_norm(diff);
    result.iterate_deltas.push_back(d);
    iterate = std::move(next);
    ++result.iterations;

    if (result.iterate_deltas.size() >= 2) {
      const auto& ds = result.iterate_deltas;
      result.contraction_ratio = ds[1] / std::max(ds[0], 1e-300);
      if (ds.back() > ds[ds.size() - 2] &&
          ds.back() > 10.0 * opts.tol * ref_norm) {
        throw std::runtime_error(
            "construct_wave_operator: iteration is not contracting "
            "(measured ratio " +
            std::to_string(ds.back() / std::max(ds[ds.size() - 2], 1e-300)) +
            ")");
      }
    }
    if (d <= opts.tol * ref_norm) break;
  }

  // Matched state at t = T; pull back to t = 0 with the full dynamics.
  WaveFunction psi_T = iterate.front();
  psi_T.time = opts.T;
  propagate_span(psi_T, model, EvolutionMode::nonlinear, -opts.T, dt);
  psi_T.time = 0.0;
  result.psi0 = std::move(psi_T);
  return result;
}

ScatteringResult free_channel_comparison(const WaveFunction& psi_plus,
                                         std::vector<double> schedule,
                                         double dt) {
  if (schedule.empty())
    throw std::invalid_argument("free_channel_comparison: empty schedule");
  std::sort(schedule.begin(), schedule.end());
  if (!domain_guard_ok(psi_plus, schedule.back()))
    throw std::runtime_error(
        "free_channel_comparison: grid too small for the largest horizon time");

  ModelParams linear;
  ScatteringResult result;
  WaveFunction evolved = psi_plus;
  evolved.time = 0.0;
  WaveFunction phi_prev;
  bool have_prev = false;
  double t_now = 0.0;
  for (double T : schedule) {
    propagate_span(evolved, linear, EvolutionMode::linear_with_V, T - t_now, dt);
    t_now = T;
    WaveFunction phi = evolved;
    // Free pull-back is exact in a single step.
    propagate_span(phi, linear, EvolutionMode::free_particle, -T, -T);
    if (have_prev)
      result.residual_history.emplace_back(T, l2_distance(phi, phi_prev));
    phi_prev = std::move(phi);
    have_prev = true;
  }
  result.psi_plus = std::move(phi_prev);
  result.psi_plus.time = 0.0;
  return result;
}

}  // namespace tnls
