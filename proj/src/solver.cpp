#include "tnls/solver.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tnls {

double EvolutionConfig::nyquist_phase(const Grid& grid) const {
  const double k_max = std::numbers::pi / grid.spacing();
  return std::abs(dt) * k_max * k_max;
}

bool EvolutionConfig::phase_wrap_ok(const Grid& grid) const {
  return nyquist_phase(grid) <= std::numbers::pi;
}

double default_dt(const Grid& grid) {
  const double k_max = std::numbers::pi / grid.spacing();
  return 0.25 * std::numbers::pi / (k_max * k_max);
}

double momentum_quantile(const WaveFunction& psi, double quantile) {
  if (!(quantile > 0.0 && quantile < 1.0))
    throw std::invalid_argument("momentum_quantile: quantile must be in (0,1)");
  const Grid& g = *psi.grid;
  SpectralWorkspace ws(g.size(), g.length());
  std::vector<Complex> hat(psi.values);
  ws.forward(hat);

  // Spectral mass per |k| shell (k and -k combined).
  const auto k = ws.wavenumbers();
  const std::size_t half = g.size() / 2;
  std::vector<double> shell(half + 1, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const std::size_t bin =
        static_cast<std::size_t>(std::lround(std::abs(k[j]) / k[1]));
    const double m = std::norm(hat[j]);
    shell[std::min(bin, half)] += m;
    total += m;
  }
  double acc = 0.0;
  for (std::size_t b = 0; b <= half; ++b) {
    acc += shell[b];
    if (acc >= quantile * total) return static_cast<double>(b) * k[1];
  }
  return k[half];
}

bool domain_guard_ok(const WaveFunction& psi0, double horizon_time) {
  const double v_max = 2.0 * momentum_quantile(psi0, 0.999);
  return psi0.grid->length() >= 2.0 * v_max * std::abs(horizon_time);
}

Propagator::Propagator(std::shared_ptr<const Grid> grid, ModelParams model,
                       EvolutionMode mode, double dt,
                       const EvolutionConfig* absorber_cfg)
    : grid_(std::move(grid)),
      model_(model),
      mode_(mode),
      dt_(dt),
      ws_(grid_->size(), grid_->length()) {
  if (dt == 0.0) throw std::invalid_argument("Propagator: dt must be nonzero");
  // lambda = 0 is admitted here: the linear degenerations of the
  // scattering constructions run through the nonlinear code path.
  if (mode == EvolutionMode::nonlinear &&
      (!(model_.p > 1.0) || !(model_.lambda >= 0.0)))
    throw std::invalid_argument("Propagator: need p > 1 and lambda >= 0");

  const auto k = ws_.wavenumbers();
  kinetic_half_.resize(grid_->size());
  kinetic_full_.resize(grid_->size());
  for (std::size_t j = 0; j < grid_->size(); ++j) {
    const double w = k[j] * k[j];
    kinetic_half_[j] = std::polar(1.0, -0.5 * w * dt_);
    kinetic_full_[j] = std::polar(1.0, -w * dt_);
  }

  if (mode_ == EvolutionMode::nonlinear) {
    r_pow_.resize(grid_->size());
    const auto r = grid_->r();
    for (std::size_t i = 0; i < grid_->size(); ++i)
      r_pow_[i] = std::pow(r[i], 1.0 - model_.p);
  }

  if (absorber_cfg != nullptr && absorber_cfg->absorbing_layer) {
    absorber_.resize(grid_->size(), 0.0);
    const double w = absorber_cfg->absorber_width_fraction * grid_->length();
    const double eta = absorber_cfg->absorber_strength;
    const auto rs = grid_->r_star();
    for (std::size_t i = 0; i < grid_->size(); ++i) {
      const double d_lo = rs[i] - grid_->r_star_min();
      const double d_hi = grid_->r_star_max() - rs[i];
      const double d = std::min(d_lo, d_hi);
      if (d < w) {
        const double s = 1.0 - d / w;
        absorber_[i] = eta * s * s * s;  // C2 ramp
      }
    }
  }
}

void Propagator::kinetic(WaveFunction& psi, const std::vector<Complex>& phase) const {
  ws_.apply_multiplier(psi.values, phase);
}

void Propagator::interaction(WaveFunction& psi) const {
  if (mode_ == EvolutionMode::free_particle && absorber_.empty()) return;
  const auto V = grid_->V();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    double phase = 0.0;
    if (mode_ != EvolutionMode::free_particle) phase += V[i];
    if (mode_ == EvolutionMode::nonlinear) {
      phase += model_.lambda * r_pow_[i] *
               std::pow(std::abs(psi.values[i]), model_.p - 1.0);
    }
    Complex factor = std::polar(1.0, -phase * dt_);
    if (!absorber_.empty()) factor *= std::exp(-absorber_[i] * std::abs(dt_));
    psi.values[i] *= factor;
  }
}

void Propagator::step(WaveFunction& psi) const { step_block(psi, 1); }

void Propagator::step_block(WaveFunction& psi, std::size_t count) const {
  if (count == 0) return;
  if (psi.grid.get() != grid_.get() && psi.grid->size() != grid_->size())
    throw std::invalid_argument("Propagator: grid mismatch");
  kinetic(psi, kinetic_half_);
  interaction(psi);
  for (std::size_t s = 1; s < count; ++s) {
    kinetic(psi, kinetic_full_);
    interaction(psi);
  }
  kinetic(psi, kinetic_half_);
  psi.time += dt_ * static_cast<double>(count);
}

WaveFunction evolve(WaveFunction psi0, const ModelParams& model,
                    const EvolutionConfig& cfg, const Observer& observer) {
  const double span = cfg.t_end - psi0.time;
  if (span * cfg.dt < 0.0)
    throw std::invalid_argument("evolve: dt sign does not reach t_end");
  const auto n_steps =
      static_cast<std::size_t>(std::llround(span / cfg.dt));
  Propagator prop(psi0.grid, model, cfg.mode, cfg.dt, &cfg);

  const auto check_finite = [](const WaveFunction& psi) {
    const double norm = l2_norm(psi);
    if (!std::isfinite(norm))
      throw std::runtime_error("evolve: state became non-finite");
  };

  std::size_t done = 0;
  if (observer) observer(psi0, 0);
  while (done < n_steps) {
    const std::size_t block =
        std::min<std::size_t>(cfg.record_every > 0 ? cfg.record_every : n_steps,
                              n_steps - done);
    prop.step_block(psi0, block);
    done += block;
    check_finite(psi0);
    if (observer) observer(psi0, done);
  }
  return psi0;
}

WaveFunction propagator_oracle(const WaveFunction& psi0, double t,
                               EvolutionMode mode) {
  if (mode == EvolutionMode::nonlinear)
    throw std::invalid_argument("propagator_oracle: linear modes only");
  const Grid& g = *psi0.grid;
  const std::size_t n = g.size();
  if (n > 1024)
    throw std::invalid_argument("propagator_oracle: dense path guarded to n <= 1024");

  // Spectral second-derivative matrix, one column per unit vector.
  SpectralWorkspace ws(n, g.length());
  const auto k = ws.wavenumbers();
  std::vector<Complex> mult(n);
  for (std::size_t j = 0; j < n; ++j) mult[j] = k[j] * k[j];

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  std::vector<Complex> col(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(col.begin(), col.end(), Complex(0.0, 0.0));
    col[c] = 1.0;
    ws.apply_multiplier(col, mult);
    for (std::size_t r = 0; r < n; ++r)
      H(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r].real();
  }
  H = 0.5 * (H + H.transpose()).eval();
  if (mode == EvolutionMode::linear_with_V) {
    const auto V = g.V();
    for (std::size_t i = 0; i < n; ++i)
      H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += V[i];
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("propagator_oracle: eigendecomposition failed");

  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = psi0.values[i];
  const Eigen::VectorXcd modal = es.eigenvectors().transpose() * v;
  Eigen::VectorXcd evolved(modal.size());
  for (Eigen::Index j = 0; j < modal.size(); ++j)
    evolved(j) = modal(j) * std::polar(1.0, -es.eigenvalues()(j) * t);
  const Eigen::VectorXcd out = es.eigenvectors() * evolved;

  WaveFunction result = psi0;
  for (std::size_t i = 0; i < n; ++i) result.values[i] = out(static_cast<Eigen::Index>(i));
  result.time = psi0.time + t;
  return result;
}

}  // namespace tnls
