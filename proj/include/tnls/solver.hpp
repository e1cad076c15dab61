#pragma once

#include <functional>
#include <memory>

#include "tnls/spectral.hpp"
#include "tnls/state.hpp"

namespace tnls {

enum class EvolutionMode {
  nonlinear,      // full reduced dynamics D^2 + V + lambda r^{1-p}|psi|^{p-1}
  linear_with_V,  // D^2 + V
  free_particle   // D^2
};

struct EvolutionConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  EvolutionMode mode = EvolutionMode::nonlinear;
  std::size_t record_every = 100;
  // Smooth complex absorbing layer at the grid edges; breaks L2
  // conservation deliberately and is flagged in every output record.
  bool absorbing_layer = false;
  double absorber_strength = 1.0;
  double absorber_width_fraction = 0.1;

  /// Kinetic phase advance per step at the Nyquist mode; the scheme is
  /// unitary at any dt, but phases past pi wrap and degrade accuracy.
  double nyquist_phase(const Grid& grid) const;
  bool phase_wrap_ok(const Grid& grid) const;
};

/// dt with Nyquist kinetic phase per step equal to pi/4.
double default_dt(const Grid& grid);

/// Smallest K with the spectral mass of {|k| <= K} at least the given
/// quantile of the total.
double momentum_quantile(const WaveFunction& psi, double quantile);

/// Run-length guard for the periodic truncation of the line problem:
/// requires length >= 2 * v_max * horizon_time with v_max twice the
/// 0.999 momentum quantile of the initial data.
bool domain_guard_ok(const WaveFunction& psi0, double horizon_time);

/// Strang splitting stepper: exact kinetic half-steps in Fourier space
/// around an exact pointwise phase rotation by the potential and the
/// nonlinearity. Unitary in every mode; unconditionally stable.
class Propagator {
 public:
  Propagator(std::shared_ptr<const Grid> grid, ModelParams model,
             EvolutionMode mode, double dt,
             const EvolutionConfig* absorber_cfg = nullptr);

  double dt() const { return dt_; }
  EvolutionMode mode() const { return mode_; }

  void step(WaveFunction& psi) const;
  /// Equivalent to count plain steps, with interior kinetic half-steps
  /// fused into full steps.
  void step_block(WaveFunction& psi, std::size_t count) const;

 private:
  void kinetic(WaveFunction& psi, const std::vector<Complex>& phase) const;
  void interaction(WaveFunction& psi) const;

  std::shared_ptr<const Grid> grid_;
  ModelParams model_;
  EvolutionMode mode_;
  double dt_;
  mutable SpectralWorkspace ws_;
  std::vector<Complex> kinetic_half_, kinetic_full_;
  std::vector<double> r_pow_;      // r^{1-p}
  std::vector<double> absorber_;   // damping rate per unit time, or empty
};

using Observer = std::function<void(const WaveFunction&, std::size_t step)>;

/// Repeated stepping from psi0.time to cfg.t_end (cfg.dt may be negative
/// for backward runs). The observer fires at step 0, every
/// cfg.record_every steps, and at the final step. Aborts if the state
/// goes non-finite.
WaveFunction evolve(WaveFunction psi0, const ModelParams& model,
                    const EvolutionConfig& cfg, const Observer& observer = {});

/// Dense comparison propagator for the linear modes: diagonalizes the
/// discretized generator (spectral differentiation matrix plus diagonal
/// potential) and applies exp(-it H) exactly. Validation only; guarded
/// to n <= 1024.
WaveFunction propagator_oracle(const WaveFunction& psi0, double t,
                               EvolutionMode mode);

}  // namespace tnls
