#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tnls/config.hpp"

namespace tnls {

/// One checked invariant of an experiment run.
struct CheckResult {
  std::string name;
  double measured = 0.0;
  std::string band;  // human-readable acceptance band
  bool pass = false;
};

struct ExperimentOutcome {
  int exit_code = 0;  // 0 pass, 1 acceptance failure, 3 numerical guard
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;  // paths written under output_dir
};

/// Known experiment names: conservation, monotonicity, local-decay,
/// pseudoconformal, linf-decay, dispersive, completeness, wave-operator,
/// identity-suite.
bool experiment_known(const std::string& name);

/// Runs the named experiment, writing diagnostics CSV, result files and
/// summary.txt under cfg.output_dir. Deterministic given cfg. Throws
/// std::invalid_argument for config-level problems (exit code 2 at the
/// CLI); numerical guards are reported through the exit code.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

/// Parse plus guard checks only: builds the grid and initial data,
/// checks the run-length guard and phase resolution, writes a short
/// report. Returns the would-be exit code without running anything.
int validate_experiment(const ExperimentConfig& cfg, std::ostream& report);

}  // namespace tnls
