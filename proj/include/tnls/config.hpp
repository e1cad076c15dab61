#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tnls/diagnostics.hpp"
#include "tnls/state.hpp"

namespace tnls {

/// Parsed flat "key = value" file. Keys are dotted paths; '#' starts a
/// comment; blank lines are skipped. Duplicate keys are an error.
using KeyValueMap = std::map<std::string, std::string>;

KeyValueMap parse_key_values(std::istream& is);
KeyValueMap parse_key_values_file(const std::string& path);

/// Initial data selection: an analytic Gaussian packet or a wave
/// function loaded from a file.
struct InitialDataConfig {
  std::string type = "gaussian";  // "gaussian" or "file"
  double center = 0.0;
  double width = 2.0;
  double momentum = 0.0;
  double amplitude = 1.0;
  std::string path;  // used when type == "file"
};

/// One experiment run, fully determined by the config file.
struct ExperimentConfig {
  std::string experiment;  // which study to run, see experiments.hpp
  double mass = 1.0;       // black hole mass M

  ModelParams model;

  std::size_t grid_n = 2048;
  double r_star_min = -60.0;
  double r_star_max = 200.0;

  double dt = 0.0;  // 0 means the Nyquist default for the grid
  double t_end = 50.0;
  std::size_t record_every = 0;  // 0 means a sensible per-experiment default

  WeightConfig weight;

  InitialDataConfig initial_data;

  std::string output_dir = ".";
  unsigned seed = 0;
  bool override_domain_guard = false;

  void validate() const;  // throws std::invalid_argument with the offending key
};

/// Builds an ExperimentConfig from a parsed map. Unknown keys are an
/// error; missing keys keep their defaults except "experiment", which is
/// required.
ExperimentConfig make_experiment_config(const KeyValueMap& kv);
ExperimentConfig load_experiment_config(const std::string& path);

/// The config rendered back as "key = value" lines, suitable for echoing
/// into output headers.
std::vector<std::string> render_config(const ExperimentConfig& cfg);

/// Worker count resolution: the TORTOISE_NLS_THREADS environment
/// variable when set and positive, otherwise hardware concurrency.
unsigned resolve_thread_count();

}  // namespace tnls
