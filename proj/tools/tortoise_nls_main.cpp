#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tnls/config.hpp"
#include "tnls/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the radial nonlinear Schrodinger "
               "equation outside a Schwarzschild black hole"};
  app.require_subcommand(1);

  std::string run_config, validate_config;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("config", run_config, "Path to the key = value config file")
      ->required();
  auto* validate =
      app.add_subcommand("validate", "Parse a config and check run guards only");
  validate->add_option("config", validate_config, "Path to the config file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      tnls::ExperimentConfig cfg;
      try {
        cfg = tnls::load_experiment_config(run_config);
        if (!tnls::experiment_known(cfg.experiment)) {
          std::cerr << "config error: unknown experiment '" << cfg.experiment
                    << "'\n";
          return 2;
        }
      } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
      }
      std::clog << "threads: " << tnls::resolve_thread_count() << "\n";
      const auto outcome = tnls::run_experiment(cfg);
      for (const auto& c : outcome.checks) {
        std::cout << c.name << ": measured=" << c.measured << " band=" << c.band
                  << " " << (c.pass ? "PASS" : "FAIL") << "\n";
      }
      for (const auto& a : outcome.artifacts) std::clog << "wrote " << a << "\n";
      return outcome.exit_code;
    }
    tnls::ExperimentConfig cfg;
    try {
      cfg = tnls::load_experiment_config(validate_config);
    } catch (const std::invalid_argument& err) {
      std::cerr << "config error: " << err.what() << "\n";
      return 2;
    }
    return tnls::validate_experiment(cfg, std::cout);
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
}
