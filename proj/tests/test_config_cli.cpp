#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tnls/config.hpp"
#include "tnls/experiments.hpp"

using namespace tnls;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tnls_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("key value parser: comments, whitespace, errors") {
  std::istringstream is(
      "# leading comment\n"
      "experiment = conservation\n"
      "  grid.n =  512   # trailing comment\n"
      "\n"
      "lambda=2.5\n");
  const auto kv = parse_key_values(is);
  CHECK(kv.at("experiment") == "conservation");
  CHECK(kv.at("grid.n") == "512");
  CHECK(kv.at("lambda") == "2.5");

  std::istringstream dup("a = 1\na = 2\n");
  CHECK_THROWS_AS(parse_key_values(dup), std::invalid_argument);
  std::istringstream noeq("just some words\n");
  CHECK_THROWS_AS(parse_key_values(noeq), std::invalid_argument);
  std::istringstream nokey("= 3\n");
  CHECK_THROWS_AS(parse_key_values(nokey), std::invalid_argument);
}

TEST_CASE("experiment config: defaults, typed keys, validation") {
  KeyValueMap kv = {{"experiment", "conservation"}};
  auto cfg = make_experiment_config(kv);
  CHECK(cfg.mass == 1.0);
  CHECK(cfg.model.p == 5.0);
  CHECK(cfg.grid_n == 2048);
  CHECK(cfg.weight.sigma == 1.0);

  kv["p"] = "4.5";
  kv["grid.n"] = "1024";
  kv["override_domain_guard"] = "true";
  cfg = make_experiment_config(kv);
  CHECK(cfg.model.p == 4.5);
  CHECK(cfg.grid_n == 1024);
  CHECK(cfg.override_domain_guard);

  SUBCASE("unknown key") {
    kv["grid.m"] = "7";
    CHECK_THROWS_AS(make_experiment_config(kv), std::invalid_argument);
  }
  SUBCASE("non-numeric value") {
    kv["lambda"] = "three";
    CHECK_THROWS_AS(make_experiment_config(kv), std::invalid_argument);
  }
  SUBCASE("grid size not a power of two") {
    kv["grid.n"] = "1000";
    CHECK_THROWS_AS(make_experiment_config(kv), std::invalid_argument);
  }
  SUBCASE("sigma out of range") {
    kv["sigma"] = "1.8";
    CHECK_THROWS_AS(make_experiment_config(kv), std::invalid_argument);
  }
  SUBCASE("missing experiment") {
    kv.erase("experiment");
    CHECK_THROWS_AS(make_experiment_config(kv), std::invalid_argument);
  }
  SUBCASE("file initial data needs a path") {
    kv["initial_data.type"] = "file";
    CHECK_THROWS_AS(make_experiment_config(kv), std::invalid_argument);
  }
}

TEST_CASE("rendered config re-parses to the same values") {
  KeyValueMap kv = {{"experiment", "monotonicity"},
                    {"lambda", "0.25"},
                    {"p", "4.75"},
                    {"grid.n", "512"},
                    {"initial_data.center", "12.5"},
                    {"seed", "42"}};
  const auto cfg = make_experiment_config(kv);
  std::string joined;
  for (const auto& line : render_config(cfg)) joined += line + "\n";
  std::istringstream is(joined);
  const auto cfg2 = make_experiment_config(parse_key_values(is));
  CHECK(cfg2.experiment == cfg.experiment);
  CHECK(cfg2.model.lambda == cfg.model.lambda);
  CHECK(cfg2.model.p == cfg.model.p);
  CHECK(cfg2.grid_n == cfg.grid_n);
  CHECK(cfg2.initial_data.center == cfg.initial_data.center);
  CHECK(cfg2.seed == cfg.seed);
}

TEST_CASE("thread count resolution honors the environment variable") {
  setenv("TORTOISE_NLS_THREADS", "3", 1);
  CHECK(resolve_thread_count() == 3);
  setenv("TORTOISE_NLS_THREADS", "not-a-number", 1);
  CHECK(resolve_thread_count() >= 1);
  setenv("TORTOISE_NLS_THREADS", "-2", 1);
  CHECK(resolve_thread_count() >= 1);
  unsetenv("TORTOISE_NLS_THREADS");
  CHECK(resolve_thread_count() >= 1);
}

TEST_CASE("conservation with zero data passes trivially") {
  const auto dir = temp_dir("zero");
  ExperimentConfig cfg;
  cfg.experiment = "conservation";
  cfg.grid_n = 256;
  cfg.r_star_min = -30.0;
  cfg.r_star_max = 34.0;
  cfg.t_end = 1.0;
  cfg.initial_data.amplitude = 0.0;
  cfg.output_dir = dir.string();
  const auto outcome = run_experiment(cfg);
  CHECK(outcome.exit_code == 0);
  for (const auto& c : outcome.checks) {
    CHECK(c.pass);
    CHECK(c.measured == 0.0);
  }
  CHECK(fs::exists(dir / "summary.txt"));
  CHECK(fs::exists(dir / "diagnostics.csv"));
}

TEST_CASE("identity suite aggregates the module-level residuals") {
  const auto dir = temp_dir("identity");
  ExperimentConfig cfg;
  cfg.experiment = "identity-suite";
  cfg.grid_n = 512;
  cfg.r_star_min = -60.0;
  cfg.r_star_max = 68.0;
  cfg.initial_data.center = 8.0;
  cfg.initial_data.width = 4.0;
  cfg.initial_data.momentum = 0.4;
  cfg.output_dir = dir.string();
  const auto outcome = run_experiment(cfg);
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.checks.size() == 5);
  for (const auto& c : outcome.checks) CHECK(c.pass);
}

TEST_CASE("summary and csv embed the resolved config") {
  const auto dir = temp_dir("echo");
  ExperimentConfig cfg;
  cfg.experiment = "conservation";
  cfg.grid_n = 256;
  cfg.r_star_min = -30.0;
  cfg.r_star_max = 34.0;
  cfg.t_end = 1.0;
  cfg.initial_data.center = 5.0;
  cfg.output_dir = dir.string();
  run_experiment(cfg);
  for (const auto* name : {"summary.txt", "diagnostics.csv"}) {
    std::ifstream is(dir / name);
    std::string text((std::istreambuf_iterator<char>(is)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("# experiment = conservation") != std::string::npos);
    CHECK(text.find("# grid.n = 256") != std::string::npos);
    CHECK(text.find("# regime.completeness = true") != std::string::npos);
  }
}

TEST_CASE("reruns reproduce the csv byte for byte") {
  const auto dir1 = temp_dir("rerun1");
  const auto dir2 = temp_dir("rerun2");
  ExperimentConfig cfg;
  cfg.experiment = "conservation";
  cfg.grid_n = 256;
  cfg.r_star_min = -30.0;
  cfg.r_star_max = 34.0;
  cfg.t_end = 1.0;
  cfg.initial_data.center = 5.0;
  cfg.output_dir = dir1.string();
  run_experiment(cfg);
  cfg.output_dir = dir2.string();
  run_experiment(cfg);
  const auto slurp = [](const fs::path& p) {
    std::ifstream is(p);
    return std::string((std::istreambuf_iterator<char>(is)),
                       std::istreambuf_iterator<char>());
  };
  // output_dir differs in the echoed header; compare data rows only.
  const auto rows = [&](const fs::path& p) {
    std::istringstream is(slurp(p));
    std::string line, out;
    while (std::getline(is, line))
      if (line.rfind("# output_dir", 0) != 0) out += line + "\n";
    return out;
  };
  CHECK(rows(dir1 / "diagnostics.csv") == rows(dir2 / "diagnostics.csv"));
}

TEST_CASE("domain guard trips the numerical-guard exit code") {
  const auto dir = temp_dir("guard");
  ExperimentConfig cfg;
  cfg.experiment = "conservation";
  cfg.grid_n = 256;
  cfg.r_star_min = -30.0;
  cfg.r_star_max = 34.0;
  cfg.t_end = 500.0;  // far beyond what the grid can hold
  cfg.initial_data.momentum = 1.0;
  cfg.output_dir = dir.string();
  const auto outcome = run_experiment(cfg);
  CHECK(outcome.exit_code == 3);

  std::ostringstream report;
  CHECK(validate_experiment(cfg, report) == 3);
  CHECK(report.str().find("domain_guard: FAIL") != std::string::npos);

  cfg.override_domain_guard = true;
  CHECK(validate_experiment(cfg, report) == 0);
}

TEST_CASE("validate reports grid and step facts") {
  ExperimentConfig cfg;
  cfg.experiment = "identity-suite";
  cfg.grid_n = 256;
  cfg.r_star_min = -30.0;
  cfg.r_star_max = 34.0;
  cfg.t_end = 1.0;
  std::ostringstream report;
  CHECK(validate_experiment(cfg, report) == 0);
  CHECK(report.str().find("grid: n=256") != std::string::npos);
  CHECK(report.str().find("validate: ok") != std::string::npos);

  cfg.experiment = "no-such-thing";
  std::ostringstream bad;
  CHECK(validate_experiment(cfg, bad) == 2);
}

TEST_CASE("unknown experiment is a config error") {
  CHECK_FALSE(experiment_known("frobnicate"));
  CHECK(experiment_known("wave-operator"));
  ExperimentConfig cfg;
  cfg.experiment = "frobnicate";
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("initial data can come from a wavefunction file") {
  const auto dir = temp_dir("fromfile");
  // First run writes psi_plus.txt; reuse it as initial data.
  ExperimentConfig cfg;
  cfg.experiment = "conservation";
  cfg.grid_n = 512;
  cfg.r_star_min = -100.0;
  cfg.r_star_max = 156.0;
  cfg.t_end = 1.0;
  cfg.initial_data.center = 5.0;
  cfg.output_dir = dir.string();
  run_experiment(cfg);

  const auto grid = std::make_shared<Grid>(cfg.grid_n, cfg.r_star_min,
                                           cfg.r_star_max,
                                           SchwarzschildParams{1.0});
  const auto psi = gaussian_packet(grid, 5.0, 2.0, 0.0, 1.0);
  const auto path = (dir / "seed.txt").string();
  save_wavefunction(path, psi);

  cfg.initial_data.type = "file";
  cfg.initial_data.path = path;
  const auto outcome = run_experiment(cfg);
  CHECK(outcome.exit_code == 0);
}
