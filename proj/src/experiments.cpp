#include "tnls/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tnls/scattering.hpp"

namespace tnls {

namespace {

namespace fs = std::filesystem;

const std::set<std::string> kExperiments = {
    "conservation", "monotonicity", "local-decay",
    "pseudoconformal", "linf-decay", "dispersive",
    "completeness", "wave-operator", "identity-suite"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::shared_ptr<const Grid> build_grid(const ExperimentConfig& cfg) {
  return std::make_shared<Grid>(cfg.grid_n, cfg.r_star_min, cfg.r_star_max,
                                SchwarzschildParams{cfg.mass});
}

WaveFunction build_initial(const ExperimentConfig& cfg,
                           const std::shared_ptr<const Grid>& grid) {
  if (cfg.initial_data.type == "file") {
    WaveFunction psi = load_wavefunction(cfg.initial_data.path);
    if (psi.size() != grid->size())
      throw std::invalid_argument(
          "initial_data.path: stored grid size does not match grid.n");
    return psi;
  }
  return gaussian_packet(grid, cfg.initial_data.center, cfg.initial_data.width,
                         cfg.initial_data.momentum, cfg.initial_data.amplitude);
}

double effective_dt(const ExperimentConfig& cfg, const Grid& grid) {
  return cfg.dt > 0.0 ? cfg.dt : default_dt(grid);
}

std::vector<std::string> config_comments(const ExperimentConfig& cfg) {
  auto lines = render_config(cfg);
  lines.push_back("regime.pseudoconformal = " +
                  std::string(cfg.model.pseudoconformal_valid() ? "true" : "false"));
  lines.push_back("regime.wave_operator = " +
                  std::string(cfg.model.wave_op_valid() ? "true" : "false"));
  lines.push_back("regime.completeness = " +
                  std::string(cfg.model.completeness_valid() ? "true" : "false"));
  return lines;
}

void write_commented_file(const std::string& path,
                          const std::vector<std::string>& comments,
                          const std::string& body) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  for (const auto& line : comments) os << "# " << line << "\n";
  os << body;
}

struct RunContext {
  std::shared_ptr<const Grid> grid;
  WaveFunction psi0;
  double dt = 0.0;
  std::size_t record_every = 0;
  std::vector<std::string> comments;
};

RunContext make_context(const ExperimentConfig& cfg, double horizon_time) {
  RunContext ctx;
  ctx.grid = build_grid(cfg);
  ctx.psi0 = build_initial(cfg, ctx.grid);
  ctx.dt = effective_dt(cfg, *ctx.grid);
  ctx.comments = config_comments(cfg);
  const auto n_steps = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(horizon_time / ctx.dt)));
  ctx.record_every =
      cfg.record_every > 0 ? cfg.record_every : std::max<std::size_t>(1, n_steps / 200);
  if (!cfg.override_domain_guard && !domain_guard_ok(ctx.psi0, horizon_time)) {
    throw std::runtime_error(
        "domain guard: grid length below 2 v_max T for this run; widen the "
        "grid or set override_domain_guard = true");
  }
  return ctx;
}

/// Nonlinear evolution with full diagnostics at every record point.
std::vector<DiagnosticsRecord> run_with_diagnostics(
    const ExperimentConfig& cfg, const RunContext& ctx,
    LocalDecayAccumulator* accum = nullptr,
    std::vector<std::pair<double, double>>* half_way_probe = nullptr) {
  GammaWeight gamma_weight(*ctx.grid, cfg.weight.sigma);
  std::vector<DiagnosticsRecord> records;
  EvolutionConfig ecfg;
  ecfg.dt = ctx.dt;
  ecfg.t_end = cfg.t_end;
  ecfg.mode = EvolutionMode::nonlinear;
  ecfg.record_every = ctx.record_every;
  evolve(ctx.psi0, cfg.model, ecfg, [&](const WaveFunction& psi, std::size_t) {
    records.push_back(compute_record(psi, cfg.model, cfg.weight, gamma_weight));
    if (accum) {
      accum->add(psi);
      if (half_way_probe && psi.time >= 0.5 * cfg.t_end && half_way_probe->empty())
        half_way_probe->emplace_back(psi.time, accum->weighted_integral());
    }
  });
  return records;
}

void save_diagnostics(const std::string& path,
                      const std::vector<DiagnosticsRecord>& records,
                      const std::vector<std::string>& comments,
                      ExperimentOutcome& out) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_csv(os, records, comments);
  out.artifacts.push_back(path);
}

void add_check(ExperimentOutcome& out, const std::string& name, double measured,
               const std::string& band, bool pass) {
  out.checks.push_back({name, measured, band, pass});
}

std::vector<std::pair<double, double>> column(
    const std::vector<DiagnosticsRecord>& records,
    double DiagnosticsRecord::*field) {
  std::vector<std::pair<double, double>> out;
  out.reserve(records.size());
  for (const auto& r : records) out.emplace_back(r.time, r.*field);
  return out;
}

// -------- individual experiments --------

void run_conservation(const ExperimentConfig& cfg, const RunContext& ctx,
                      ExperimentOutcome& out, const std::string& dir) {
  auto records = run_with_diagnostics(cfg, ctx);
  save_diagnostics(dir + "/diagnostics.csv", records, ctx.comments, out);
  const double l2_0 = records.front().l2;
  double worst = 0.0;
  for (const auto& r : records)
    worst = std::max(worst, std::abs(r.l2 - l2_0));
  const double rel = l2_0 > 0.0 ? worst / l2_0 : worst;
  add_check(out, "l2_relative_drift", rel, "< 1e-9", rel < 1e-9);
  const double e_0 = records.front().e_kin + records.front().e_pot +
                     records.front().e_nl;
  double e_worst = 0.0;
  for (const auto& r : records)
    e_worst = std::max(e_worst, std::abs(r.e_kin + r.e_pot + r.e_nl - e_0));
  add_check(out, "energy_absolute_drift", e_worst, "< 1e-5", e_worst < 1e-5);
}

void run_monotonicity(const ExperimentConfig& cfg, const RunContext& ctx,
                      ExperimentOutcome& out, const std::string& dir) {
  auto records = run_with_diagnostics(cfg, ctx);
  save_diagnostics(dir + "/diagnostics.csv", records, ctx.comments, out);

  const auto dil = check_nondecreasing(column(records, &DiagnosticsRecord::dilation));
  add_check(out, "dilation_nondecreasing", dil.worst_defect,
            ">= -" + fmt(dil.tolerance), dil.ok);
  const auto gam = check_nondecreasing(column(records, &DiagnosticsRecord::gamma_obs));
  add_check(out, "gamma_nondecreasing", gam.worst_defect,
            ">= -" + fmt(gam.tolerance), gam.ok);

  // Pointwise sign conditions behind the monotonicity: -(r_* - alpha) V'
  // and the derivative of r^2 (r_* - alpha) are nonnegative everywhere.
  const double alpha = ctx.grid->params().alpha();
  const auto rs = ctx.grid->r_star();
  const auto r = ctx.grid->r();
  const auto x = ctx.grid->r_offset();
  const auto dV = ctx.grid->dV();
  double min_virial = std::numeric_limits<double>::infinity();
  double min_weight = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ctx.grid->size(); ++i) {
    min_virial = std::min(min_virial, -(rs[i] - alpha) * dV[i]);
    min_weight = std::min(min_weight, r[i] * r[i] + 2.0 * (rs[i] - alpha) * x[i]);
  }
  add_check(out, "virial_sign_min", min_virial, ">= -1e-14", min_virial >= -1e-14);
  add_check(out, "radial_weight_derivative_min", min_weight, ">= 0",
            min_weight >= 0.0);
}

void run_local_decay(const ExperimentConfig& cfg, const RunContext& ctx,
                     ExperimentOutcome& out, const std::string& dir) {
  LocalDecayAccumulator accum(cfg.weight, cfg.model);
  std::vector<std::pair<double, double>> half_probe;
  auto records = run_with_diagnostics(cfg, ctx, &accum, &half_probe);
  save_diagnostics(dir + "/diagnostics.csv", records, ctx.comments, out);

  const double full = accum.weighted_integral();
  add_check(out, "weighted_time_integral", full,
            "<= " + fmt(accum.bound_proxy()), full <= accum.bound_proxy());
  if (!half_probe.empty()) {
    const double half = half_probe.front().second;
    const double change = full > 0.0 ? (full - half) / full : 0.0;
    add_check(out, "integral_tail_fraction", change, "< 0.10 on doubling T",
              change < 0.10);
  }
}

void run_pseudoconformal(const ExperimentConfig& cfg, const RunContext& ctx,
                         ExperimentOutcome& out, const std::string& dir) {
  if (!cfg.model.pseudoconformal_valid())
    throw std::invalid_argument("pseudoconformal experiment requires p > 3");
  if (cfg.t_end <= 2.0)
    throw std::invalid_argument("pseudoconformal experiment requires t_end > 2");
  auto records = run_with_diagnostics(cfg, ctx);
  save_diagnostics(dir + "/diagnostics.csv", records, ctx.comments, out);

  auto series = column(records, &DiagnosticsRecord::pseudoconformal);
  series.erase(std::remove_if(series.begin(), series.end(),
                              [](const auto& s) {
                                return !(s.first >= 1.0) ||
                                       !std::isfinite(s.second) ||
                                       !(s.second > 0.0);
                              }),
               series.end());
  const auto fit = decay_slope_fit(series, 1.0, cfg.t_end);
  add_check(out, "pseudoconformal_slope", fit.slope, "[-1.2, -0.8]",
            fit.slope >= -1.2 && fit.slope <= -0.8);
}

void run_linf_decay(const ExperimentConfig& cfg, const RunContext& ctx,
                    ExperimentOutcome& out, const std::string& dir) {
  const double t0 = 10.0, t1 = std::min(80.0, cfg.t_end);
  if (cfg.t_end <= 2.0 * t0)
    throw std::invalid_argument("linf-decay experiment requires t_end > 20");
  auto records = run_with_diagnostics(cfg, ctx);
  save_diagnostics(dir + "/diagnostics.csv", records, ctx.comments, out);

  const auto series = column(records, &DiagnosticsRecord::linf);
  const auto fit = decay_slope_fit(series, t0, t1);
  add_check(out, "linf_slope", fit.slope, "[-0.35, -0.15]",
            fit.slope >= -0.35 && fit.slope <= -0.15);
}

void run_dispersive(const ExperimentConfig& cfg, const RunContext& ctx,
                    ExperimentOutcome& out, const std::string& dir) {
  const double q = cfg.model.p + 1.0;
  std::vector<double> samples;
  const std::size_t n_samples = 16;
  for (std::size_t j = 0; j < n_samples; ++j)
    samples.push_back(std::pow(cfg.t_end, static_cast<double>(j) /
                                              static_cast<double>(n_samples - 1)));
  const auto ratios = dispersive_ratio(ctx.psi0, q, samples,
                                       EvolutionMode::linear_with_V, ctx.dt);

  std::ostringstream body;
  body.precision(17);
  body << "t,ratio\n";
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& [t, v] : ratios) {
    body << t << "," << v << "\n";
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  write_commented_file(dir + "/dispersive.csv", ctx.comments, body.str());
  out.artifacts.push_back(dir + "/dispersive.csv");
  const double spread = hi / lo;
  add_check(out, "dispersive_ratio_spread", spread, "< 3", spread < 3.0);
}

void save_scattering(const std::string& dir, const std::string& stem,
                     const ScatteringResult& result,
                     const std::vector<std::string>& comments,
                     ExperimentOutcome& out) {
  save_wavefunction(dir + "/" + stem + ".txt", result.psi_plus);
  out.artifacts.push_back(dir + "/" + stem + ".txt");
  std::ostringstream body;
  body.precision(17);
  body << "T,residual\n";
  for (const auto& [T, r] : result.residual_history) body << T << "," << r << "\n";
  write_commented_file(dir + "/" + stem + "_residuals.csv", comments, body.str());
  out.artifacts.push_back(dir + "/" + stem + "_residuals.csv");
}

void run_completeness(const ExperimentConfig& cfg, const RunContext& ctx,
                      ExperimentOutcome& out, const std::string& dir) {
  const std::vector<double> schedule = {cfg.t_end / 8.0, cfg.t_end / 4.0,
                                        cfg.t_end / 2.0, cfg.t_end};
  auto result = extract_asymptotic_state(ctx.psi0, cfg.model, schedule, ctx.dt);
  save_scattering(dir, "psi_plus", result, ctx.comments, out);

  const auto& hist = result.residual_history;
  double worst_ratio = 0.0;
  for (std::size_t i = 1; i < hist.size(); ++i)
    worst_ratio = std::max(worst_ratio,
                           hist[i].second / std::max(hist[i - 1].second, 1e-300));
  add_check(out, "cauchy_residual_ratio", worst_ratio, "< 0.75",
            worst_ratio < 0.75 && hist.size() >= 2);
}

void run_wave_operator(const ExperimentConfig& cfg, const RunContext& ctx,
                       ExperimentOutcome& out, const std::string& dir) {
  WaveOperatorOptions opts;
  opts.T = cfg.t_end;
  opts.T_max = 4.0 * cfg.t_end;
  auto result = construct_wave_operator(ctx.psi0, cfg.model, opts, ctx.dt);
  save_wavefunction(dir + "/psi0.txt", result.psi0);
  out.artifacts.push_back(dir + "/psi0.txt");

  std::ostringstream body;
  body.precision(17);
  body << "iteration,delta\n";
  for (std::size_t i = 0; i < result.iterate_deltas.size(); ++i)
    body << i + 1 << "," << result.iterate_deltas[i] << "\n";
  write_commented_file(dir + "/iteration.csv", ctx.comments, body.str());
  out.artifacts.push_back(dir + "/iteration.csv");

  // Round trip: evolve the matched initial data forward with the full
  // dynamics, pull back linearly, compare to the prescribed asymptote.
  WaveFunction fwd = result.psi0;
  {
    EvolutionConfig ecfg;
    ecfg.dt = ctx.dt;
    ecfg.t_end = opts.T;
    ecfg.mode = EvolutionMode::nonlinear;
    ecfg.record_every = 0;
    fwd = evolve(fwd, cfg.model, ecfg);
    ecfg.dt = -ctx.dt;
    ecfg.t_end = 0.0;
    ecfg.mode = EvolutionMode::linear_with_V;
    fwd = evolve(fwd, cfg.model, ecfg);
  }
  double diff2 = 0.0;
  for (std::size_t i = 0; i < fwd.size(); ++i)
    diff2 += std::norm(fwd.values[i] - ctx.psi0.values[i]);
  const double rel = std::sqrt(diff2 * ctx.grid->spacing()) /
                     std::max(l2_norm(ctx.psi0), 1e-300);
  add_check(out, "round_trip_relative_error", rel, "< 1e-3", rel < 1e-3);
  add_check(out, "contraction_ratio", result.contraction_ratio, "< 1",
            result.contraction_ratio < 1.0);
}

void run_identity_suite(const ExperimentConfig& cfg, const RunContext& ctx,
                        ExperimentOutcome& out, const std::string&) {
  const auto residuals = commutator_identity_check(ctx.psi0, cfg.model);
  add_check(out, "commutator_operator_residual", residuals.operator_identity,
            "< 1e-6", residuals.operator_identity < 1e-6);
  add_check(out, "commutator_algebraic_residual", residuals.algebraic_identity,
            "< 1e-6", residuals.algebraic_identity < 1e-6);

  double worst_match = 0.0;
  double min_value = std::numeric_limits<double>::infinity();
  for (const double sigma : {0.6, 1.0, 1.4}) {
    for (int i = -1000; i <= 1000; ++i) {
      const double s = 0.1 * static_cast<double>(i);
      if (s != 0.0 && std::abs(s) < 0.01) continue;
      const auto v = gamma_weight_positivity(s, sigma);
      const double scale = std::max(std::abs(v.closed_form), 1e-300);
      worst_match = std::max(
          worst_match, std::abs(v.closed_form - v.derivative_route) / scale);
      min_value = std::min(min_value, v.closed_form);
    }
  }
  add_check(out, "positivity_route_mismatch", worst_match, "< 1e-9",
            worst_match < 1e-9);
  add_check(out, "positivity_min_value", min_value, "> 0", min_value > 0.0);

  double worst_identity = 0.0;
  for (const double p : {3.6, 4.0, 5.0, 7.0})
    worst_identity = std::max(
        worst_identity, strichartz_exponents(p).identity_residuals().max());
  add_check(out, "exponent_identity_residual", worst_identity, "< 1e-12",
            worst_identity < 1e-12);
}

void write_summary(const std::string& dir, const ExperimentConfig& cfg,
                   ExperimentOutcome& out) {
  std::ofstream os(dir + "/summary.txt");
  if (!os) throw std::runtime_error("cannot write " + dir + "/summary.txt");
  for (const auto& line : config_comments(cfg)) os << "# " << line << "\n";
  bool all_pass = true;
  for (const auto& c : out.checks) {
    os << c.name << ": measured=" << fmt(c.measured) << " band=" << c.band
       << " " << (c.pass ? "PASS" : "FAIL") << "\n";
    all_pass = all_pass && c.pass;
  }
  os << "overall: " << (all_pass ? "PASS" : "FAIL") << "\n";
  out.artifacts.push_back(dir + "/summary.txt");
  if (!all_pass && out.exit_code == 0) out.exit_code = 1;
}

}  // namespace

bool experiment_known(const std::string& name) {
  return kExperiments.count(name) > 0;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  if (!experiment_known(cfg.experiment))
    throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");
  fs::create_directories(cfg.output_dir);
  const std::string dir = cfg.output_dir;

  ExperimentOutcome out;
  try {
    // The wave-operator run integrates the interaction ladder to 4 t_end;
    // the identity suite never evolves, so no run-length guard applies.
    const double horizon = cfg.experiment == "wave-operator" ? 4.0 * cfg.t_end
                           : cfg.experiment == "identity-suite" ? 0.0
                                                                : cfg.t_end;
    RunContext ctx = make_context(cfg, horizon);

    if (cfg.experiment == "conservation") run_conservation(cfg, ctx, out, dir);
    else if (cfg.experiment == "monotonicity") run_monotonicity(cfg, ctx, out, dir);
    else if (cfg.experiment == "local-decay") run_local_decay(cfg, ctx, out, dir);
    else if (cfg.experiment == "pseudoconformal") run_pseudoconformal(cfg, ctx, out, dir);
    else if (cfg.experiment == "linf-decay") run_linf_decay(cfg, ctx, out, dir);
    else if (cfg.experiment == "dispersive") run_dispersive(cfg, ctx, out, dir);
    else if (cfg.experiment == "completeness") run_completeness(cfg, ctx, out, dir);
    else if (cfg.experiment == "wave-operator") run_wave_operator(cfg, ctx, out, dir);
    else run_identity_suite(cfg, ctx, out, dir);
  } catch (const std::runtime_error& err) {
    // Numerical guards (domain too small, non-finite state) land here.
    std::clog << cfg.experiment << ": " << err.what() << "\n";
    out.exit_code = 3;
    add_check(out, "numerical_guard", 0.0, err.what(), false);
  }
  write_summary(dir, cfg, out);
  return out;
}

int validate_experiment(const ExperimentConfig& cfg, std::ostream& report) {
  if (!experiment_known(cfg.experiment)) {
    report << "unknown experiment '" << cfg.experiment << "'\n";
    return 2;
  }
  const auto grid = build_grid(cfg);
  const WaveFunction psi0 = build_initial(cfg, grid);
  const double dt = effective_dt(cfg, *grid);

  EvolutionConfig ecfg;
  ecfg.dt = dt;
  ecfg.t_end = cfg.t_end;
  report << "grid: n=" << grid->size() << " spacing=" << grid->spacing()
         << " length=" << grid->length() << "\n";
  report << "dt: " << dt << " nyquist_phase=" << ecfg.nyquist_phase(*grid)
         << (ecfg.phase_wrap_ok(*grid) ? "" : " (WARNING: phase wraps)") << "\n";

  const double horizon = cfg.experiment == "wave-operator" ? 4.0 * cfg.t_end
                         : cfg.experiment == "identity-suite" ? 0.0
                                                              : cfg.t_end;
  const bool guard = domain_guard_ok(psi0, horizon);
  report << "domain_guard: " << (guard ? "ok" : "FAIL")
         << " (horizon time " << horizon << ")\n";
  if (!guard && !cfg.override_domain_guard) return 3;
  report << "validate: ok\n";
  return 0;
}

}  // namespace tnls
