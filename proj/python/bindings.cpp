#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tnls/diagnostics.hpp"
#include "tnls/experiments.hpp"
#include "tnls/scattering.hpp"

namespace py = pybind11;
using namespace tnls;

namespace {

std::vector<double> span_to_vec(std::span<const double> s) {
  return {s.begin(), s.end()};
}

}  // namespace

PYBIND11_MODULE(_tortoise_nls, m) {
  m.doc() = "Radial nonlinear Schrodinger equation outside a Schwarzschild "
            "black hole: geometry, split-step evolution, monotonicity "
            "diagnostics and scattering constructions.";

  py::class_<SchwarzschildParams>(m, "SchwarzschildParams")
      .def(py::init([](double mass) { return SchwarzschildParams{mass}; }),
           py::arg("mass") = 1.0)
      .def_readwrite("mass", &SchwarzschildParams::mass)
      .def("horizon", &SchwarzschildParams::horizon)
      .def("alpha", &SchwarzschildParams::alpha);

  m.def("tortoise", &tortoise, py::arg("r"), py::arg("bh"));
  m.def("inverse_tortoise", &inverse_tortoise, py::arg("r_star"), py::arg("bh"),
        py::arg("tol") = 1e-12);
  m.def("potential", &potential, py::arg("r_star"), py::arg("bh"));
  m.def("potential_derivative", &potential_derivative, py::arg("r_star"),
        py::arg("bh"));

  py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
      .def(py::init<std::size_t, double, double, SchwarzschildParams, double>(),
           py::arg("n"), py::arg("r_star_min"), py::arg("r_star_max"),
           py::arg("bh"), py::arg("tol") = 1e-12)
      .def_property_readonly("n", &Grid::size)
      .def_property_readonly("spacing", &Grid::spacing)
      .def_property_readonly("length", &Grid::length)
      .def("r_star", [](const Grid& g) { return span_to_vec(g.r_star()); })
      .def("r", [](const Grid& g) { return span_to_vec(g.r()); })
      .def("V", [](const Grid& g) { return span_to_vec(g.V()); });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double lambda, double p) {
             return ModelParams{lambda, p};
           }),
           py::arg("lam") = 1.0, py::arg("p") = 5.0)
      .def_readwrite("lam", &ModelParams::lambda)
      .def_readwrite("p", &ModelParams::p)
      .def("pseudoconformal_valid", &ModelParams::pseudoconformal_valid)
      .def("wave_op_valid", &ModelParams::wave_op_valid)
      .def("completeness_valid", &ModelParams::completeness_valid);

  py::class_<WaveFunction>(m, "WaveFunction")
      .def_readonly("time", &WaveFunction::time)
      .def_readonly("values", &WaveFunction::values)
      .def_property_readonly("grid", [](const WaveFunction& psi) {
        return std::const_pointer_cast<Grid>(psi.grid);
      });

  m.def(
      "gaussian_packet",
      [](std::shared_ptr<Grid> grid, double center, double width,
         double momentum, double amplitude, double time) {
        return gaussian_packet(grid, center, width, momentum, amplitude, time);
      },
      py::arg("grid"), py::arg("center"), py::arg("width"), py::arg("momentum"),
      py::arg("amplitude") = 1.0, py::arg("time") = 0.0);

  m.def("l2_norm", &l2_norm);
  m.def("sup_norm", &sup_norm);
  m.def("lq_norm", &lq_norm, py::arg("psi"), py::arg("q"));
  m.def("save_wavefunction",
        py::overload_cast<const std::string&, const WaveFunction&>(
            &save_wavefunction),
        py::arg("path"), py::arg("psi"));
  m.def("load_wavefunction",
        py::overload_cast<const std::string&>(&load_wavefunction),
        py::arg("path"));

  py::class_<EnergyParts>(m, "EnergyParts")
      .def_readonly("kinetic", &EnergyParts::kinetic)
      .def_readonly("potential", &EnergyParts::potential)
      .def_readonly("nonlinear", &EnergyParts::nonlinear)
      .def("total", &EnergyParts::total);
  m.def("energy", &energy, py::arg("psi"), py::arg("model"));

  py::enum_<EvolutionMode>(m, "EvolutionMode")
      .value("nonlinear", EvolutionMode::nonlinear)
      .value("linear_with_V", EvolutionMode::linear_with_V)
      .value("free_particle", EvolutionMode::free_particle);

  m.def(
      "evolve",
      [](const WaveFunction& psi0, const ModelParams& model, double dt,
         double t_end, EvolutionMode mode) {
        EvolutionConfig cfg;
        cfg.dt = dt;
        cfg.t_end = t_end;
        cfg.mode = mode;
        cfg.record_every = 0;
        return evolve(psi0, model, cfg);
      },
      py::arg("psi0"), py::arg("model"), py::arg("dt"), py::arg("t_end"),
      py::arg("mode") = EvolutionMode::nonlinear);
  m.def("default_dt", [](const Grid& g) { return default_dt(g); });

  m.def("dilation_expectation", &dilation_expectation);
  m.def(
      "gamma_expectation",
      [](const WaveFunction& psi, double sigma, double R) {
        return gamma_expectation(psi, WeightConfig{sigma, R});
      },
      py::arg("psi"), py::arg("sigma") = 1.0, py::arg("R") = 10.0);
  m.def("pseudoconformal_observable", &pseudoconformal_observable,
        py::arg("psi"), py::arg("t"));

  py::class_<StrichartzExponents>(m, "StrichartzExponents")
      .def_readonly("p", &StrichartzExponents::p)
      .def_readonly("q", &StrichartzExponents::q)
      .def_readonly("q_prime", &StrichartzExponents::q_prime)
      .def_readonly("kappa", &StrichartzExponents::kappa)
      .def_readonly("k", &StrichartzExponents::k)
      .def_readonly("admissible_wave_op", &StrichartzExponents::admissible_wave_op)
      .def_readonly("admissible_completeness",
                    &StrichartzExponents::admissible_completeness);
  m.def("strichartz_exponents", &strichartz_exponents, py::arg("p"));

  py::class_<ScatteringResult>(m, "ScatteringResult")
      .def_readonly("psi_plus", &ScatteringResult::psi_plus)
      .def_readonly("residual_history", &ScatteringResult::residual_history);
  m.def("extract_asymptotic_state", &extract_asymptotic_state, py::arg("psi0"),
        py::arg("model"), py::arg("schedule"), py::arg("dt"));

  m.def(
      "run_experiment_file",
      [](const std::string& config_path) {
        const auto outcome = run_experiment(load_experiment_config(config_path));
        py::list checks;
        for (const auto& c : outcome.checks)
          checks.append(py::make_tuple(c.name, c.measured, c.band, c.pass));
        return py::make_tuple(outcome.exit_code, checks);
      },
      py::arg("config_path"));
}
