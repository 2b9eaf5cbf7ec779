#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/functional.h>

#include "levyou/burgers.hpp"
#include "levyou/cli.hpp"
#include "levyou/cylnoise.hpp"
#include "levyou/errors.hpp"
#include "levyou/regularity.hpp"
#include "levyou/spectral_ou.hpp"
#include "levyou/subordinator.hpp"

namespace py = pybind11;
using namespace levyou;

namespace {

cylnoise::LevyNoiseSpec make_noise(const spectral_ou::SpectralOperator& op, double theta,
                                   const subordinator::SubordinatorSpec& sub) {
  if (!op.modes()) throw ConfigError("noise: the operator has no mode geometry");
  return {cylnoise::CylindricalWienerSpec::hilbert_scale(*op.modes(), theta), sub};
}

burgers::SpectralField constant_field(std::vector<double> c) {
  return [c = std::move(c)](double, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < c.size() && j < out.size(); ++j) out[j] = c[j];
  };
}

}  // namespace

PYBIND11_MODULE(_levyou, m) {
  m.doc() = "Subordinated cylindrical noise, OU processes and stochastic Burgers";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  using subordinator::SubordinatorSpec;
  py::class_<SubordinatorSpec>(m, "Subordinator")
      .def_static("stable", &SubordinatorSpec::stable, py::arg("beta"), py::arg("drift") = 0.0)
      .def_static("drift_only", &SubordinatorSpec::drift_only, py::arg("drift"))
      .def_static(
          "compound_poisson",
          [](const std::vector<std::pair<double, double>>& atoms, double drift) {
            std::vector<subordinator::Atom> a;
            for (auto [s, r] : atoms) a.push_back({s, r});
            return SubordinatorSpec::compound_poisson(std::move(a), drift);
          },
          py::arg("atoms"), py::arg("drift") = 0.0, "atoms: list of (size, rate)")
      .def_property_readonly("kind", [](const SubordinatorSpec& s) { return subordinator::to_string(s.kind()); })
      .def_property_readonly("drift", &SubordinatorSpec::drift);

  m.def("laplace_exponent", &subordinator::laplace_exponent, py::arg("spec"), py::arg("r"), py::arg("rel_tol") = 1e-8);
  m.def("finite_variation", &subordinator::finite_variation_diagnostic, py::arg("spec"));
  m.def(
      "subordinator_values",
      [](const SubordinatorSpec& s, std::vector<double> times, std::uint64_t seed) {
        if (times.empty()) throw ConfigError("times: empty");
        const double horizon = *std::max_element(times.begin(), times.end());
        const auto p = subordinator::simulate_path(s, horizon, {}, seed);
        std::vector<double> out;
        for (double t : times) out.push_back(p.value(t));
        return out;
      },
      py::arg("spec"), py::arg("times"), py::arg("seed"), "Z at the given times from one path");

  using spectral_ou::SpectralOperator;
  py::class_<SpectralOperator>(m, "SpectralOperator")
      .def_static("cube", &SpectralOperator::cube, py::arg("dim"), py::arg("per_axis"), py::arg("gamma"),
                  py::arg("length") = std::numbers::pi)
      .def_property_readonly("eigenvalues", &SpectralOperator::eigenvalues)
      .def_property_readonly("gamma", &SpectralOperator::gamma)
      .def("__len__", &SpectralOperator::size);

  m.def(
      "noise_charfn",
      [](const SpectralOperator& op, double theta, const SubordinatorSpec& s, std::vector<double> phi, double t) {
        return cylnoise::char_functional(make_noise(op, theta, s), phi, t);
      },
      py::arg("op"), py::arg("theta"), py::arg("subordinator"), py::arg("phi"), py::arg("t"));
  m.def(
      "ou_charfn",
      [](const SpectralOperator& op, double theta, const SubordinatorSpec& s, std::vector<double> phi, double t,
         double tol) { return spectral_ou::charfn_oracle(op, make_noise(op, theta, s), phi, t, tol); },
      py::arg("op"), py::arg("theta"), py::arg("subordinator"), py::arg("phi"), py::arg("t"), py::arg("tol") = 1e-10);
  m.def(
      "ou_charfn_empirical",
      [](const SpectralOperator& op, double theta, const SubordinatorSpec& s, std::vector<double> phi, double t,
         std::size_t paths, std::uint64_t seed) {
        const auto e = spectral_ou::empirical_charfn(op, make_noise(op, theta, s), phi, t, paths, seed);
        return std::make_pair(e.mean, e.stderr_);
      },
      py::arg("op"), py::arg("theta"), py::arg("subordinator"), py::arg("phi"), py::arg("t"), py::arg("paths"),
      py::arg("seed"), "(mean, standard error)");
  m.def(
      "sample_field",
      [](const SpectralOperator& op, double theta, const SubordinatorSpec& s, double t, std::uint64_t seed,
         std::size_t grid) {
        const auto noise = make_noise(op, theta, s);
        const auto z = subordinator::simulate_path(s, t, {}, seed);
        return spectral_ou::sample_convolution(op, noise, z, t, seed).physical(grid);
      },
      py::arg("op"), py::arg("theta"), py::arg("subordinator"), py::arg("t"), py::arg("seed"), py::arg("grid"),
      "X(t) on the grid nodes");
  m.def(
      "critical_exponent",
      [](const SpectralOperator& op, double theta, const SubordinatorSpec& s) {
        return spectral_ou::regularity_exponent_bound(op, make_noise(op, theta, s),
                                                      spectral_ou::RegularityTarget::holder(0.0))
            .critical;
      },
      py::arg("op"), py::arg("theta"), py::arg("subordinator"));
  m.def(
      "holder_exponent",
      [](std::vector<double> values, double length) { return regularity::estimate_holder_grid(values, length).delta; },
      py::arg("values"), py::arg("length"), "values on M + 1 equispaced nodes of [0, length]");

  m.def(
      "apriori_constants",
      [](double v0_sq, double z_l4, double g_dual, double T) {
        const auto c = burgers::apriori_constants(v0_sq, z_l4, g_dual, T);
        return py::dict(py::arg("K") = c.K, py::arg("L") = c.L, py::arg("M") = c.M, py::arg("N") = c.N);
      },
      py::arg("v0_sq"), py::arg("z_l4_integral"), py::arg("g_dual_integral"), py::arg("horizon"));
  m.def(
      "solve_burgers",
      [](std::vector<double> v0, std::vector<double> z, std::vector<double> g, double horizon, double dt,
         std::size_t grid) {
        const auto tr = burgers::solve_modified_burgers(v0, constant_field(z), constant_field(g), {horizon, dt, grid});
        py::list checks;
        for (const auto& b : burgers::check_apriori(tr).checks)
          checks.append(py::dict(py::arg("name") = b.name, py::arg("lhs") = b.lhs, py::arg("rhs") = b.rhs,
                                 py::arg("holds") = b.holds));
        return py::dict(py::arg("final") = tr.states.back(), py::arg("energy") = tr.energy, py::arg("checks") = checks);
      },
      py::arg("v0"), py::arg("z"), py::arg("g"), py::arg("horizon"), py::arg("dt"), py::arg("grid"),
      "modified Burgers with time-independent z and g (sine coefficients)");

  m.def("list_experiments", [] {
    py::list out;
    for (const auto& e : cli::list_experiments())
      out.append(py::dict(py::arg("kind") = e.kind, py::arg("exercises") = e.exercises, py::arg("summary") = e.summary));
    return out;
  });
  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const auto cfg = cli::parse_config(config_json, "<python>");
        cli::RunResult r;
        {
          py::gil_scoped_release release;
          r = cli::run(cfg);
        }
        return std::make_pair(r.exit_code, r.report.dump());
      },
      py::arg("config_json"), "(exit code, report as JSON text)");
}
