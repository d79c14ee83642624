#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rsbr/canonical.hpp"
#include "rsbr/cli.hpp"
#include "rsbr/closed_form.hpp"
#include "rsbr/errors.hpp"
#include "rsbr/scenario_io.hpp"
#include "rsbr/simulator.hpp"

namespace py = pybind11;
using namespace rsbr;

namespace {

using JobTuple = std::tuple<double, double, double>;

WorkloadPath make_path(const std::vector<JobTuple>& jobs, double horizon) {
    WorkloadPath path{{}, horizon};
    for (const auto& [arrival, service, stress] : jobs) path.jobs.push_back({arrival, service, stress});
    return path;
}

StressDistribution make_stress(const std::vector<std::pair<double, double>>& atoms) {
    std::vector<StressDistribution::Atom> out;
    for (const auto& [eta, p] : atoms) out.push_back({eta, p});
    return StressDistribution{std::move(out)};
}

Scenario builtin(const std::string& name) {
    if (auto s = canonical::by_name(name)) return *s;
    throw py::value_error("unknown built-in scenario '" + name + "'");
}

py::dict report_dict(const EfficiencyReport& r) {
    py::dict d;
    d["psi"] = r.psi;
    d["mean_cycle_length"] = r.mean_cycle_length;
    d["expected_jobs_per_cycle"] = r.expected_jobs_per_cycle;
    d["nu"] = r.reboot_mean_nu;
    d["diverged"] = r.diverged;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Survival, hazard and efficiency of a server under random per-job stress";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
    py::register_exception<ModelError>(m, "ModelError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<InefficiencyError>(m, "InefficiencyError", base.ptr());

    py::class_<QuadratureSettings>(m, "QuadratureSettings")
        .def(py::init<>())
        .def_readwrite("rel_tol", &QuadratureSettings::rel_tol)
        .def_readwrite("abs_tol", &QuadratureSettings::abs_tol)
        .def_readwrite("max_subdivisions", &QuadratureSettings::max_subdivisions)
        .def_readwrite("tail_abs_tol", &QuadratureSettings::tail_abs_tol)
        .def_readwrite("tail_window", &QuadratureSettings::tail_window);

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("reboot_mean_nu", &Scenario::reboot_mean_nu)
        .def("with_reboot_mean", &Scenario::with_reboot_mean, py::arg("nu"))
        .def(
            "with_stress",
            [](const Scenario& s, const std::vector<std::pair<double, double>>& atoms) {
                return s.with_stress(make_stress(atoms));
            },
            py::arg("atoms"), "Copy with the stress law replaced by [(eta, p), ...].")
        .def_property_readonly("stress_atoms",
                               [](const Scenario& s) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto& a : s.stress.atoms()) out.emplace_back(a.eta, a.p);
                                   return out;
                               })
        .def("cumulative_intensity", [](const Scenario& s, double t) { return cumulative_intensity(s, t); })
        .def("baseline_survival", [](const Scenario& s, double t) { return baseline_survival(s, t); })
        .def("to_json", [](const Scenario& s) { return io::serialize_scenario({s, {}, {}}); });

    m.def("builtin", &builtin, py::arg("name"), "One of the canonical scenarios s1..s5.");
    m.def("builtin_names", &canonical::names);
    m.def("parse_scenario", [](const std::string& text) { return io::parse_scenario(text).scenario; },
          py::arg("text"));
    m.def("load_scenario", [](const std::string& path) { return io::load_scenario(path).scenario; },
          py::arg("path"));

    const QuadratureSettings defaults;
    m.def("survival", &survival, py::arg("scenario"), py::arg("t"), py::arg("settings") = defaults);
    m.def("hazard", &hazard, py::arg("scenario"), py::arg("t"), py::arg("settings") = defaults);
    m.def("hazard_printed_form", &hazard_printed_form, py::arg("scenario"), py::arg("t"),
          py::arg("settings") = defaults);
    m.def(
        "survival_curve",
        [](const Scenario& s, const std::vector<double>& grid, const QuadratureSettings& q) {
            return survival_curve(s, grid, q).values;
        },
        py::arg("scenario"), py::arg("grid"), py::arg("settings") = defaults);
    m.def(
        "hazard_curve",
        [](const Scenario& s, const std::vector<double>& grid, const QuadratureSettings& q) {
            return hazard_curve(s, grid, q).values;
        },
        py::arg("scenario"), py::arg("grid"), py::arg("settings") = defaults);
    m.def("inner_exposure", &inner_exposure, py::arg("scenario"), py::arg("t"), py::arg("eta"),
          py::arg("settings") = defaults);
    m.def("single_job_factor", &single_job_factor, py::arg("scenario"), py::arg("t"), py::arg("eta"),
          py::arg("settings") = defaults);
    m.def("a_func", &a_func, py::arg("scenario"), py::arg("t"), py::arg("eta"), py::arg("settings") = defaults);
    m.def("b_func", &b_func, py::arg("scenario"), py::arg("t"), py::arg("eta"), py::arg("settings") = defaults);
    m.def("mean_cycle_length", &mean_cycle_length, py::arg("scenario"), py::arg("settings") = defaults);
    m.def("expected_jobs_per_cycle", &expected_jobs_per_cycle, py::arg("scenario"), py::arg("settings") = defaults);
    m.def(
        "efficiency", [](const Scenario& s, const QuadratureSettings& q) { return report_dict(efficiency(s, q)); },
        py::arg("scenario"), py::arg("settings") = defaults);

    m.def(
        "conditional_survival_given_path",
        [](const Scenario& s, const std::vector<JobTuple>& jobs, double horizon, double t) {
            return conditional_survival_given_path(s, make_path(jobs, horizon), t);
        },
        py::arg("scenario"), py::arg("jobs"), py::arg("horizon"), py::arg("t"),
        "jobs is a list of (arrival, service, stress) tuples sorted by arrival.");
    m.def(
        "conditional_failure_density",
        [](const Scenario& s, const std::vector<JobTuple>& jobs, double horizon, double t) {
            return conditional_failure_density(s, make_path(jobs, horizon), t);
        },
        py::arg("scenario"), py::arg("jobs"), py::arg("horizon"), py::arg("t"));

    m.def(
        "estimate_survival",
        [](const Scenario& s, const std::vector<double>& grid, std::size_t n, std::uint64_t seed, unsigned threads,
           double confidence) {
            EmpiricalCurve c;
            {
                py::gil_scoped_release release;
                c = estimate_survival(s, grid, n, RngPolicy(seed), threads, confidence);
            }
            std::vector<double> lo, hi;
            for (std::size_t i = 0; i < c.grid.size(); ++i) {
                lo.push_back(c.ci_lo(i));
                hi.push_back(c.ci_hi(i));
            }
            py::dict d;
            d["grid"] = c.grid;
            d["estimate"] = c.estimates;
            d["ci_lo"] = lo;
            d["ci_hi"] = hi;
            d["z"] = c.z;
            d["n_replicas"] = c.n_replicas;
            return d;
        },
        py::arg("scenario"), py::arg("grid"), py::arg("n_replicas") = 100000, py::arg("seed") = 42,
        py::arg("threads") = 1, py::arg("confidence") = 0.99);
    m.def(
        "estimate_efficiency",
        [](const Scenario& s, std::size_t n, std::uint64_t seed, unsigned threads, double confidence) {
            EfficiencyEstimate e;
            {
                py::gil_scoped_release release;
                e = estimate_efficiency(s, n, RngPolicy(seed), threads, confidence);
            }
            py::dict d;
            d["psi"] = e.psi;
            d["std_error"] = e.std_error;
            d["ci_lo"] = e.ci_lo;
            d["ci_hi"] = e.ci_hi;
            d["mean_completed_jobs"] = e.mean_completed_jobs;
            d["mean_cycle_length"] = e.mean_cycle_length;
            d["n_cycles"] = e.n_cycles;
            return d;
        },
        py::arg("scenario"), py::arg("n_cycles") = 100000, py::arg("seed") = 42, py::arg("threads") = 1,
        py::arg("confidence") = 0.99);
    m.def(
        "order_statistics_test",
        [](const Scenario& s, double t, std::size_t n_condition, std::size_t n_samples, std::uint64_t seed,
           std::function<double(double)> reference_cdf) {
            const auto r = order_statistics_test(s, t, n_condition, n_samples, RngPolicy(seed), reference_cdf);
            py::dict d;
            d["statistic"] = r.statistic;
            d["p_value"] = r.p_value;
            d["n_points"] = r.n_points;
            d["retained_paths"] = r.retained_paths;
            d["attempted_paths"] = r.attempted_paths;
            d["acceptance_probability"] = r.acceptance_probability;
            return d;
        },
        py::arg("scenario"), py::arg("t"), py::arg("n_condition"), py::arg("n_samples") = 10000,
        py::arg("seed") = 42, py::arg("reference_cdf") = std::function<double(double)>{});

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "rsbr");
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
