#include "rsbr/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rsbr/canonical.hpp"
#include "rsbr/closed_form.hpp"
#include "rsbr/errors.hpp"
#include "rsbr/scenario_io.hpp"
#include "rsbr/simulator.hpp"

namespace rsbr::cli {
namespace {

unsigned default_threads() {
    if (const char* env = std::getenv("RSBR_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

struct Options {
    std::string scenario;
    std::string output;
    double t_max = 20.0;
    std::size_t points = 20;
    std::string spacing = "linear";
    double t_min = 0.0;

    std::optional<double> rel_tol;
    std::optional<double> abs_tol;
    std::optional<int> max_subdivisions;
    std::optional<double> tail_abs_tol;
    std::optional<double> tail_window;

    std::optional<std::size_t> n;
    std::optional<std::uint64_t> seed;
    unsigned threads = default_threads();
    double confidence = 0.99;
    std::optional<double> nu;

    bool simulate = false;
    double threshold = 0.9;

    double t_condition = 5.0;
    std::optional<std::size_t> n_condition;
    std::size_t samples = 10000;
    double alpha = 0.01;
};

void add_common(CLI::App& sub, Options& o) {
    sub.add_option("--scenario", o.scenario, "Scenario JSON file, or a built-in name (s1..s5)")->required();
    sub.add_option("--output", o.output, "Output file (default: stdout)");
    sub.add_option("--rel-tol", o.rel_tol, "Quadrature relative tolerance");
    sub.add_option("--abs-tol", o.abs_tol, "Quadrature absolute tolerance");
    sub.add_option("--max-subdivisions", o.max_subdivisions, "Quadrature panel budget");
    sub.add_option("--tail-abs-tol", o.tail_abs_tol, "Window contribution that ends an improper integral");
    sub.add_option("--tail-window", o.tail_window, "Window width for improper integrals");
}

void add_grid(CLI::App& sub, Options& o) {
    sub.add_option("--t-max", o.t_max, "Last grid point")->check(CLI::PositiveNumber);
    sub.add_option("--points", o.points, "Number of grid points")->check(CLI::PositiveNumber);
    sub.add_option("--grid", o.spacing, "Grid spacing")->check(CLI::IsMember({"linear", "log"}));
    sub.add_option("--t-min", o.t_min, "First point of a log grid (default: t-max / 1000)");
}

void add_simulation(CLI::App& sub, Options& o) {
    sub.add_option("--n", o.n, "Monte Carlo replicas or renewal cycles");
    sub.add_option("--seed", o.seed, "Master seed");
    sub.add_option("--threads", o.threads, "Worker threads (default: $RSBR_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    sub.add_option("--confidence", o.confidence, "Confidence level of reported intervals")
        ->check(CLI::Range(0.5, 0.999999));
}

io::ScenarioDocument resolve_scenario(const std::string& name) {
    if (std::filesystem::exists(name)) return io::load_scenario(name);
    if (auto builtin = canonical::by_name(name)) return {*builtin, {}, {}};
    throw Error("cannot read scenario '" + name + "': no such file or built-in scenario");
}

QuadratureSettings numerics(const Options& o, QuadratureSettings q) {
    if (o.rel_tol) q.rel_tol = *o.rel_tol;
    if (o.abs_tol) q.abs_tol = *o.abs_tol;
    if (o.max_subdivisions) q.max_subdivisions = *o.max_subdivisions;
    if (o.tail_abs_tol) q.tail_abs_tol = *o.tail_abs_tol;
    if (o.tail_window) q.tail_window = *o.tail_window;
    q.validate();
    return q;
}

// Writes to --output when given, else to the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw Error("cannot open '" + path + "' for writing");
        }
        stream_ = path.empty() ? &fallback : &file_;
    }
    std::ostream& stream() { return *stream_; }
    bool to_file() const { return !path_.empty(); }
    void close() {
        stream_->flush();
        if (!*stream_) throw Error("failed writing '" + (path_.empty() ? std::string("stdout") : path_) + "'");
    }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

int cmd_curve(const Options& o, bool hazard_curve_wanted, std::ostream& out) {
    const auto doc = resolve_scenario(o.scenario);
    const auto q = numerics(o, doc.numerics);
    const auto grid = make_grid(o.t_max, o.points, o.spacing, o.t_min);
    const auto curve = hazard_curve_wanted ? hazard_curve(doc.scenario, grid, q) : survival_curve(doc.scenario, grid, q);
    Sink sink(o.output, out);
    io::write_curve_csv(curve, sink.stream());
    sink.close();
    return kSuccess;
}

int cmd_efficiency(const Options& o, std::ostream& out, std::ostream& err) {
    auto doc = resolve_scenario(o.scenario);
    const auto q = numerics(o, doc.numerics);
    const Scenario scenario = o.nu ? doc.scenario.with_reboot_mean(*o.nu) : doc.scenario;
    const auto report = efficiency(scenario, q);
    nlohmann::json result = io::to_json(report);
    if (o.simulate) {
        const auto n = o.n.value_or(doc.simulation.n_replicas);
        const RngPolicy policy(o.seed.value_or(doc.simulation.master_seed));
        const auto est = estimate_efficiency(scenario, n, policy, o.threads, o.confidence, doc.simulation.cycle);
        result = {{"closed_form", result},
                  {"simulation", io::to_json(est)},
                  {"closed_form_inside_ci", report.psi >= est.ci_lo && report.psi <= est.ci_hi}};
    }
    Sink sink(o.output, out);
    sink.stream() << result.dump(2) << '\n';
    sink.close();
    if (report.diverged) {
        err << "quadrature divergence: an improper integral did not decay; failure is not certain, psi reported as 0\n";
        return kFailure;
    }
    return kSuccess;
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const auto doc = resolve_scenario(o.scenario);
    const auto grid = make_grid(o.t_max, o.points, o.spacing, o.t_min);
    const RngPolicy policy(o.seed.value_or(doc.simulation.master_seed));
    const auto curve = estimate_survival(doc.scenario, grid, o.n.value_or(doc.simulation.n_replicas), policy,
                                         o.threads, o.confidence);
    Sink sink(o.output, out);
    io::write_curve_csv(curve, sink.stream());
    sink.close();
    return kSuccess;
}

int cmd_validate(const Options& o, std::ostream& out) {
    const auto doc = resolve_scenario(o.scenario);
    const auto q = numerics(o, doc.numerics);
    const auto grid = make_grid(o.t_max, o.points, o.spacing, o.t_min);
    const auto closed = survival_curve(doc.scenario, grid, q);
    const RngPolicy policy(o.seed.value_or(doc.simulation.master_seed));
    const auto mc = estimate_survival(doc.scenario, grid, o.n.value_or(doc.simulation.n_replicas), policy, o.threads,
                                      o.confidence);

    Sink sink(o.output, out);
    auto& s = sink.stream();
    s << "t,closed_form,mc_estimate,ci_lo,ci_hi,inside_ci\n";
    std::size_t inside = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool ok = closed.values[i] >= mc.ci_lo(i) && closed.values[i] <= mc.ci_hi(i);
        inside += ok ? 1 : 0;
        s << io::format_number(grid[i]) << ',' << io::format_number(closed.values[i]) << ','
          << io::format_number(mc.estimates[i]) << ',' << io::format_number(mc.ci_lo(i)) << ','
          << io::format_number(mc.ci_hi(i)) << ',' << (ok ? 1 : 0) << '\n';
    }
    const std::string summary = "coverage: " + std::to_string(inside) + "/" + std::to_string(grid.size());
    s << summary << '\n';
    sink.close();
    if (sink.to_file()) out << summary << '\n';
    const bool pass = static_cast<double>(inside) >= o.threshold * static_cast<double>(grid.size()) - 1e-9;
    return pass ? kSuccess : kCoverageBelowThreshold;
}

int cmd_order_stat(const Options& o, std::ostream& out) {
    const auto doc = resolve_scenario(o.scenario);
    const double m = doc.scenario.intensity.cumulative(o.t_condition);
    const auto n_condition =
        o.n_condition.value_or(static_cast<std::size_t>(std::max(1.0, std::round(m))));
    const RngPolicy policy(o.seed.value_or(doc.simulation.master_seed));
    const auto report = order_statistics_test(doc.scenario, o.t_condition, n_condition, o.samples, policy);
    const nlohmann::json result = {{"statistic", report.statistic},
                                   {"p_value", report.p_value},
                                   {"n_points", report.n_points},
                                   {"retained_paths", report.retained_paths},
                                   {"attempted_paths", report.attempted_paths},
                                   {"acceptance_probability", report.acceptance_probability},
                                   {"n_condition", n_condition},
                                   {"t", o.t_condition},
                                   {"alpha", o.alpha},
                                   {"reject", report.p_value < o.alpha}};
    Sink sink(o.output, out);
    sink.stream() << result.dump(2) << '\n';
    sink.close();
    return kSuccess;
}

}  // namespace

std::vector<double> make_grid(double t_max, std::size_t points, const std::string& spacing, double t_min) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("grid: t-max must be finite and > 0");
    if (points == 0) throw DomainError("grid: points must be > 0");
    std::vector<double> grid(points);
    if (spacing == "linear") {
        for (std::size_t i = 0; i < points; ++i)
            grid[i] = t_max * static_cast<double>(i + 1) / static_cast<double>(points);
    } else if (spacing == "log") {
        const double lo = t_min > 0.0 ? t_min : t_max / 1000.0;
        if (!(lo < t_max) && points > 1) throw DomainError("grid: t-min must be below t-max");
        for (std::size_t i = 0; i < points; ++i) {
            const double frac = points == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(points - 1);
            grid[i] = lo * std::pow(t_max / lo, frac);
        }
        grid.back() = t_max;
    } else {
        throw DomainError("grid: spacing must be 'linear' or 'log'");
    }
    return grid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reliability of a server under random per-job stress: closed forms and Monte Carlo checks",
                 args.empty() ? "rsbr" : args.front()};
    app.require_subcommand(1);
    Options o;

    auto* survival_cmd = app.add_subcommand("survival", "Closed-form survival curve S_Y(t) as CSV");
    add_common(*survival_cmd, o);
    add_grid(*survival_cmd, o);

    auto* hazard_cmd = app.add_subcommand("hazard", "Closed-form hazard curve r(t) as CSV");
    add_common(*hazard_cmd, o);
    add_grid(*hazard_cmd, o);

    auto* efficiency_cmd = app.add_subcommand("efficiency", "Long-run efficiency psi as a JSON envelope");
    add_common(*efficiency_cmd, o);
    add_simulation(*efficiency_cmd, o);
    efficiency_cmd->add_flag("--simulate", o.simulate, "Also estimate psi from simulated renewal cycles");
    efficiency_cmd->add_option("--nu", o.nu, "Override the mean reboot time");

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo survival estimate with intervals as CSV");
    add_common(*simulate_cmd, o);
    add_grid(*simulate_cmd, o);
    add_simulation(*simulate_cmd, o);

    auto* validate_cmd =
        app.add_subcommand("validate", "Closed-form survival against the Monte Carlo estimate, with coverage");
    add_common(*validate_cmd, o);
    add_grid(*validate_cmd, o);
    add_simulation(*validate_cmd, o);
    validate_cmd->add_option("--threshold", o.threshold, "Minimum fraction of grid points inside the interval")
        ->check(CLI::Range(0.0, 1.0));

    auto* order_cmd = app.add_subcommand("order-stat-test", "KS test of pooled conditional arrival times");
    add_common(*order_cmd, o);
    add_simulation(*order_cmd, o);
    order_cmd->add_option("--t", o.t_condition, "Conditioning time")->check(CLI::PositiveNumber);
    order_cmd->add_option("--n-condition", o.n_condition, "Conditioning arrival count (default: round(m(t)))");
    order_cmd->add_option("--samples", o.samples, "Retained paths")->check(CLI::PositiveNumber);
    order_cmd->add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("rsbr");

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        bool printed_sub_help = false;
        for (auto* sub : app.get_subcommands()) {
            if (sub->get_help_ptr() != nullptr && sub->get_help_ptr()->count() > 0) {
                out << sub->help();
                printed_sub_help = true;
            }
        }
        if (printed_sub_help) return kSuccess;
        err << "usage error: " << e.what() << '\n';
        return kFailure;
    }

    try {
        if (survival_cmd->parsed()) return cmd_curve(o, false, out);
        if (hazard_cmd->parsed()) return cmd_curve(o, true, out);
        if (efficiency_cmd->parsed()) return cmd_efficiency(o, out, err);
        if (simulate_cmd->parsed()) return cmd_simulate(o, out);
        if (validate_cmd->parsed()) return cmd_validate(o, out);
        if (order_cmd->parsed()) return cmd_order_stat(o, out);
    } catch (const ParseError& e) {
        err << "scenario syntax error: " << e.what() << '\n';
    } catch (const ValidationError& e) {
        err << "invalid scenario: " << e.what() << '\n';
    } catch (const DivergenceError& e) {
        err << "quadrature divergence: " << e.what() << '\n';
    } catch (const ConvergenceError& e) {
        err << "quadrature did not converge: " << e.what() << '\n';
    } catch (const InefficiencyError& e) {
        err << "inefficient conditioning: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return kFailure;
}

}  // namespace rsbr::cli
