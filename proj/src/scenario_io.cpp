#include "rsbr/scenario_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include "rsbr/errors.hpp"

namespace rsbr::io {
namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string at_index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path, "must be an object");
    return j;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!keys.contains(key)) throw ValidationError(join(path, key), "unknown field");
}

const json& member(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(join(path, key), "is required");
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError(path, "must be a number");
    return j.get<double>();
}

double number_member(const json& obj, const std::string& path, const char* key) {
    return number(member(obj, path, key), join(path, key));
}

std::vector<double> number_list(const json& obj, const std::string& path, const char* key) {
    const auto& arr = member(obj, path, key);
    const auto where = join(path, key);
    if (!arr.is_array()) throw ValidationError(where, "must be an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(number(arr[i], at_index(where, i)));
    return out;
}

std::uint64_t unsigned_member(const json& obj, const std::string& path, const char* key) {
    const auto& j = member(obj, path, key);
    if (!j.is_number_unsigned()) throw ValidationError(join(path, key), "must be a nonnegative integer");
    return j.get<std::uint64_t>();
}

std::string form_of(const json& section, const std::string& path) {
    const auto& f = member(section, path, "form");
    if (!f.is_string()) throw ValidationError(join(path, "form"), "must be a string");
    return f.get<std::string>();
}

// The model constructors report paths like "params.rate"; anchor them at
// the section that was being parsed.
template <class Build>
auto build_in(const std::string& section, Build&& build) {
    try {
        return build();
    } catch (const ValidationError& e) {
        throw e.with_prefix(section);
    }
}

json params_of(const json& section, const std::string& path) {
    require_object(section, path);
    reject_unknown(section, path, {"form", "params"});
    return require_object(member(section, path, "params"), join(path, "params"));
}

BaselineHazard parse_baseline(const json& section) {
    const std::string path = "baseline";
    require_object(section, path);
    const auto form = form_of(section, path);
    const auto params = params_of(section, path);
    const auto pp = join(path, "params");
    return build_in(path, [&] {
        if (form == "constant") {
            reject_unknown(params, pp, {"rate"});
            return BaselineHazard{BaselineHazard::Constant{number_member(params, pp, "rate")}};
        }
        if (form == "weibull") {
            reject_unknown(params, pp, {"shape", "scale"});
            return BaselineHazard{
                BaselineHazard::Weibull{number_member(params, pp, "shape"), number_member(params, pp, "scale")}};
        }
        if (form == "piecewise_constant") {
            reject_unknown(params, pp, {"breakpoints", "rates"});
            return BaselineHazard{BaselineHazard::PiecewiseConstant{number_list(params, pp, "breakpoints"),
                                                                    number_list(params, pp, "rates")}};
        }
        if (form == "tabulated") {
            reject_unknown(params, pp, {"grid", "rates"});
            return BaselineHazard{
                BaselineHazard::Tabulated{number_list(params, pp, "grid"), number_list(params, pp, "rates")}};
        }
        throw ValidationError("form",
                              "unknown form '" + form + "' (expected constant, weibull, piecewise_constant, tabulated)");
    });
}

IntensityModel parse_intensity(const json& section) {
    const std::string path = "intensity";
    require_object(section, path);
    const auto form = form_of(section, path);
    const auto params = params_of(section, path);
    const auto pp = join(path, "params");
    return build_in(path, [&] {
        if (form == "constant") {
            reject_unknown(params, pp, {"lambda"});
            return IntensityModel{IntensityModel::Constant{number_member(params, pp, "lambda")}};
        }
        if (form == "sinusoidal") {
            reject_unknown(params, pp, {"base", "amplitude", "period"});
            return IntensityModel{IntensityModel::Sinusoidal{number_member(params, pp, "base"),
                                                             number_member(params, pp, "amplitude"),
                                                             number_member(params, pp, "period")}};
        }
        if (form == "piecewise_linear") {
            reject_unknown(params, pp, {"knots"});
            const auto& knots = member(params, pp, "knots");
            const auto kp = join(pp, "knots");
            if (!knots.is_array()) throw ValidationError(kp, "must be an array");
            IntensityModel::PiecewiseLinear pl;
            for (std::size_t i = 0; i < knots.size(); ++i) {
                const auto here = at_index(kp, i);
                require_object(knots[i], here);
                reject_unknown(knots[i], here, {"t", "rate"});
                pl.knots.emplace_back(number_member(knots[i], here, "t"), number_member(knots[i], here, "rate"));
            }
            return IntensityModel{std::move(pl)};
        }
        throw ValidationError("form",
                              "unknown form '" + form + "' (expected constant, sinusoidal, piecewise_linear)");
    });
}

ServiceTimeModel parse_service(const json& section) {
    const std::string path = "service";
    require_object(section, path);
    const auto form = form_of(section, path);
    const auto params = params_of(section, path);
    const auto pp = join(path, "params");
    return build_in(path, [&] {
        if (form == "exponential") {
            reject_unknown(params, pp, {"rate"});
            return ServiceTimeModel{ServiceTimeModel::Exponential{number_member(params, pp, "rate")}};
        }
        if (form == "weibull") {
            reject_unknown(params, pp, {"shape", "scale"});
            return ServiceTimeModel{
                ServiceTimeModel::Weibull{number_member(params, pp, "shape"), number_member(params, pp, "scale")}};
        }
        if (form == "lognormal") {
            reject_unknown(params, pp, {"mu", "sigma"});
            return ServiceTimeModel{
                ServiceTimeModel::Lognormal{number_member(params, pp, "mu"), number_member(params, pp, "sigma")}};
        }
        if (form == "deterministic") {
            reject_unknown(params, pp, {"w"});
            return ServiceTimeModel{ServiceTimeModel::Deterministic{number_member(params, pp, "w")}};
        }
        if (form == "tabulated") {
            reject_unknown(params, pp, {"grid", "cdf"});
            return ServiceTimeModel{
                ServiceTimeModel::Tabulated{number_list(params, pp, "grid"), number_list(params, pp, "cdf")}};
        }
        throw ValidationError("form", "unknown form '" + form +
                                                      "' (expected exponential, weibull, lognormal, "
                                                      "deterministic, tabulated)");
    });
}

StressDistribution parse_stress(const json& section) {
    const std::string path = "stress";
    require_object(section, path);
    reject_unknown(section, path, {"atoms"});
    const auto& atoms = member(section, path, "atoms");
    const auto ap = join(path, "atoms");
    if (!atoms.is_array()) throw ValidationError(ap, "must be an array");
    std::vector<StressDistribution::Atom> out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const auto here = at_index(ap, i);
        require_object(atoms[i], here);
        reject_unknown(atoms[i], here, {"eta", "p"});
        out.push_back({number_member(atoms[i], here, "eta"), number_member(atoms[i], here, "p")});
    }
    return build_in(path, [&] { return StressDistribution{std::move(out)}; });
}

QuadratureSettings parse_numerics(const json& section) {
    const std::string path = "numerics";
    require_object(section, path);
    reject_unknown(section, path, {"rel_tol", "abs_tol", "max_subdivisions", "tail_abs_tol", "tail_window"});
    QuadratureSettings q;
    if (section.contains("rel_tol")) q.rel_tol = number_member(section, path, "rel_tol");
    if (section.contains("abs_tol")) q.abs_tol = number_member(section, path, "abs_tol");
    if (section.contains("max_subdivisions")) {
        const auto n = unsigned_member(section, path, "max_subdivisions");
        if (n > 100000000) throw ValidationError(join(path, "max_subdivisions"), "is too large");
        q.max_subdivisions = static_cast<int>(n);
    }
    if (section.contains("tail_abs_tol")) q.tail_abs_tol = number_member(section, path, "tail_abs_tol");
    if (section.contains("tail_window")) q.tail_window = number_member(section, path, "tail_window");
    build_in(path, [&] {
        q.validate();
        return 0;
    });
    return q;
}

SimulationSettings parse_simulation(const json& section) {
    const std::string path = "simulation";
    require_object(section, path);
    reject_unknown(section, path, {"n_replicas", "master_seed", "horizon", "cycle_window", "horizon_cap"});
    SimulationSettings sim;
    if (section.contains("n_replicas")) {
        sim.n_replicas = unsigned_member(section, path, "n_replicas");
        if (sim.n_replicas < 100) throw ValidationError(join(path, "n_replicas"), "must be >= 100");
    }
    if (section.contains("master_seed")) sim.master_seed = unsigned_member(section, path, "master_seed");
    if (section.contains("horizon")) {
        const double h = number_member(section, path, "horizon");
        if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError(join(path, "horizon"), "must be finite and > 0");
        sim.horizon = h;
    }
    if (section.contains("cycle_window")) {
        sim.cycle.window = number_member(section, path, "cycle_window");
        if (!(sim.cycle.window > 0.0) || !std::isfinite(sim.cycle.window))
            throw ValidationError(join(path, "cycle_window"), "must be finite and > 0");
    }
    if (section.contains("horizon_cap")) {
        sim.cycle.horizon_cap = number_member(section, path, "horizon_cap");
        if (!(sim.cycle.horizon_cap > 0.0)) throw ValidationError(join(path, "horizon_cap"), "must be > 0");
    }
    return sim;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

json form_json(const char* form, json params) { return {{"form", form}, {"params", std::move(params)}}; }

json baseline_json(const BaselineHazard& b) {
    return std::visit(Overloaded{
                          [](const BaselineHazard::Constant& c) { return form_json("constant", {{"rate", c.rate}}); },
                          [](const BaselineHazard::Weibull& w) {
                              return form_json("weibull", {{"shape", w.shape}, {"scale", w.scale}});
                          },
                          [](const BaselineHazard::PiecewiseConstant& p) {
                              return form_json("piecewise_constant",
                                               {{"breakpoints", p.breakpoints}, {"rates", p.rates}});
                          },
                          [](const BaselineHazard::Tabulated& t) {
                              return form_json("tabulated", {{"grid", t.grid}, {"rates", t.rates}});
                          },
                      },
                      b.form());
}

json intensity_json(const IntensityModel& m) {
    return std::visit(Overloaded{
                          [](const IntensityModel::Constant& c) {
                              return form_json("constant", {{"lambda", c.lambda}});
                          },
                          [](const IntensityModel::Sinusoidal& s) {
                              return form_json("sinusoidal",
                                               {{"base", s.base}, {"amplitude", s.amplitude}, {"period", s.period}});
                          },
                          [](const IntensityModel::PiecewiseLinear& p) {
                              json knots = json::array();
                              for (const auto& [t, r] : p.knots) knots.push_back({{"t", t}, {"rate", r}});
                              return form_json("piecewise_linear", {{"knots", knots}});
                          },
                      },
                      m.form());
}

json service_json(const ServiceTimeModel& s) {
    return std::visit(Overloaded{
                          [](const ServiceTimeModel::Exponential& e) {
                              return form_json("exponential", {{"rate", e.rate}});
                          },
                          [](const ServiceTimeModel::Weibull& w) {
                              return form_json("weibull", {{"shape", w.shape}, {"scale", w.scale}});
                          },
                          [](const ServiceTimeModel::Lognormal& l) {
                              return form_json("lognormal", {{"mu", l.mu}, {"sigma", l.sigma}});
                          },
                          [](const ServiceTimeModel::Deterministic& d) {
                              return form_json("deterministic", {{"w", d.w}});
                          },
                          [](const ServiceTimeModel::Tabulated& t) {
                              return form_json("tabulated", {{"grid", t.grid}, {"cdf", t.cdf}});
                          },
                      },
                      s.form());
}

std::ofstream open_for_write(const std::filesystem::path& destination) {
    std::ofstream out(destination, std::ios::binary);
    if (!out) throw Error("cannot open '" + destination.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& destination) {
    out.flush();
    if (!out) throw Error("failed writing '" + destination.string() + "'");
}

}  // namespace

ScenarioDocument parse_scenario(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + e.what(),
                         line, column);
    }
    require_object(root, "");
    reject_unknown(root, "", {"baseline", "intensity", "service", "stress", "reboot", "numerics", "simulation"});

    auto baseline = parse_baseline(member(root, "", "baseline"));
    auto intensity = parse_intensity(member(root, "", "intensity"));
    auto service = parse_service(member(root, "", "service"));
    auto stress = parse_stress(member(root, "", "stress"));
    const auto& reboot = require_object(member(root, "", "reboot"), "reboot");
    reject_unknown(reboot, "reboot", {"nu"});
    const double nu = number_member(reboot, "reboot", "nu");

    ScenarioDocument doc{Scenario{std::move(baseline), std::move(intensity), std::move(service), std::move(stress), nu},
                         {}, {}};
    if (root.contains("numerics")) doc.numerics = parse_numerics(root["numerics"]);
    if (root.contains("simulation")) doc.simulation = parse_simulation(root["simulation"]);
    return doc;
}

ScenarioDocument load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot read scenario file '" + file.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

json to_json(const ScenarioDocument& doc) {
    const auto& s = doc.scenario;
    json atoms = json::array();
    for (const auto& [eta, p] : s.stress.atoms()) atoms.push_back({{"eta", eta}, {"p", p}});
    json out = {
        {"baseline", baseline_json(s.baseline)},
        {"intensity", intensity_json(s.intensity)},
        {"service", service_json(s.service)},
        {"stress", {{"atoms", atoms}}},
        {"reboot", {{"nu", s.reboot_mean_nu}}},
        {"numerics",
         {{"rel_tol", doc.numerics.rel_tol},
          {"abs_tol", doc.numerics.abs_tol},
          {"max_subdivisions", doc.numerics.max_subdivisions},
          {"tail_abs_tol", doc.numerics.tail_abs_tol},
          {"tail_window", doc.numerics.tail_window}}},
    };
    json sim = {{"n_replicas", doc.simulation.n_replicas},
                {"master_seed", doc.simulation.master_seed},
                {"cycle_window", doc.simulation.cycle.window},
                {"horizon_cap", doc.simulation.cycle.horizon_cap}};
    if (doc.simulation.horizon) sim["horizon"] = *doc.simulation.horizon;
    out["simulation"] = sim;
    return out;
}

std::string serialize_scenario(const ScenarioDocument& doc) { return to_json(doc).dump(2) + "\n"; }

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_curve_csv(const Curve& curve, std::ostream& out) {
    curve.validate();
    out << "t,value\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        out << format_number(curve.grid[i]) << ',' << format_number(curve.values[i]) << '\n';
}

void write_curve_csv(const EmpiricalCurve& curve, std::ostream& out) {
    out << "t,estimate,ci_lo,ci_hi\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i)
        out << format_number(curve.grid[i]) << ',' << format_number(curve.estimates[i]) << ','
            << format_number(curve.ci_lo(i)) << ',' << format_number(curve.ci_hi(i)) << '\n';
}

void write_curve_csv(const Curve& curve, const std::filesystem::path& destination) {
    auto out = open_for_write(destination);
    write_curve_csv(curve, out);
    finish(out, destination);
}

void write_curve_csv(const EmpiricalCurve& curve, const std::filesystem::path& destination) {
    auto out = open_for_write(destination);
    write_curve_csv(curve, out);
    finish(out, destination);
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    if (!std::getline(in, line)) throw Error("read_csv: missing header");
    table.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line)) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') throw Error("read_csv: not a number: '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != table.header.size()) throw Error("read_csv: row width differs from header");
        table.rows.push_back(std::move(row));
    }
    return table;
}

json to_json(const EfficiencyReport& report) {
    return {{"psi", report.psi},
            {"mean_cycle_length", report.mean_cycle_length},
            {"expected_jobs_per_cycle", report.expected_jobs_per_cycle},
            {"nu", report.reboot_mean_nu},
            {"method", "closed_form"},
            {"diverged", report.diverged}};
}

json to_json(const EfficiencyEstimate& est) {
    return {{"psi", est.psi},
            {"mean_cycle_length", est.mean_cycle_length},
            {"expected_jobs_per_cycle", est.mean_completed_jobs},
            {"nu", est.reboot_mean_nu},
            {"method", "simulation"},
            {"ci",
             {{"lo", est.ci_lo}, {"hi", est.ci_hi}, {"std_error", est.std_error}, {"z", est.z},
              {"n_cycles", est.n_cycles}}}};
}

}  // namespace rsbr::io
