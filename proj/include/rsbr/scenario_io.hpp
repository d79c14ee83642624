#pragma once

// Scenario documents (JSON) and result serialization (CSV, JSON).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsbr/closed_form.hpp"
#include "rsbr/model.hpp"
#include "rsbr/quadrature.hpp"
#include "rsbr/simulator.hpp"

namespace rsbr::io {

struct SimulationSettings {
    std::size_t n_replicas = 100000;
    std::uint64_t master_seed = 42;
    std::optional<double> horizon;
    CycleSettings cycle;
};

/// A parsed scenario file: the model plus optional numeric and simulation
/// overrides (defaults applied when omitted).
struct ScenarioDocument {
    Scenario scenario;
    QuadratureSettings numerics;
    SimulationSettings simulation;
};

/// Throws ParseError (with 1-based line/column) on malformed JSON and
/// ValidationError (with the offending field path) on constraint violations.
ScenarioDocument parse_scenario(const std::string& text);
ScenarioDocument load_scenario(const std::filesystem::path& file);

nlohmann::json to_json(const ScenarioDocument& doc);
std::string serialize_scenario(const ScenarioDocument& doc);

/// `%.17g`, the format of every number written to CSV.
std::string format_number(double x);

/// Header `t,value` then one row per grid point.
void write_curve_csv(const Curve& curve, std::ostream& out);
/// Header `t,estimate,ci_lo,ci_hi` then one row per grid point.
void write_curve_csv(const EmpiricalCurve& curve, std::ostream& out);
/// File variants; I/O failures raise Error naming the destination.
void write_curve_csv(const Curve& curve, const std::filesystem::path& destination);
void write_curve_csv(const EmpiricalCurve& curve, const std::filesystem::path& destination);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(std::istream& in);

/// {psi, mean_cycle_length, expected_jobs_per_cycle, nu, method: "closed_form", diverged}
nlohmann::json to_json(const EfficiencyReport& report);
/// Same envelope with method "simulation" and a `ci` object.
nlohmann::json to_json(const EfficiencyEstimate& estimate);

}  // namespace rsbr::io
