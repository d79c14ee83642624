#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rsbr::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,
    /// `validate` found closed-form coverage below the threshold.
    kCoverageBelowThreshold = 2,
};

/// Runs one command line. `args[0]` is the program name. Artifacts go to
/// `--output` or `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Strictly increasing positive grid: `points` values ending at `t_max`,
/// equally spaced ("linear") or geometric from `t_min` ("log").
std::vector<double> make_grid(double t_max, std::size_t points, const std::string& spacing, double t_min = 0.0);

}  // namespace rsbr::cli
