#pragma once

// Monte Carlo realization of the workload and failure process. Serves as the
// independent oracle for the closed forms: nothing here calls into
// closed_form.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rsbr/model.hpp"
#include "rsbr/random.hpp"
#include "rsbr/workload_path.hpp"

namespace rsbr {

/// Arrival times on [0, horizon] by thinning against max_on(0, horizon).
std::vector<double> sample_arrivals(const Scenario& s, double horizon, RandomStream& rng);

/// Arrival times on (lo, hi] by thinning against max_on(lo, hi).
std::vector<double> sample_arrivals_between(const Scenario& s, double lo, double hi, RandomStream& rng);

/// Arrival times from exponential gaps. Constant intensity only; throws
/// ModelError otherwise.
std::vector<double> sample_arrivals_by_inversion(const Scenario& s, double horizon, RandomStream& rng);

double sample_service_time(const ServiceTimeModel& service, RandomStream& rng);
double sample_stress(const StressDistribution& stress, RandomStream& rng);

/// Arrivals, then one service time and one stress per job.
WorkloadPath sample_path(const Scenario& s, double horizon, RandomStream& rng);

/// int_0^t B(s) ds = R_0(t) + sum_j H_j (min(t, T_j + W_j) - T_j)^+.
/// Throws DomainError for t outside [0, horizon].
double integrated_breakdown(const Scenario& s, const WorkloadPath& path, double t);

struct FailureSample {
    double time;
    /// True when the failure lies beyond the horizon; `time` is then the horizon.
    bool censored;
};

/// Smallest t with integrated_breakdown(t) >= threshold. Solved exactly on
/// the segment between job events that contains the root, by bisection
/// when the baseline is not constant.
FailureSample failure_time_for_threshold(const Scenario& s, const WorkloadPath& path, double threshold);

/// Failure time by inversion of an Exponential(1) threshold.
FailureSample sample_failure_time(const Scenario& s, const WorkloadPath& path, RandomStream& rng);

struct EmpiricalCurve {
    std::vector<double> grid;
    std::vector<double> estimates;
    std::vector<double> ci_half_widths;
    /// Normal critical value used for the half-widths.
    double z = 0.0;
    std::size_t n_replicas = 0;

    /// Interval edges clipped to [0, 1].
    double ci_lo(std::size_t i) const;
    double ci_hi(std::size_t i) const;
};

/// Fraction of replicas with Y > t at each grid point, with normal
/// approximation intervals at `confidence`. The simulation horizon is the
/// last grid point. Output does not depend on `threads`.
EmpiricalCurve estimate_survival(const Scenario& s, const std::vector<double>& grid, std::size_t n_replicas,
                                 const RngPolicy& policy, unsigned threads = 1, double confidence = 0.99);

struct CycleOutcome {
    double failure_time;
    std::uint64_t completed_jobs;
    /// Arrivals in [0, failure_time].
    std::uint64_t total_arrivals;
};

struct CycleSettings {
    /// Length by which the arrival window is extended until failure.
    double window = 50.0;
    /// Largest simulated time before a cycle is declared divergent.
    double horizon_cap = 1e6;
};

/// One renewal cycle from a fresh start to failure. Never censored; throws
/// DivergenceError past `horizon_cap`.
CycleOutcome simulate_renewal_cycle(const Scenario& s, RandomStream& rng, const CycleSettings& settings = {});

struct EfficiencyEstimate {
    double psi = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double z = 0.0;
    double mean_completed_jobs = 0.0;
    double mean_cycle_length = 0.0;
    double reboot_mean_nu = 0.0;
    std::size_t n_cycles = 0;
};

/// Renewal-reward estimate sum(M_i) / (sum(Y_i) + n nu) with a delta-method
/// interval at `confidence`.
EfficiencyEstimate estimate_efficiency(const Scenario& s, std::size_t n_cycles, const RngPolicy& policy,
                                       unsigned threads = 1, double confidence = 0.99,
                                       const CycleSettings& settings = {});

struct OrderStatisticsReport {
    double statistic = 0.0;
    double p_value = 0.0;
    std::size_t n_points = 0;
    std::size_t retained_paths = 0;
    std::size_t attempted_paths = 0;
    /// Exact P(N(t) = n_condition).
    double acceptance_probability = 0.0;
};

/// Samples arrival paths on [0, t], keeps those with exactly `n_condition`
/// arrivals until `n_samples` are kept, pools every retained arrival time,
/// and runs a KS test against `reference_cdf` (default m(x)/m(t)).
/// Throws InefficiencyError when P(N(t) = n_condition) < 1e-4.
OrderStatisticsReport order_statistics_test(const Scenario& s, double t, std::size_t n_condition,
                                            std::size_t n_samples, const RngPolicy& policy,
                                            std::function<double(double)> reference_cdf = {});

}  // namespace rsbr
