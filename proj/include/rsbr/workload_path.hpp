#pragma once

#include <vector>

namespace rsbr {

/// One job of a realized workload: arrival time, service time, stress.
struct Job {
    double arrival;
    double service;
    double stress;

    double completion() const noexcept { return arrival + service; }
};

/// A realized trajectory of the workload on [0, horizon], sorted by arrival.
struct WorkloadPath {
    std::vector<Job> jobs;
    double horizon = 0.0;

    /// Throws DomainError unless 0 <= arrival <= horizon, service > 0,
    /// stress >= 0, and arrivals are sorted ascending.
    void validate() const;

    /// Sum over jobs with arrival <= t of stress * min(service, t - arrival).
    double load_integral(double t) const;
    /// Sum of stresses of jobs active at t, i.e. arrival <= t < completion.
    double active_stress(double t) const;
};

}  // namespace rsbr
