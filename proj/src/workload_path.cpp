#include "rsbr/workload_path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsbr/errors.hpp"

namespace rsbr {

void WorkloadPath::validate() const {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw DomainError("path horizon must be finite and >= 0");
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const auto& job = jobs[j];
        const auto where = "path job " + std::to_string(j) + ": ";
        if (!(job.arrival >= 0.0 && job.arrival <= horizon))
            throw DomainError(where + "arrival must lie in [0, horizon]");
        if (!(job.service > 0.0)) throw DomainError(where + "service time must be > 0");
        if (!(job.stress >= 0.0) || !std::isfinite(job.stress))
            throw DomainError(where + "stress must be finite and >= 0");
        if (j > 0 && job.arrival < jobs[j - 1].arrival) throw DomainError(where + "arrivals must be sorted");
    }
}

double WorkloadPath::load_integral(double t) const {
    double total = 0.0;
    for (const auto& job : jobs) {
        if (job.arrival > t) break;
        total += job.stress * std::min(job.service, t - job.arrival);
    }
    return total;
}

double WorkloadPath::active_stress(double t) const {
    double total = 0.0;
    for (const auto& job : jobs) {
        if (job.arrival > t) break;
        if (job.service > t - job.arrival) total += job.stress;
    }
    return total;
}

}  // namespace rsbr
