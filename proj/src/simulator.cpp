#include "rsbr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <variant>

#include "rsbr/errors.hpp"
#include "rsbr/parallel.hpp"
#include "rsbr/stats.hpp"

namespace rsbr {
namespace {

struct JobEvent {
    double time;
    double delta;
    int count_delta;
};

double constant_baseline_rate(const BaselineHazard& baseline, bool& is_constant) {
    if (const auto* c = std::get_if<BaselineHazard::Constant>(&baseline.form())) {
        is_constant = true;
        return c->rate;
    }
    is_constant = false;
    return 0.0;
}

// Root of R_0(x) + offset + slope (x - lo) = threshold on [lo, hi], where the
// left side is nondecreasing and brackets the threshold.
double solve_segment(const BaselineHazard& baseline, double lo, double hi, double offset, double slope,
                     double threshold) {
    bool is_constant = false;
    const double rate = constant_baseline_rate(baseline, is_constant);
    if (is_constant) {
        const double total_slope = rate + slope;
        const double base = rate * lo + offset;
        if (total_slope <= 0.0) return lo;
        return std::clamp(lo + (threshold - base) / total_slope, lo, hi);
    }
    const double start = lo;
    auto value = [&](double x) { return baseline.cumulative(x) + offset + slope * (x - start); };
    for (int iter = 0; iter < 400 && hi - lo > 1e-12; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (value(mid) >= threshold)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

void require_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw DomainError("estimate_survival: grid must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i]))
            throw DomainError("estimate_survival: grid points must be finite and > 0");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw DomainError("estimate_survival: grid must be strictly increasing");
    }
}

}  // namespace

std::vector<double> sample_arrivals_between(const Scenario& s, double lo, double hi, RandomStream& rng) {
    if (!(hi > lo)) throw DomainError("sample_arrivals: window must have positive length");
    const double majorant = s.intensity.max_on(lo, hi);
    std::vector<double> times;
    if (majorant <= 0.0) {
        for (double x : {lo, 0.5 * (lo + hi), hi})
            if (s.intensity.rate(x) > 0.0)
                throw ModelError("sample_arrivals: intensity majorant is 0 on a window where intensity is positive");
        return times;
    }
    double t = lo;
    while (true) {
        t += rng.exponential() / majorant;
        if (t > hi) break;
        const double rate = s.intensity.rate(t);
        if (rate > majorant * (1.0 + 1e-12)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "sample_arrivals: intensity " << rate << " at t = " << t << " exceeds its majorant " << majorant;
            throw ModelError(msg.str());
        }
        if (rng.uniform() * majorant < rate) times.push_back(t);
    }
    return times;
}

std::vector<double> sample_arrivals(const Scenario& s, double horizon, RandomStream& rng) {
    if (!(horizon > 0.0)) throw DomainError("sample_arrivals: horizon must be > 0");
    return sample_arrivals_between(s, 0.0, horizon, rng);
}

std::vector<double> sample_arrivals_by_inversion(const Scenario& s, double horizon, RandomStream& rng) {
    if (!(horizon > 0.0)) throw DomainError("sample_arrivals_by_inversion: horizon must be > 0");
    const auto* c = std::get_if<IntensityModel::Constant>(&s.intensity.form());
    if (c == nullptr) throw ModelError("sample_arrivals_by_inversion: only constant intensity is supported");
    std::vector<double> times;
    if (c->lambda == 0.0) return times;
    double t = 0.0;
    while (true) {
        t += rng.exponential() / c->lambda;
        if (t > horizon) break;
        times.push_back(t);
    }
    return times;
}

double sample_service_time(const ServiceTimeModel& service, RandomStream& rng) {
    if (const auto* l = std::get_if<ServiceTimeModel::Lognormal>(&service.form()))
        return std::exp(l->mu + l->sigma * rng.normal());
    if (const auto w = service.atom()) return *w;
    return service.quantile(rng.uniform());
}

double sample_stress(const StressDistribution& stress, RandomStream& rng) {
    const auto& atoms = stress.atoms();
    if (atoms.size() == 1) return atoms.front().eta;
    const double u = rng.uniform();
    double cumulative = 0.0;
    for (const auto& atom : atoms) {
        cumulative += atom.p;
        if (u < cumulative) return atom.eta;
    }
    return atoms.back().eta;
}

WorkloadPath sample_path(const Scenario& s, double horizon, RandomStream& rng) {
    WorkloadPath path;
    path.horizon = horizon;
    const auto arrivals = sample_arrivals(s, horizon, rng);
    path.jobs.reserve(arrivals.size());
    for (double t : arrivals) {
        const double w = sample_service_time(s.service, rng);
        const double h = sample_stress(s.stress, rng);
        path.jobs.push_back({t, w, h});
    }
    return path;
}

double integrated_breakdown(const Scenario& s, const WorkloadPath& path, double t) {
    if (!(t >= 0.0)) throw DomainError("integrated_breakdown: t must be >= 0");
    if (t > path.horizon) throw DomainError("integrated_breakdown: t exceeds the path horizon");
    return s.baseline.cumulative(t) + path.load_integral(t);
}

FailureSample failure_time_for_threshold(const Scenario& s, const WorkloadPath& path, double threshold) {
    path.validate();
    if (!(threshold > 0.0)) return {0.0, false};

    std::vector<JobEvent> events;
    events.reserve(2 * path.jobs.size());
    for (const auto& job : path.jobs) {
        events.push_back({job.arrival, job.stress, 1});
        if (job.completion() < path.horizon) events.push_back({job.completion(), -job.stress, -1});
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const JobEvent& x, const JobEvent& y) { return x.time < y.time; });

    double cursor = 0.0;
    double load = 0.0;
    double active = 0.0;
    int active_jobs = 0;
    auto crosses = [&](double end) { return s.baseline.cumulative(end) + load + active * (end - cursor) >= threshold; };

    std::size_t k = 0;
    while (k < events.size()) {
        const double next = events[k].time;
        if (next > cursor) {
            if (crosses(next)) return {solve_segment(s.baseline, cursor, next, load, active, threshold), false};
            load += active * (next - cursor);
            cursor = next;
        }
        for (; k < events.size() && events[k].time == next; ++k) {
            active += events[k].delta;
            active_jobs += events[k].count_delta;
        }
        if (active_jobs == 0) active = 0.0;
        active = std::max(active, 0.0);
    }
    if (path.horizon > cursor && crosses(path.horizon))
        return {solve_segment(s.baseline, cursor, path.horizon, load, active, threshold), false};
    return {path.horizon, true};
}

FailureSample sample_failure_time(const Scenario& s, const WorkloadPath& path, RandomStream& rng) {
    return failure_time_for_threshold(s, path, rng.exponential());
}

double EmpiricalCurve::ci_lo(std::size_t i) const { return std::max(0.0, estimates.at(i) - ci_half_widths.at(i)); }

double EmpiricalCurve::ci_hi(std::size_t i) const { return std::min(1.0, estimates.at(i) + ci_half_widths.at(i)); }

EmpiricalCurve estimate_survival(const Scenario& s, const std::vector<double>& grid, std::size_t n_replicas,
                                 const RngPolicy& policy, unsigned threads, double confidence) {
    require_grid(grid);
    if (n_replicas < 100) throw DomainError("estimate_survival: n_replicas must be >= 100");
    const double horizon = grid.back();

    // Per replica: number of grid points t with Y > t.
    std::vector<std::size_t> survived_to(n_replicas);
    parallel_for(n_replicas, threads, [&](std::size_t i) {
        auto rng = policy.stream_for(i);
        const auto path = sample_path(s, horizon, rng);
        const auto failure = sample_failure_time(s, path, rng);
        if (failure.censored) {
            survived_to[i] = grid.size();
        } else {
            survived_to[i] =
                static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), failure.time) - grid.begin());
        }
    });

    std::vector<std::size_t> ends(grid.size() + 1, 0);
    for (std::size_t i = 0; i < n_replicas; ++i) ++ends[survived_to[i]];

    EmpiricalCurve curve;
    curve.grid = grid;
    curve.n_replicas = n_replicas;
    curve.z = stats::normal_critical_value(confidence);
    const auto n = static_cast<double>(n_replicas);
    std::size_t alive = n_replicas;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        alive -= ends[g];
        const double p = static_cast<double>(alive) / n;
        curve.estimates.push_back(p);
        curve.ci_half_widths.push_back(curve.z * std::sqrt(p * (1.0 - p) / n));
    }
    return curve;
}

CycleOutcome simulate_renewal_cycle(const Scenario& s, RandomStream& rng, const CycleSettings& settings) {
    if (!(settings.window > 0.0)) throw DomainError("simulate_renewal_cycle: window must be > 0");
    const double threshold = rng.exponential();
    WorkloadPath path;
    while (true) {
        const double lo = path.horizon;
        const double hi = lo + settings.window;
        if (hi > settings.horizon_cap) {
            std::ostringstream msg;
            msg << "renewal cycle did not fail before the horizon cap " << settings.horizon_cap;
            throw DivergenceError(msg.str(), lo);
        }
        for (double t : sample_arrivals_between(s, lo, hi, rng)) {
            const double w = sample_service_time(s.service, rng);
            const double h = sample_stress(s.stress, rng);
            path.jobs.push_back({t, w, h});
        }
        path.horizon = hi;
        const auto failure = failure_time_for_threshold(s, path, threshold);
        if (failure.censored) continue;

        CycleOutcome out{failure.time, 0, 0};
        for (const auto& job : path.jobs) {
            if (job.arrival > failure.time) break;
            ++out.total_arrivals;
            if (job.completion() <= failure.time) ++out.completed_jobs;
        }
        return out;
    }
}

EfficiencyEstimate estimate_efficiency(const Scenario& s, std::size_t n_cycles, const RngPolicy& policy,
                                       unsigned threads, double confidence, const CycleSettings& settings) {
    if (n_cycles < 100) throw DomainError("estimate_efficiency: n_cycles must be >= 100");
    std::vector<double> jobs(n_cycles);
    std::vector<double> lengths(n_cycles);
    parallel_for(n_cycles, threads, [&](std::size_t i) {
        auto rng = policy.stream_for(i);
        const auto cycle = simulate_renewal_cycle(s, rng, settings);
        jobs[i] = static_cast<double>(cycle.completed_jobs);
        lengths[i] = cycle.failure_time;
    });

    const auto ratio = stats::ratio_of_means(jobs, lengths, s.reboot_mean_nu);
    EfficiencyEstimate est;
    est.psi = ratio.ratio;
    est.std_error = ratio.std_error;
    est.z = stats::normal_critical_value(confidence);
    est.ci_lo = est.psi - est.z * est.std_error;
    est.ci_hi = est.psi + est.z * est.std_error;
    est.n_cycles = n_cycles;
    est.reboot_mean_nu = s.reboot_mean_nu;
    double sum_jobs = 0.0;
    double sum_len = 0.0;
    for (std::size_t i = 0; i < n_cycles; ++i) {
        sum_jobs += jobs[i];
        sum_len += lengths[i];
    }
    est.mean_completed_jobs = sum_jobs / static_cast<double>(n_cycles);
    est.mean_cycle_length = sum_len / static_cast<double>(n_cycles);
    return est;
}

OrderStatisticsReport order_statistics_test(const Scenario& s, double t, std::size_t n_condition,
                                            std::size_t n_samples, const RngPolicy& policy,
                                            std::function<double(double)> reference_cdf) {
    if (!(t > 0.0)) throw DomainError("order_statistics_test: t must be > 0");
    if (n_condition == 0 || n_samples == 0)
        throw DomainError("order_statistics_test: n_condition and n_samples must be > 0");
    const double m = s.intensity.cumulative(t);
    if (!(m > 0.0)) throw DomainError("order_statistics_test: m(t) must be > 0");
    const auto n = static_cast<double>(n_condition);
    const double acceptance = std::exp(-m + n * std::log(m) - std::lgamma(n + 1.0));
    if (acceptance < 1e-4) {
        std::ostringstream msg;
        msg << "order_statistics_test: P(N(t) = " << n_condition << ") = " << acceptance
            << " is below 1e-4; choose n_condition near m(t) = " << m;
        throw InefficiencyError(msg.str());
    }
    if (!reference_cdf) reference_cdf = [&s, m](double x) { return s.intensity.cumulative(x) / m; };

    OrderStatisticsReport report;
    report.acceptance_probability = acceptance;
    std::vector<double> pooled;
    pooled.reserve(n_condition * n_samples);
    std::uint64_t index = 0;
    while (report.retained_paths < n_samples) {
        auto rng = policy.stream_for(index++);
        const auto times = sample_arrivals(s, t, rng);
        ++report.attempted_paths;
        if (times.size() != n_condition) continue;
        pooled.insert(pooled.end(), times.begin(), times.end());
        ++report.retained_paths;
    }
    std::sort(pooled.begin(), pooled.end());
    report.n_points = pooled.size();
    report.statistic = stats::ks_statistic(pooled, reference_cdf);
    report.p_value = stats::ks_p_value(report.statistic, pooled.size());
    return report;
}

}  // namespace rsbr
