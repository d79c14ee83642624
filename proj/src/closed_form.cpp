#include "rsbr/closed_form.hpp"

#include <cmath>
#include <string>

#include "rsbr/errors.hpp"

namespace rsbr {
namespace {

void require_time(double t, const char* op) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError(std::string(op) + ": time must be finite and >= 0, got " + std::to_string(t));
}

// Panel edges for an integrand in the service-time variable w on [0, t]
// that depends on the intensity through t - w.
std::vector<double> service_variable_breaks(const Scenario& s, double t) {
    std::vector<double> out = s.service.kinks();
    for (double k : s.intensity.kinks()) out.push_back(t - k);
    return out;
}

// Same, for an integrand in the arrival variable r with service age t - r.
std::vector<double> arrival_variable_breaks(const Scenario& s, double t) {
    std::vector<double> out = s.intensity.kinks();
    for (double k : s.service.kinks()) out.push_back(t - k);
    return out;
}

// int_0^t e^{-eta w} m(t - w) Gbar(w) dw
double exposure_integral(const Scenario& s, double t, double eta, const QuadratureSettings& q) {
    const auto breaks = service_variable_breaks(s, t);
    return integrate(
        [&](double w) { return std::exp(-eta * w) * s.intensity.cumulative(t - w) * s.service.survival(w); }, 0.0,
        t, q, breaks);
}

// int_0^t e^{-eta w} lambda(t - w) Gbar(w) dw
double exposure_rate_integral(const Scenario& s, double t, double eta, const QuadratureSettings& q) {
    const auto breaks = service_variable_breaks(s, t);
    return integrate([&](double w) { return std::exp(-eta * w) * s.intensity.rate(t - w) * s.service.survival(w); },
                     0.0, t, q, breaks);
}

struct CycleTerms {
    double survival;
    double mean_a;
    double mean_stress_b;
    double mean_stress_a_b;
};

CycleTerms cycle_terms(const Scenario& s, double t, const QuadratureSettings& q) {
    CycleTerms terms{0.0, 0.0, 0.0, 0.0};
    double exposure = 0.0;
    for (const auto& [eta, p] : s.stress.atoms()) {
        const double a = a_func(s, t, eta, q);
        const double b = b_func(s, t, eta, q);
        exposure += p * (t == 0.0 || eta == 0.0 ? 0.0 : eta * exposure_integral(s, t, eta, q));
        terms.mean_a += p * a;
        terms.mean_stress_b += p * eta * b;
        terms.mean_stress_a_b += p * eta * a * b;
    }
    terms.survival = s.baseline.survival(t) * std::exp(-exposure);
    return terms;
}

template <class JobsIntegrand>
EfficiencyReport efficiency_with(const Scenario& s, const QuadratureSettings& q, JobsIntegrand&& jobs) {
    EfficiencyReport report;
    report.reboot_mean_nu = s.reboot_mean_nu;
    try {
        report.mean_cycle_length = mean_cycle_length(s, q);
        report.expected_jobs_per_cycle = jobs(s, q);
    } catch (const DivergenceError&) {
        report.diverged = true;
        report.psi = 0.0;
        return report;
    }
    report.psi = report.expected_jobs_per_cycle / (report.mean_cycle_length + report.reboot_mean_nu);
    return report;
}

}  // namespace

void Curve::validate() const {
    if (grid.size() != values.size()) throw DomainError("curve grid and values differ in length");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw DomainError("curve grid must be strictly increasing");
    if (kind == CurveKind::survival) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!(values[i] >= 0.0 && values[i] <= 1.0)) throw DomainError("survival values must lie in [0, 1]");
            if (grid[i] == 0.0 && values[i] != 1.0) throw DomainError("survival at t = 0 must equal 1");
            if (i > 0 && values[i] > values[i - 1]) throw DomainError("survival values must be nonincreasing");
        }
    } else if (kind == CurveKind::hazard) {
        for (double v : values)
            if (!(v >= 0.0)) throw DomainError("hazard values must be >= 0");
    }
}

double inner_exposure(const Scenario& s, double t, double eta, const QuadratureSettings& q) {
    require_time(t, "inner_exposure");
    if (!(eta >= 0.0)) throw DomainError("inner_exposure: stress must be >= 0");
    if (t == 0.0 || eta == 0.0) return 0.0;
    return eta * exposure_integral(s, t, eta, q);
}

double total_exposure(const Scenario& s, double t, const QuadratureSettings& q) {
    require_time(t, "total_exposure");
    return s.stress.expect([&](double eta) { return inner_exposure(s, t, eta, q); });
}

double survival(const Scenario& s, double t, const QuadratureSettings& q) {
    require_time(t, "survival");
    return s.baseline.survival(t) * std::exp(-total_exposure(s, t, q));
}

double hazard(const Scenario& s, double t, const QuadratureSettings& q) {
    require_time(t, "hazard");
    const double base = s.baseline.rate(t);
    if (t == 0.0) return base;
    return base + s.stress.expect([&](double eta) {
        return eta == 0.0 ? 0.0 : eta * exposure_rate_integral(s, t, eta, q);
    });
}

double hazard_printed_form(const Scenario& s, double t, const QuadratureSettings& q) {
    require_time(t, "hazard_printed_form");
    return s.baseline.rate(t) + total_exposure(s, t, q);
}

Curve survival_curve(const Scenario& s, const std::vector<double>& grid, const QuadratureSettings& q) {
    Curve curve{grid, {}, CurveKind::survival};
    curve.values.reserve(grid.size());
    for (double t : grid) curve.values.push_back(survival(s, t, q));
    return curve;
}

Curve hazard_curve(const Scenario& s, const std::vector<double>& grid, const QuadratureSettings& q) {
    Curve curve{grid, {}, CurveKind::hazard};
    curve.values.reserve(grid.size());
    for (double t : grid) curve.values.push_back(hazard(s, t, q));
    return curve;
}

double conditional_survival_given_path(const Scenario& s, const WorkloadPath& path, double t) {
    path.validate();
    require_time(t, "conditional_survival_given_path");
    if (t > path.horizon) throw DomainError("conditional_survival_given_path: t exceeds the path horizon");
    return s.baseline.survival(t) * std::exp(-path.load_integral(t));
}

double conditional_failure_density(const Scenario& s, const WorkloadPath& path, double t) {
    path.validate();
    require_time(t, "conditional_failure_density");
    if (t > path.horizon) throw DomainError("conditional_failure_density: t exceeds the path horizon");
    const double exponent = s.baseline.cumulative(t) + path.load_integral(t);
    return std::exp(-exponent) * (s.baseline.rate(t) + path.active_stress(t));
}

double single_job_factor(const Scenario& s, double t, double eta, const QuadratureSettings& q) {
    require_time(t, "single_job_factor");
    const double m = s.intensity.cumulative(t);
    if (!(m > 0.0)) throw DomainError("single_job_factor: m(t) = 0, the arrival-time law is undefined");
    return 1.0 - inner_exposure(s, t, eta, q) / m;
}

double a_func(const Scenario& s, double t, double eta, const QuadratureSettings& q) {
    require_time(t, "a_func");
    if (t == 0.0) return 0.0;
    if (const auto w = s.service.atom()) {
        return *w <= t ? std::exp(-eta * *w) * s.intensity.cumulative(t - *w) : 0.0;
    }
    const auto breaks = service_variable_breaks(s, t);
    return integrate([&](double v) { return std::exp(-eta * v) * s.service.pdf(v) * s.intensity.cumulative(t - v); },
                     0.0, t, q, breaks);
}

double b_func(const Scenario& s, double t, double eta, const QuadratureSettings& q) {
    require_time(t, "b_func");
    if (t == 0.0) return 0.0;
    const auto breaks = arrival_variable_breaks(s, t);
    return integrate(
        [&](double r) { return std::exp(-eta * (t - r)) * s.service.survival(t - r) * s.intensity.rate(r); }, 0.0, t,
        q, breaks);
}

double mean_cycle_length(const Scenario& s, const QuadratureSettings& q) {
    const auto inner = q.tightened();
    return integrate_to_infinity([&](double t) { return survival(s, t, inner); }, q);
}

double expected_jobs_per_cycle(const Scenario& s, const QuadratureSettings& q) {
    if (s.intensity.identically_zero()) return 0.0;
    const auto inner = q.tightened();
    return integrate_to_infinity(
        [&](double t) {
            const auto terms = cycle_terms(s, t, inner);
            return terms.survival * terms.mean_a * (s.baseline.rate(t) + terms.mean_stress_b);
        },
        q);
}

double expected_jobs_per_cycle_printed_form(const Scenario& s, const QuadratureSettings& q) {
    if (s.intensity.identically_zero()) return 0.0;
    const auto inner = q.tightened();
    return integrate_to_infinity(
        [&](double t) {
            const auto terms = cycle_terms(s, t, inner);
            return terms.survival * (s.baseline.rate(t) * terms.mean_a + terms.mean_stress_a_b);
        },
        q);
}

EfficiencyReport efficiency(const Scenario& s, const QuadratureSettings& q) {
    return efficiency_with(s, q, [](const Scenario& sc, const QuadratureSettings& qs) {
        return expected_jobs_per_cycle(sc, qs);
    });
}

EfficiencyReport efficiency_printed_form(const Scenario& s, const QuadratureSettings& q) {
    return efficiency_with(s, q, [](const Scenario& sc, const QuadratureSettings& qs) {
        return expected_jobs_per_cycle_printed_form(sc, qs);
    });
}

}  // namespace rsbr
