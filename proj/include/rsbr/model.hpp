#pragma once

// Model primitives: baseline hazard, arrival intensity, service-time law,
// per-job stress law, and the scenario that bundles them.
//
// Every family here has an exact cumulative so that numerical error is
// confined to the outer integrals evaluated by closed_form.

#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace rsbr {

/// Baseline hazard r_0(t) of the unloaded server.
///
/// Weibull uses r_0(t) = (shape/scale)(t/scale)^(shape-1), so that
/// R_0(t) = (t/scale)^shape.
class BaselineHazard {
public:
    struct Constant {
        double rate;
    };
    struct Weibull {
        double shape;
        double scale;
    };
    /// `rates[k]` applies on [breakpoints[k-1], breakpoints[k]); the last
    /// rate extends to infinity. rates.size() == breakpoints.size() + 1.
    struct PiecewiseConstant {
        std::vector<double> breakpoints;
        std::vector<double> rates;
    };
    /// Rate interpolated linearly between (grid[k], rates[k]), held at the
    /// last value past the end. grid[0] must be 0.
    struct Tabulated {
        std::vector<double> grid;
        std::vector<double> rates;
    };
    using Form = std::variant<Constant, Weibull, PiecewiseConstant, Tabulated>;

    explicit BaselineHazard(Form form);

    static BaselineHazard constant(double rate) { return BaselineHazard{Constant{rate}}; }
    static BaselineHazard weibull(double shape, double scale) {
        return BaselineHazard{Weibull{shape, scale}};
    }

    double rate(double t) const;
    double cumulative(double t) const;
    /// exp(-R_0(t)).
    double survival(double t) const;
    /// Points where r_0 is not smooth.
    std::vector<double> kinks() const;
    /// True when R_0(t) grows without bound, i.e. failure is certain.
    bool forces_failure() const;

    const Form& form() const noexcept { return form_; }

private:
    Form form_;
};

/// Intensity lambda(t) of the nonhomogeneous Poisson arrival process.
class IntensityModel {
public:
    struct Constant {
        double lambda;
    };
    /// lambda(t) = base + amplitude * sin(2 pi t / period).
    struct Sinusoidal {
        double base;
        double amplitude;
        double period;
    };
    /// Linear between knots, held at the last rate past the end. The first
    /// knot must sit at t = 0.
    struct PiecewiseLinear {
        std::vector<std::pair<double, double>> knots;
    };
    using Form = std::variant<Constant, Sinusoidal, PiecewiseLinear>;

    explicit IntensityModel(Form form);

    static IntensityModel constant(double lambda) { return IntensityModel{Constant{lambda}}; }
    static IntensityModel sinusoidal(double base, double amplitude, double period) {
        return IntensityModel{Sinusoidal{base, amplitude, period}};
    }

    double rate(double t) const;
    /// m(t) = integral of lambda over [0, t].
    double cumulative(double t) const;
    /// An upper bound on lambda over [a, b]; used as the thinning majorant.
    double max_on(double a, double b) const;
    std::vector<double> kinks() const;
    bool identically_zero() const;

    const Form& form() const noexcept { return form_; }

private:
    Form form_;
};

/// Law of the i.i.d. service times W_j.
class ServiceTimeModel {
public:
    struct Exponential {
        double rate;
    };
    struct Weibull {
        double shape;
        double scale;
    };
    struct Lognormal {
        double mu;
        double sigma;
    };
    struct Deterministic {
        double w;
    };
    /// CDF interpolated linearly between (grid[k], cdf[k]); grid[0] = 0 with
    /// cdf 0, last cdf exactly 1.
    struct Tabulated {
        std::vector<double> grid;
        std::vector<double> cdf;
    };
    using Form = std::variant<Exponential, Weibull, Lognormal, Deterministic, Tabulated>;

    explicit ServiceTimeModel(Form form);

    static ServiceTimeModel exponential(double rate) { return ServiceTimeModel{Exponential{rate}}; }

    /// Density g_W. Zero everywhere for the deterministic law, whose mass
    /// sits on `atom()`.
    double pdf(double w) const;
    double cdf(double w) const;
    /// P(W > w), computed directly rather than as 1 - cdf where possible.
    double survival(double w) const;
    /// Inverse CDF for u in (0, 1).
    double quantile(double u) const;
    double mean() const;
    /// Location of the point mass, if the law has one.
    std::optional<double> atom() const;
    std::vector<double> kinks() const;

    const Form& form() const noexcept { return form_; }

private:
    Form form_;
};

/// Finite discrete law of the per-job stress H.
class StressDistribution {
public:
    struct Atom {
        double eta;
        double p;
    };

    explicit StressDistribution(std::vector<Atom> atoms);

    static StressDistribution degenerate(double eta) { return StressDistribution{{{eta, 1.0}}}; }

    /// Sum of p_i f(eta_i).
    template <class F>
    double expect(F&& f) const {
        double total = 0.0;
        for (const auto& atom : atoms_) total += atom.p * f(atom.eta);
        return total;
    }

    double mean() const;
    bool degenerate() const noexcept { return atoms_.size() == 1; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }

private:
    std::vector<Atom> atoms_;
};

struct Scenario {
    Scenario(BaselineHazard baseline, IntensityModel intensity, ServiceTimeModel service,
             StressDistribution stress, double reboot_mean_nu = 0.0);

    BaselineHazard baseline;
    IntensityModel intensity;
    ServiceTimeModel service;
    StressDistribution stress;
    double reboot_mean_nu;

    Scenario with_reboot_mean(double nu) const;
    Scenario with_stress(StressDistribution s) const;
};

double cumulative_intensity(const Scenario& scenario, double t);
double baseline_survival(const Scenario& scenario, double t);
double stress_expect(const StressDistribution& stress, const std::function<double(double)>& f);

}  // namespace rsbr
