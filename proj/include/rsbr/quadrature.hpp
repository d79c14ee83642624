#pragma once

#include <functional>
#include <span>

namespace rsbr {

struct QuadratureSettings {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;
    /// A window contributing less than this ends an improper integral.
    double tail_abs_tol = 1e-10;
    /// Width of each probe window of an improper integral.
    double tail_window = 50.0;

    /// Throws ValidationError when a field is out of range.
    void validate() const;
    /// Settings for an integral nested inside another: tolerances divided
    /// by `factor`.
    QuadratureSettings tightened(double factor = 10.0) const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod integration over [a, b].
/// Interior `breakpoints` inside (a, b) become initial panel edges.
///
/// Throws ConvergenceError (carrying the best estimate) when the panel
/// budget runs out, and DomainError when `f` returns a non-finite value.
QuadratureResult integrate_with_error(const Integrand& f, double a, double b,
                                      const QuadratureSettings& settings = {},
                                      std::span<const double> breakpoints = {});

double integrate(const Integrand& f, double a, double b, const QuadratureSettings& settings = {},
                 std::span<const double> breakpoints = {});

/// Integral over [0, inf) by consecutive windows of `tail_window`, stopping
/// at the first window whose contribution is below `tail_abs_tol`. Throws
/// DivergenceError after `max_subdivisions` windows without decay.
double integrate_to_infinity(const Integrand& f, const QuadratureSettings& settings = {});

}  // namespace rsbr
