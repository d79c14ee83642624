#pragma once

#include <functional>
#include <span>

namespace rsbr::stats {

/// Two-sided one-sample Kolmogorov-Smirnov statistic of `sorted` against a
/// continuous CDF. The sample must be sorted ascending.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// Asymptotic p-value P(D_n > d) with the Stephens small-sample correction.
double ks_p_value(double statistic, std::size_t n);

/// Upper tail P(X > x) of a chi-square variable with `dof` degrees of freedom.
double chi_square_p_value(double x, double dof);

/// Two-sided normal critical value for a confidence level, e.g. 2.5758 for 0.99.
double normal_critical_value(double confidence);

struct RatioEstimate {
    double ratio;
    double std_error;
};

/// Delta-method estimate of sum(num) / (sum(den) + n * offset) for paired
/// i.i.d. observations.
RatioEstimate ratio_of_means(std::span<const double> num, std::span<const double> den, double offset);

}  // namespace rsbr::stats
