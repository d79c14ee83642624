#include "rsbr/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "rsbr/errors.hpp"

namespace rsbr::stats {

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
    if (sorted.empty()) throw DomainError("ks_statistic: empty sample");
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] < sorted[i - 1]) throw DomainError("ks_statistic: sample is not sorted");
        const double f = cdf(sorted[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_p_value(double statistic, std::size_t n) {
    const double root_n = std::sqrt(static_cast<double>(n));
    const double lambda = (root_n + 0.12 + 0.11 / root_n) * statistic;
    if (lambda < 0.2) return 1.0;
    // Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double chi_square_p_value(double x, double dof) {
    if (!(dof > 0.0)) throw DomainError("chi_square_p_value: degrees of freedom must be > 0");
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

double normal_critical_value(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0, 1)");
    return boost::math::quantile(boost::math::complement(boost::math::normal{}, 0.5 * (1.0 - confidence)));
}

RatioEstimate ratio_of_means(std::span<const double> num, std::span<const double> den, double offset) {
    if (num.size() != den.size() || num.size() < 2) throw DomainError("ratio_of_means: need >= 2 paired samples");
    const auto n = static_cast<double>(num.size());
    double sum_num = 0.0;
    double sum_den = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i) {
        sum_num += num[i];
        sum_den += den[i];
    }
    const double mean_num = sum_num / n;
    const double mean_den = sum_den / n + offset;
    if (!(mean_den > 0.0)) throw DomainError("ratio_of_means: denominator mean must be > 0");
    const double ratio = mean_num / mean_den;
    // Linearized residuals X_i - R (Y_i + offset).
    double ss = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i) {
        const double r = num[i] - ratio * (den[i] + offset);
        ss += r * r;
    }
    const double var = ss / (n - 1.0) / (n * mean_den * mean_den);
    return {ratio, std::sqrt(var)};
}

}  // namespace rsbr::stats
