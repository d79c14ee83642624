#include "rsbr/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "rsbr/errors.hpp"

namespace rsbr {
namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
// Gauss weights for the nodes kKronrodNodes[1], [3], [5], [7].
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

double checked_eval(const Integrand& f, double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "integrand is not finite (" << y << ") at x = " << x;
        throw DomainError(msg.str());
    }
    return y;
}

// One 15-point Kronrod panel with the QUADPACK error heuristic.
Panel kronrod_panel(const Integrand& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_center = checked_eval(f, center);

    double kronrod = f_center * kKronrodWeights[7];
    double gauss = f_center * kGaussWeights[3];
    double abs_sum = std::abs(kronrod);
    std::array<double, 7> lo{};
    std::array<double, 7> hi{};
    for (std::size_t k = 0; k < 7; ++k) {
        const double dx = half * kKronrodNodes[k];
        lo[k] = checked_eval(f, center - dx);
        hi[k] = checked_eval(f, center + dx);
        kronrod += kKronrodWeights[k] * (lo[k] + hi[k]);
        abs_sum += kKronrodWeights[k] * (std::abs(lo[k]) + std::abs(hi[k]));
        if (k % 2 == 1) gauss += kGaussWeights[k / 2] * (lo[k] + hi[k]);
    }

    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(f_center - mean);
    for (std::size_t k = 0; k < 7; ++k)
        asc += kKronrodWeights[k] * (std::abs(lo[k] - mean) + std::abs(hi[k] - mean));

    const double result = kronrod * half;
    abs_sum *= std::abs(half);
    asc *= std::abs(half);
    double error = std::abs((kronrod - gauss) * half);
    if (asc != 0.0 && error != 0.0) error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) error = std::max(50.0 * eps * abs_sum, error);
    return {a, b, result, error};
}

bool worse(const Panel& x, const Panel& y) { return x.error < y.error; }

double ordered_sum(std::vector<Panel>& panels, double Panel::*field) {
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    double total = 0.0;
    for (const auto& p : panels) total += p.*field;
    return total;
}

}  // namespace

void QuadratureSettings::validate() const {
    if (!(rel_tol > 0.0)) throw ValidationError("rel_tol", "must be > 0");
    if (!(abs_tol > 0.0)) throw ValidationError("abs_tol", "must be > 0");
    if (max_subdivisions < 10) throw ValidationError("max_subdivisions", "must be >= 10");
    if (!(tail_abs_tol > 0.0)) throw ValidationError("tail_abs_tol", "must be > 0");
    if (!(tail_window > 0.0) || !std::isfinite(tail_window))
        throw ValidationError("tail_window", "must be finite and > 0");
}

QuadratureSettings QuadratureSettings::tightened(double factor) const {
    QuadratureSettings out = *this;
    out.rel_tol /= factor;
    out.abs_tol /= factor;
    out.tail_abs_tol /= factor;
    return out;
}

QuadratureResult integrate_with_error(const Integrand& f, double a, double b, const QuadratureSettings& settings,
                                      std::span<const double> breakpoints) {
    if (!(a <= b)) throw DomainError("integrate: lower limit exceeds upper limit");
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate: limits must be finite");
    if (a == b) return {0.0, 0.0, 0};

    std::vector<double> edges{a};
    for (double x : breakpoints)
        if (x > a && x < b) edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<Panel> heap;
    heap.reserve(static_cast<std::size_t>(settings.max_subdivisions) + edges.size());
    double value = 0.0;
    double error = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        heap.push_back(kronrod_panel(f, edges[k], edges[k + 1]));
        value += heap.back().value;
        error += heap.back().error;
    }
    std::make_heap(heap.begin(), heap.end(), worse);

    auto tolerance = [&] { return std::max(settings.rel_tol * std::abs(value), settings.abs_tol); };
    while (error > tolerance()) {
        if (static_cast<int>(heap.size()) >= settings.max_subdivisions) {
            const double best = ordered_sum(heap, &Panel::value);
            const double bound = ordered_sum(heap, &Panel::error);
            std::ostringstream msg;
            msg.precision(17);
            msg << "quadrature did not converge on [" << a << ", " << b << "] within " << settings.max_subdivisions
                << " subdivisions (estimate " << best << ", error bound " << bound << ")";
            throw ConvergenceError(msg.str(), best, bound);
        }
        std::pop_heap(heap.begin(), heap.end(), worse);
        const Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            const double best = value;
            throw ConvergenceError("quadrature panel reached floating-point resolution", best, error);
        }
        const Panel left = kronrod_panel(f, worst.a, mid);
        const Panel right = kronrod_panel(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), worse);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), worse);
    }

    const int panels = static_cast<int>(heap.size());
    const double final_error = ordered_sum(heap, &Panel::error);
    const double final_value = ordered_sum(heap, &Panel::value);
    return {final_value, final_error, panels};
}

double integrate(const Integrand& f, double a, double b, const QuadratureSettings& settings,
                 std::span<const double> breakpoints) {
    return integrate_with_error(f, a, b, settings, breakpoints).value;
}

double integrate_to_infinity(const Integrand& f, const QuadratureSettings& settings) {
    double total = 0.0;
    for (int k = 0; k < settings.max_subdivisions; ++k) {
        const double lo = settings.tail_window * k;
        const double window = integrate(f, lo, lo + settings.tail_window, settings);
        total += window;
        if (std::abs(window) < settings.tail_abs_tol) return total;
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "improper integral shows no decay after " << settings.max_subdivisions << " windows of width "
        << settings.tail_window << " (partial sum " << total << ")";
    throw DivergenceError(msg.str(), total);
}

}  // namespace rsbr
