#include "rsbr/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "rsbr/errors.hpp"

namespace rsbr {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& path, const std::string& constraint) {
    if (!ok) throw ValidationError(path, constraint);
}

bool finite(double x) { return std::isfinite(x); }

void require_nonnegative_time(double t) {
    if (!(t >= 0.0)) throw DomainError("time must be nonnegative, got " + std::to_string(t));
}

std::string indexed(const std::string& name, std::size_t i) {
    return name + "[" + std::to_string(i) + "]";
}

void require_grid(const std::vector<double>& grid, const std::string& path, bool starts_at_zero) {
    require(!grid.empty(), path, "must not be empty");
    if (starts_at_zero) require(grid.front() == 0.0, indexed(path, 0), "must be 0");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        require(finite(grid[i]) && grid[i] >= 0.0, indexed(path, i), "must be finite and >= 0");
        if (i > 0) require(grid[i] > grid[i - 1], indexed(path, i), "must be strictly increasing");
    }
}

// Index k with grid[k] <= t < grid[k+1], clamped to the table.
std::size_t segment_of(const std::vector<double>& grid, double t) {
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    if (it == grid.begin()) return 0;
    return static_cast<std::size_t>(it - grid.begin()) - 1;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double t) {
    if (t >= xs.back()) return ys.back();
    const auto k = segment_of(xs, t);
    const double frac = (t - xs[k]) / (xs[k + 1] - xs[k]);
    return ys[k] + frac * (ys[k + 1] - ys[k]);
}

// Exact integral over [0, t] of the linear interpolant, held constant past
// the last node.
double integrate_interpolant(const std::vector<double>& xs, const std::vector<double>& ys, double t) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        if (t <= xs[k]) return total;
        const double hi = std::min(t, xs[k + 1]);
        const double y_hi = interpolate(xs, ys, hi);
        total += 0.5 * (ys[k] + y_hi) * (hi - xs[k]);
        if (t <= xs[k + 1]) return total;
    }
    return total + ys.back() * (t - xs.back());
}

}  // namespace

// ---------------------------------------------------------------------------
// BaselineHazard

BaselineHazard::BaselineHazard(Form form) : form_(std::move(form)) {
    std::visit(Overloaded{
                   [](const Constant& c) {
                       require(finite(c.rate) && c.rate >= 0.0, "params.rate", "must be finite and >= 0");
                   },
                   [](const Weibull& w) {
                       require(finite(w.shape) && w.shape > 0.0, "params.shape", "must be finite and > 0");
                       require(finite(w.scale) && w.scale > 0.0, "params.scale", "must be finite and > 0");
                   },
                   [](const PiecewiseConstant& p) {
                       for (std::size_t i = 0; i < p.breakpoints.size(); ++i) {
                           require(finite(p.breakpoints[i]) && p.breakpoints[i] > 0.0,
                                   indexed("params.breakpoints", i), "must be finite and > 0");
                           if (i > 0)
                               require(p.breakpoints[i] > p.breakpoints[i - 1],
                                       indexed("params.breakpoints", i), "must be strictly increasing");
                       }
                       require(p.rates.size() == p.breakpoints.size() + 1, "params.rates",
                               "length must equal breakpoints length + 1");
                       for (std::size_t i = 0; i < p.rates.size(); ++i)
                           require(finite(p.rates[i]) && p.rates[i] >= 0.0, indexed("params.rates", i),
                                   "must be finite and >= 0");
                   },
                   [](const Tabulated& t) {
                       require_grid(t.grid, "params.grid", true);
                       require(t.rates.size() == t.grid.size(), "params.rates", "length must equal grid length");
                       for (std::size_t i = 0; i < t.rates.size(); ++i)
                           require(finite(t.rates[i]) && t.rates[i] >= 0.0, indexed("params.rates", i),
                                   "must be finite and >= 0");
                   },
               },
               form_);
}

double BaselineHazard::rate(double t) const {
    require_nonnegative_time(t);
    return std::visit(Overloaded{
                          [](const Constant& c) { return c.rate; },
                          [t](const Weibull& w) {
                              return (w.shape / w.scale) * std::pow(t / w.scale, w.shape - 1.0);
                          },
                          [t](const PiecewiseConstant& p) {
                              auto it = std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), t);
                              return p.rates[static_cast<std::size_t>(it - p.breakpoints.begin())];
                          },
                          [t](const Tabulated& tab) { return interpolate(tab.grid, tab.rates, t); },
                      },
                      form_);
}

double BaselineHazard::cumulative(double t) const {
    require_nonnegative_time(t);
    return std::visit(Overloaded{
                          [t](const Constant& c) { return c.rate * t; },
                          [t](const Weibull& w) { return std::pow(t / w.scale, w.shape); },
                          [t](const PiecewiseConstant& p) {
                              double total = 0.0;
                              double lo = 0.0;
                              for (std::size_t k = 0; k < p.breakpoints.size(); ++k) {
                                  if (t <= p.breakpoints[k]) return total + p.rates[k] * (t - lo);
                                  total += p.rates[k] * (p.breakpoints[k] - lo);
                                  lo = p.breakpoints[k];
                              }
                              return total + p.rates.back() * (t - lo);
                          },
                          [t](const Tabulated& tab) { return integrate_interpolant(tab.grid, tab.rates, t); },
                      },
                      form_);
}

double BaselineHazard::survival(double t) const { return std::exp(-cumulative(t)); }

std::vector<double> BaselineHazard::kinks() const {
    return std::visit(Overloaded{
                          [](const Constant&) { return std::vector<double>{}; },
                          [](const Weibull&) { return std::vector<double>{}; },
                          [](const PiecewiseConstant& p) { return p.breakpoints; },
                          [](const Tabulated& tab) { return tab.grid; },
                      },
                      form_);
}

bool BaselineHazard::forces_failure() const {
    return std::visit(Overloaded{
                          [](const Constant& c) { return c.rate > 0.0; },
                          [](const Weibull&) { return true; },
                          [](const PiecewiseConstant& p) { return p.rates.back() > 0.0; },
                          [](const Tabulated& tab) { return tab.rates.back() > 0.0; },
                      },
                      form_);
}

// ---------------------------------------------------------------------------
// IntensityModel

IntensityModel::IntensityModel(Form form) : form_(std::move(form)) {
    std::visit(Overloaded{
                   [](const Constant& c) {
                       require(finite(c.lambda) && c.lambda >= 0.0, "params.lambda", "must be finite and >= 0");
                   },
                   [](const Sinusoidal& s) {
                       require(finite(s.base) && s.base >= 0.0, "params.base", "must be finite and >= 0");
                       require(finite(s.amplitude) && s.amplitude >= 0.0, "params.amplitude",
                               "must be finite and >= 0");
                       require(s.amplitude <= s.base, "params.amplitude", "must not exceed base");
                       require(finite(s.period) && s.period > 0.0, "params.period", "must be finite and > 0");
                   },
                   [](const PiecewiseLinear& p) {
                       require(!p.knots.empty(), "params.knots", "must not be empty");
                       require(p.knots.front().first == 0.0, "params.knots[0].t", "must be 0");
                       for (std::size_t i = 0; i < p.knots.size(); ++i) {
                           const auto [t, rate] = p.knots[i];
                           const auto path = indexed("params.knots", i);
                           require(finite(t), path + ".t", "must be finite");
                           if (i > 0)
                               require(t > p.knots[i - 1].first, path + ".t", "must be strictly increasing");
                           require(finite(rate) && rate >= 0.0, path + ".rate", "must be finite and >= 0");
                       }
                   },
               },
               form_);
}

double IntensityModel::rate(double t) const {
    require_nonnegative_time(t);
    return std::visit(Overloaded{
                          [](const Constant& c) { return c.lambda; },
                          [t](const Sinusoidal& s) {
                              return s.base + s.amplitude * std::sin(2.0 * std::numbers::pi * t / s.period);
                          },
                          [t](const PiecewiseLinear& p) {
                              if (t >= p.knots.back().first) return p.knots.back().second;
                              auto it = std::upper_bound(p.knots.begin(), p.knots.end(), t,
                                                         [](double x, const auto& k) { return x < k.first; });
                              const auto& [t1, r1] = *it;
                              const auto& [t0, r0] = *(it - 1);
                              return r0 + (t - t0) / (t1 - t0) * (r1 - r0);
                          },
                      },
                      form_);
}

double IntensityModel::cumulative(double t) const {
    require_nonnegative_time(t);
    return std::visit(Overloaded{
                          [t](const Constant& c) { return c.lambda * t; },
                          [t](const Sinusoidal& s) {
                              const double omega = 2.0 * std::numbers::pi / s.period;
                              // 1 - cos(x) = 2 sin^2(x/2) avoids cancellation near 0.
                              const double half = std::sin(0.5 * omega * t);
                              return s.base * t + s.amplitude / omega * 2.0 * half * half;
                          },
                          [this, t](const PiecewiseLinear& p) {
                              double total = 0.0;
                              for (std::size_t k = 0; k + 1 < p.knots.size(); ++k) {
                                  const auto [t0, r0] = p.knots[k];
                                  const double hi = std::min(t, p.knots[k + 1].first);
                                  total += 0.5 * (r0 + rate(hi)) * (hi - t0);
                                  if (t <= p.knots[k + 1].first) return total;
                              }
                              return total + p.knots.back().second * (t - p.knots.back().first);
                          },
                      },
                      form_);
}

double IntensityModel::max_on(double a, double b) const {
    require_nonnegative_time(a);
    if (b < a) throw DomainError("max_on: interval end precedes start");
    return std::visit(Overloaded{
                          [](const Constant& c) { return c.lambda; },
                          [](const Sinusoidal& s) { return s.base + s.amplitude; },
                          [this, a, b](const PiecewiseLinear& p) {
                              double best = std::max(rate(a), rate(b));
                              for (const auto& [t, r] : p.knots)
                                  if (t > a && t < b) best = std::max(best, r);
                              return best;
                          },
                      },
                      form_);
}

std::vector<double> IntensityModel::kinks() const {
    if (const auto* p = std::get_if<PiecewiseLinear>(&form_)) {
        std::vector<double> out;
        for (std::size_t k = 1; k < p->knots.size(); ++k) out.push_back(p->knots[k].first);
        return out;
    }
    return {};
}

bool IntensityModel::identically_zero() const {
    return std::visit(Overloaded{
                          [](const Constant& c) { return c.lambda == 0.0; },
                          [](const Sinusoidal& s) { return s.base == 0.0; },
                          [](const PiecewiseLinear& p) {
                              return std::all_of(p.knots.begin(), p.knots.end(),
                                                 [](const auto& k) { return k.second == 0.0; });
                          },
                      },
                      form_);
}

// ---------------------------------------------------------------------------
// ServiceTimeModel

ServiceTimeModel::ServiceTimeModel(Form form) : form_(std::move(form)) {
    std::visit(Overloaded{
                   [](const Exponential& e) {
                       require(finite(e.rate) && e.rate > 0.0, "params.rate", "must be finite and > 0");
                   },
                   [](const Weibull& w) {
                       require(finite(w.shape) && w.shape > 0.0, "params.shape", "must be finite and > 0");
                       require(finite(w.scale) && w.scale > 0.0, "params.scale", "must be finite and > 0");
                   },
                   [](const Lognormal& l) {
                       require(finite(l.mu), "params.mu", "must be finite");
                       require(finite(l.sigma) && l.sigma > 0.0, "params.sigma", "must be finite and > 0");
                   },
                   [](const Deterministic& d) {
                       require(finite(d.w) && d.w > 0.0, "params.w", "must be finite and > 0");
                   },
                   [](const Tabulated& t) {
                       require_grid(t.grid, "params.grid", true);
                       require(t.grid.size() >= 2, "params.grid", "needs at least two nodes");
                       require(t.cdf.size() == t.grid.size(), "params.cdf", "length must equal grid length");
                       require(t.cdf.front() == 0.0, "params.cdf[0]", "must be 0");
                       require(t.cdf.back() == 1.0, indexed("params.cdf", t.cdf.size() - 1), "must be 1");
                       for (std::size_t i = 1; i < t.cdf.size(); ++i)
                           require(t.cdf[i] >= t.cdf[i - 1], indexed("params.cdf", i), "must be nondecreasing");
                   },
               },
               form_);
}

double ServiceTimeModel::pdf(double w) const {
    if (w < 0.0) return 0.0;
    return std::visit(Overloaded{
                          [w](const Exponential& e) { return e.rate * std::exp(-e.rate * w); },
                          [w](const Weibull& wb) {
                              const double z = w / wb.scale;
                              return (wb.shape / wb.scale) * std::pow(z, wb.shape - 1.0) *
                                     std::exp(-std::pow(z, wb.shape));
                          },
                          [w](const Lognormal& l) {
                              if (w == 0.0) return 0.0;
                              const double z = (std::log(w) - l.mu) / l.sigma;
                              return std::exp(-0.5 * z * z) / (w * l.sigma * std::sqrt(2.0 * std::numbers::pi));
                          },
                          [](const Deterministic&) { return 0.0; },
                          [w](const Tabulated& t) {
                              if (w >= t.grid.back()) return 0.0;
                              const auto k = segment_of(t.grid, w);
                              return (t.cdf[k + 1] - t.cdf[k]) / (t.grid[k + 1] - t.grid[k]);
                          },
                      },
                      form_);
}

double ServiceTimeModel::survival(double w) const {
    if (w < 0.0) return 1.0;
    return std::visit(Overloaded{
                          [w](const Exponential& e) { return std::exp(-e.rate * w); },
                          [w](const Weibull& wb) { return std::exp(-std::pow(w / wb.scale, wb.shape)); },
                          [w](const Lognormal& l) {
                              if (w == 0.0) return 1.0;
                              const double z = (std::log(w) - l.mu) / l.sigma;
                              return 0.5 * std::erfc(z / std::numbers::sqrt2);
                          },
                          [w](const Deterministic& d) { return w < d.w ? 1.0 : 0.0; },
                          [w](const Tabulated& t) { return 1.0 - interpolate(t.grid, t.cdf, w); },
                      },
                      form_);
}

double ServiceTimeModel::cdf(double w) const {
    if (w < 0.0) return 0.0;
    return std::visit(Overloaded{
                          [w](const Exponential& e) { return -std::expm1(-e.rate * w); },
                          [w](const Weibull& wb) { return -std::expm1(-std::pow(w / wb.scale, wb.shape)); },
                          [w](const Lognormal& l) {
                              if (w == 0.0) return 0.0;
                              const double z = (std::log(w) - l.mu) / l.sigma;
                              return 0.5 * std::erfc(-z / std::numbers::sqrt2);
                          },
                          [w](const Deterministic& d) { return w < d.w ? 0.0 : 1.0; },
                          [w](const Tabulated& t) { return interpolate(t.grid, t.cdf, w); },
                      },
                      form_);
}

double ServiceTimeModel::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0, 1)");
    return std::visit(Overloaded{
                          [u](const Exponential& e) { return -std::log1p(-u) / e.rate; },
                          [u](const Weibull& wb) { return wb.scale * std::pow(-std::log1p(-u), 1.0 / wb.shape); },
                          [u](const Lognormal& l) {
                              const double z = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
                              return std::exp(l.mu + l.sigma * z);
                          },
                          [](const Deterministic& d) { return d.w; },
                          [u](const Tabulated& t) {
                              auto it = std::lower_bound(t.cdf.begin(), t.cdf.end(), u);
                              const auto k = static_cast<std::size_t>(it - t.cdf.begin());
                              const double frac = (u - t.cdf[k - 1]) / (t.cdf[k] - t.cdf[k - 1]);
                              return t.grid[k - 1] + frac * (t.grid[k] - t.grid[k - 1]);
                          },
                      },
                      form_);
}

double ServiceTimeModel::mean() const {
    return std::visit(Overloaded{
                          [](const Exponential& e) { return 1.0 / e.rate; },
                          [](const Weibull& wb) { return wb.scale * std::tgamma(1.0 + 1.0 / wb.shape); },
                          [](const Lognormal& l) { return std::exp(l.mu + 0.5 * l.sigma * l.sigma); },
                          [](const Deterministic& d) { return d.w; },
                          [](const Tabulated& t) {
                              double total = 0.0;
                              for (std::size_t k = 0; k + 1 < t.grid.size(); ++k)
                                  total += (t.cdf[k + 1] - t.cdf[k]) * 0.5 * (t.grid[k] + t.grid[k + 1]);
                              return total;
                          },
                      },
                      form_);
}

std::optional<double> ServiceTimeModel::atom() const {
    if (const auto* d = std::get_if<Deterministic>(&form_)) return d->w;
    return std::nullopt;
}

std::vector<double> ServiceTimeModel::kinks() const {
    if (const auto* d = std::get_if<Deterministic>(&form_)) return {d->w};
    if (const auto* t = std::get_if<Tabulated>(&form_)) return t->grid;
    return {};
}

// ---------------------------------------------------------------------------
// StressDistribution

StressDistribution::StressDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    require(!atoms_.empty(), "atoms", "must contain at least one atom");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const auto path = indexed("atoms", i);
        require(finite(atoms_[i].eta) && atoms_[i].eta >= 0.0, path + ".eta", "must be finite and >= 0");
        require(finite(atoms_[i].p) && atoms_[i].p > 0.0, path + ".p", "must be finite and > 0");
        for (std::size_t j = 0; j < i; ++j)
            require(atoms_[j].eta != atoms_[i].eta, path + ".eta",
                    "duplicates atoms[" + std::to_string(j) + "].eta");
        total += atoms_[i].p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", total);
        throw ValidationError("atoms", std::string("probabilities sum to ") + buf + ", expected 1");
    }
}

double StressDistribution::mean() const {
    return expect([](double eta) { return eta; });
}

// ---------------------------------------------------------------------------
// Scenario

Scenario::Scenario(BaselineHazard baseline_, IntensityModel intensity_, ServiceTimeModel service_,
                   StressDistribution stress_, double nu)
    : baseline(std::move(baseline_)),
      intensity(std::move(intensity_)),
      service(std::move(service_)),
      stress(std::move(stress_)),
      reboot_mean_nu(nu) {
    require(finite(nu) && nu >= 0.0, "reboot.nu", "must be finite and >= 0");
}

Scenario Scenario::with_reboot_mean(double nu) const {
    return {baseline, intensity, service, stress, nu};
}

Scenario Scenario::with_stress(StressDistribution s) const {
    return {baseline, intensity, service, std::move(s), reboot_mean_nu};
}

double cumulative_intensity(const Scenario& scenario, double t) { return scenario.intensity.cumulative(t); }

double baseline_survival(const Scenario& scenario, double t) { return scenario.baseline.survival(t); }

double stress_expect(const StressDistribution& stress, const std::function<double(double)>& f) {
    return stress.expect(f);
}

}  // namespace rsbr
