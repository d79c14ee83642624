#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "../oracles.hpp"
#include "rsbr/canonical.hpp"
#include "rsbr/closed_form.hpp"
#include "rsbr/errors.hpp"

using namespace rsbr;

namespace {

const oracle::ConstantExponentialCase kS1{0.01, 2.0, 1.0, 0.05};

Scenario no_arrivals() {
    return Scenario{BaselineHazard::constant(0.01), IntensityModel::constant(0.0), ServiceTimeModel::exponential(1.0),
                    StressDistribution::degenerate(0.05), 1.0};
}

Scenario random_scenario(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<BaselineHazard> b{BaselineHazard::constant(0.005 + 0.03 * u(gen)),
                                  BaselineHazard::weibull(1.0 + 2.0 * u(gen), 10.0 + 30.0 * u(gen))};
    std::vector<IntensityModel> l{IntensityModel::constant(0.5 + 2.0 * u(gen)),
                                  IntensityModel::sinusoidal(2.0, 2.0 * u(gen), 3.0 + 10.0 * u(gen))};
    std::vector<ServiceTimeModel> w{ServiceTimeModel::exponential(0.5 + u(gen)),
                                    ServiceTimeModel{ServiceTimeModel::Lognormal{-0.5, 0.3 + u(gen)}},
                                    ServiceTimeModel{ServiceTimeModel::Weibull{0.8 + u(gen), 1.0 + u(gen)}}};
    const double p = 0.2 + 0.6 * u(gen);
    StressDistribution h{{{0.1 * u(gen), p}, {0.1 + 0.1 * u(gen), 1.0 - p}}};
    return Scenario{b[gen() % b.size()], l[gen() % l.size()], w[gen() % w.size()], h, 1.0};
}

std::vector<double> grid20() {
    std::vector<double> g;
    for (int i = 1; i <= 20; ++i) g.push_back(i);
    return g;
}

}  // namespace

TEST_CASE("inner exposure: boundary cases and the constant-exponential closed form") {
    const auto s = canonical::s1();
    CHECK(inner_exposure(s, 7.0, 0.0) == 0.0);
    CHECK(inner_exposure(s, 0.0, 0.3) == 0.0);
    CHECK(inner_exposure(s, 10.0, 0.05) == doctest::Approx(kS1.exposure(10.0)).epsilon(1e-9));
    CHECK(inner_exposure(s, 10.0, 0.05) == doctest::Approx(0.86168).epsilon(1e-5));
    for (int i = 1; i <= 50; ++i) {
        const double t = 20.0 * i / 50.0;
        CHECK(inner_exposure(s, t, 0.05) == doctest::Approx(kS1.exposure(t)).epsilon(1e-9));
    }
}

TEST_CASE("survival: examples") {
    const auto s = canonical::s1();
    CHECK(survival(s, 0.0) == 1.0);
    CHECK(survival(s, 10.0) == doctest::Approx(std::exp(-0.1 - 0.86168)).epsilon(1e-5));
    CHECK(survival(s, 10.0) == doctest::Approx(0.3823).epsilon(1e-4));
    const auto zero = s.with_stress(StressDistribution::degenerate(0.0));
    CHECK(survival(zero, 10.0) == doctest::Approx(std::exp(-0.1)).epsilon(1e-15));
    const auto quiet = no_arrivals();
    for (double t : {1.0, 5.0, 30.0}) CHECK(survival(quiet, t) == baseline_survival(quiet, t));
}

TEST_CASE("hazard: examples and the derivative identity") {
    const auto s = canonical::s1();
    CHECK(hazard(s, 0.0) == 0.01);
    CHECK(hazard(s, 10.0) == doctest::Approx(kS1.hazard(10.0)).epsilon(1e-9));
    CHECK(hazard(s, 10.0) == doctest::Approx(0.10521).epsilon(1e-3));
    for (const auto& name : canonical::names()) {
        const auto sc = *canonical::by_name(name);
        CHECK(hazard(sc, 0.0) == sc.baseline.rate(0.0));
        for (double t : {0.5, 3.3, 11.0, 27.0, 50.0}) {
            const double h = 1e-4;
            const double fd = -(std::log(survival(sc, t + h)) - std::log(survival(sc, t - h))) / (2.0 * h);
            INFO(name << " t=" << t);
            CHECK(hazard(sc, t) == doctest::Approx(fd).epsilon(1e-4));
            CHECK(hazard(sc, t) >= sc.baseline.rate(t));
        }
    }
}

TEST_CASE("hazard printed form is not the derivative of -ln S") {
    const auto s = canonical::s1();
    const double truth = hazard(s, 10.0);
    const double printed = hazard_printed_form(s, 10.0);
    CHECK(std::abs(printed - truth) / truth > 0.1);
}

TEST_CASE("survival and hazard curves carry their kind and satisfy its invariants") {
    for (const auto& name : canonical::names()) {
        const auto sc = *canonical::by_name(name);
        auto g = grid20();
        g.insert(g.begin(), 0.0);
        const auto sv = survival_curve(sc, g);
        CHECK(sv.kind == CurveKind::survival);
        CHECK_NOTHROW(sv.validate());
        CHECK(sv.values.front() == 1.0);
        const auto hz = hazard_curve(sc, g);
        CHECK(hz.kind == CurveKind::hazard);
        CHECK_NOTHROW(hz.validate());
    }
    Curve bad{{0.0, 1.0}, {1.0, 1.2}, CurveKind::survival};
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("survival bounds and monotonicity over random scenarios") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.0, 40.0);
    for (int rep = 0; rep < 12; ++rep) {
        const auto sc = random_scenario(gen);
        std::vector<double> g(15);
        for (auto& x : g) x = u(gen);
        std::sort(g.begin(), g.end());
        double prev = 1.0;
        for (double t : g) {
            const double v = survival(sc, t);
            CHECK(v > 0.0);
            CHECK(v <= prev);
            prev = v;
        }
    }
}

TEST_CASE("stochastically larger stress gives pointwise smaller survival") {
    const auto base = canonical::s3();
    const auto low = base.with_stress(StressDistribution{{{0.02, 0.7}, {0.1, 0.3}}});
    const auto high = base.with_stress(StressDistribution{{{0.02, 0.3}, {0.1, 0.7}}});
    for (double t : grid20()) CHECK(survival(high, t) < survival(low, t));
}

TEST_CASE("conditional survival given a path: hand-evaluated cases") {
    const auto s = canonical::s1();
    const double f0 = std::exp(-0.1);
    CHECK(conditional_survival_given_path(s, {{}, 10.0}, 10.0) == doctest::Approx(f0).epsilon(1e-15));
    CHECK(conditional_survival_given_path(s, {{{2.0, 3.0, 0.5}}, 10.0}, 10.0) ==
          doctest::Approx(f0 * std::exp(-1.5)).epsilon(1e-15));
    CHECK(conditional_survival_given_path(s, {{{8.0, 5.0, 0.5}}, 10.0}, 10.0) ==
          doctest::Approx(f0 * std::exp(-1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(conditional_survival_given_path(s, {{{3.0, 1.0, 0.5}, {1.0, 1.0, 0.5}}, 10.0}, 5.0), DomainError);
    CHECK_THROWS_AS(conditional_survival_given_path(s, {{{-1.0, 1.0, 0.5}}, 10.0}, 5.0), DomainError);
}

TEST_CASE("conditional failure density: examples") {
    const auto s = canonical::s1();
    CHECK(conditional_failure_density(s, {{}, 10.0}, 10.0) == doctest::Approx(0.01 * std::exp(-0.1)).epsilon(1e-15));

    const Scenario pure{BaselineHazard::constant(0.0), IntensityModel::constant(1.0), ServiceTimeModel::exponential(1.0),
                        StressDistribution::degenerate(0.5)};
    const WorkloadPath one{{{0.0, 1e9, 0.5}}, 1e3};
    for (double t : {0.5, 2.0, 9.0}) CHECK(conditional_failure_density(pure, one, t) == doctest::Approx(0.5 * std::exp(-0.5 * t)));
    QuadratureSettings q;
    CHECK(integrate([&](double t) { return conditional_failure_density(pure, one, t); }, 0.0, 100.0, q) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("conditional failure density integrates to one minus survival and is -dS/dt") {
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto s = canonical::s2();
    for (int rep = 0; rep < 20; ++rep) {
        const double horizon = 60.0;
        WorkloadPath path{{}, horizon};
        double t = 0.0;
        std::vector<double> jumps;
        while ((t += 3.0 * u(gen)) < horizon) {
            path.jobs.push_back({t, 0.1 + 4.0 * u(gen), 0.3 * u(gen)});
            jumps.push_back(t);
            jumps.push_back(path.jobs.back().completion());
        }
        const double big = horizon;
        QuadratureSettings q;
        const double mass =
            integrate([&](double x) { return conditional_failure_density(s, path, x); }, 0.0, big, q, jumps);
        CHECK(mass + conditional_survival_given_path(s, path, big) == doctest::Approx(1.0).epsilon(1e-6));

        for (int k = 0; k < 10; ++k) {
            const double x = 1.0 + 50.0 * u(gen);
            const double h = 1e-5;
            const bool near_jump = std::any_of(jumps.begin(), jumps.end(), [&](double j) { return std::abs(j - x) < 2 * h; });
            if (near_jump) continue;
            const double fd = -(conditional_survival_given_path(s, path, x + h) -
                                conditional_survival_given_path(s, path, x - h)) /
                              (2.0 * h);
            CHECK(conditional_failure_density(s, path, x) == doctest::Approx(fd).epsilon(1e-4));
        }
    }
}

TEST_CASE("single job factor") {
    const auto s = canonical::s1();
    CHECK(single_job_factor(s, 10.0, 0.0) == 1.0);
    CHECK(single_job_factor(s, 10.0, 0.05) == doctest::Approx(1.0 - kS1.exposure(10.0) / 20.0).epsilon(1e-10));
    CHECK(single_job_factor(s, 10.0, 0.05) == doctest::Approx(0.95692).epsilon(1e-5));
    CHECK_THROWS_AS(single_job_factor(no_arrivals(), 10.0, 0.05), DomainError);
    for (const auto& name : canonical::names()) {
        const auto sc = *canonical::by_name(name);
        for (double t : {1.0, 8.0}) {
            const double v = single_job_factor(sc, t, 0.2);
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("single job factor matches its sampling definition") {
    const auto s = canonical::s1();
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::exponential_distribution<double> w(1.0);
    for (double t : {2.0, 10.0}) {
        const std::size_t n = 200000;
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double tp = t * u(gen);
            const double x = std::exp(-0.05 * std::min(w(gen), t - tp));
            sum += x;
            sum2 += x * x;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
        CHECK(std::abs(mean - single_job_factor(s, t, 0.05)) < 3.0 * se);
    }
}

TEST_CASE("a and b against the constant-exponential closed forms") {
    const auto s = canonical::s1();
    const double c = 1.05, lam = 2.0, mu = 1.0;
    for (double t : {0.5, 5.0, 17.0}) {
        const double e = std::exp(-c * t);
        const double a = lam * mu * (t * (1.0 - e) / c - (1.0 - e * (1.0 + c * t)) / (c * c));
        const double b = lam * (1.0 - e) / c;
        CHECK(a_func(s, t, 0.05) == doctest::Approx(a).epsilon(1e-9));
        CHECK(b_func(s, t, 0.05) == doctest::Approx(b).epsilon(1e-9));
    }
}

TEST_CASE("a and b agree with the double integral in both orders") {
    for (const auto& name : canonical::names()) {
        const auto sc = *canonical::by_name(name);
        if (sc.service.atom()) continue;
        const auto& g = sc.service;
        const auto& l = sc.intensity;
        const auto cuts = l.kinks();
        for (double eta : {0.05, 0.2}) {
            const double t = 5.0;
            // a(t) = int_0^t int_0^{t-r} e^{-eta v} g(v) dv lambda(r) dr
            const double a_ref = oracle::gauss_legendre_pieces(
                [&](double r) {
                    return l.rate(r) * oracle::gauss_legendre(
                                           [&](double x) { return 2.0 * x * std::exp(-eta * x * x) * g.pdf(x * x); },
                                           0.0, std::sqrt(t - r), 40);
                },
                0.0, t, cuts, 40);
            // the swapped order: int_0^t e^{-eta v} g(v) int_0^{t-v} lambda(r) dr dv
            // v = x^2 removes the square-root behaviour of some densities at 0.
            std::vector<double> v_cuts, x_cuts;
            for (double k : cuts) {
                v_cuts.push_back(t - k);
                if (k < t) x_cuts.push_back(std::sqrt(t - k));
            }
            const double a_swapped = oracle::gauss_legendre_pieces(
                [&](double x) {
                    const double v = x * x;
                    return 2.0 * x * std::exp(-eta * v) * g.pdf(v) *
                           oracle::gauss_legendre_pieces([&](double r) { return l.rate(r); }, 0.0, t - v, cuts, 10);
                },
                0.0, std::sqrt(t), x_cuts, 200);
            const double b_ref = oracle::gauss_legendre_pieces(
                [&](double w) { return std::exp(-eta * w) * g.survival(w) * l.rate(t - w); }, 0.0, t, v_cuts, 400);
            INFO(name << " eta=" << eta);
            CHECK(a_swapped == doctest::Approx(a_ref).epsilon(1e-6));
            CHECK(a_func(sc, t, eta) == doctest::Approx(a_ref).epsilon(1e-6));
            CHECK(b_func(sc, t, eta) == doctest::Approx(b_ref).epsilon(1e-8));
        }
    }
}

TEST_CASE("a and b: boundary cases and monotonicity") {
    for (const auto& name : canonical::names()) {
        const auto sc = *canonical::by_name(name);
        CHECK(a_func(sc, 0.0, 0.1) == 0.0);
        CHECK(b_func(sc, 0.0, 0.1) == 0.0);
        double prev = 0.0;
        for (double t : grid20()) {
            const double a = a_func(sc, t, 0.1);
            CHECK(a >= prev);
            CHECK(b_func(sc, t, 0.1) >= 0.0);
            prev = a;
        }
    }
    const auto quiet = no_arrivals();
    CHECK(a_func(quiet, 4.0, 0.05) == 0.0);
    CHECK(b_func(quiet, 4.0, 0.05) == 0.0);
}

TEST_CASE("a + b + inner exposure equals m") {
    for (const auto& name : canonical::names()) {
        const auto sc = *canonical::by_name(name);
        for (double eta : {0.0, 0.03, 0.5}) {
            for (double t : {0.7, 6.0, 19.0}) {
                const double lhs = a_func(sc, t, eta) + b_func(sc, t, eta) + inner_exposure(sc, t, eta);
                INFO(name << " eta=" << eta << " t=" << t);
                CHECK(lhs == doctest::Approx(sc.intensity.cumulative(t)).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("degenerate stress: every quantity equals its scalar substitution") {
    for (double eta : {0.05, 0.3}) {
        for (const auto& name : canonical::names()) {
            const auto sc = canonical::by_name(name)->with_stress(StressDistribution::degenerate(eta));
            for (double t : {0.5, 4.0, 13.0}) {
                const double s_scalar = sc.baseline.survival(t) * std::exp(-inner_exposure(sc, t, eta));
                const double h_scalar =
                    sc.baseline.rate(t) + eta * b_func(sc, t, eta);
                CHECK(std::abs(survival(sc, t) - s_scalar) <= 1e-12 * s_scalar);
                CHECK(hazard(sc, t) == doctest::Approx(h_scalar).epsilon(1e-8));
            }
        }
    }
    const auto sc = canonical::s1();
    const double eta = 0.05;
    QuadratureSettings q;
    const auto inner = q.tightened();
    const double ey = integrate_to_infinity(
        [&](double t) { return sc.baseline.survival(t) * std::exp(-inner_exposure(sc, t, eta, inner)); }, q);
    const double em = integrate_to_infinity(
        [&](double t) {
            const double a = a_func(sc, t, eta, inner);
            const double b = b_func(sc, t, eta, inner);
            const double surv = sc.baseline.survival(t) * std::exp(-inner_exposure(sc, t, eta, inner));
            return surv * a * (sc.baseline.rate(t) + eta * b);
        },
        q);
    const auto report = efficiency(sc);
    CHECK(std::abs(report.mean_cycle_length - ey) <= 1e-12 * ey);
    CHECK(std::abs(report.expected_jobs_per_cycle - em) <= 1e-12 * em);
    const double psi = em / (ey + sc.reboot_mean_nu);
    CHECK(std::abs(report.psi - psi) <= 1e-12 * psi);
    CHECK(std::abs(expected_jobs_per_cycle_printed_form(sc) - report.expected_jobs_per_cycle) <=
          1e-12 * report.expected_jobs_per_cycle);
}

TEST_CASE("efficiency: S1 values and report invariants") {
    const auto s = canonical::s1();
    const auto r = efficiency(s);
    CHECK_FALSE(r.diverged);
    CHECK(r.reboot_mean_nu == 1.0);
    CHECK(r.psi == r.expected_jobs_per_cycle / (r.mean_cycle_length + r.reboot_mean_nu));
    const double ey = integrate_to_infinity([](double t) { return kS1.survival(t); });
    CHECK(r.mean_cycle_length == doctest::Approx(ey).epsilon(1e-8));
    CHECK(r.psi > 0.0);
    CHECK(r.expected_jobs_per_cycle <= 2.0 * r.mean_cycle_length);
}

TEST_CASE("efficiency decreases as the reboot mean grows") {
    for (const auto& name : {"s1", "s3"}) {
        const auto sc = *canonical::by_name(name);
        const double p0 = efficiency(sc.with_reboot_mean(0.0)).psi;
        const double p1 = efficiency(sc.with_reboot_mean(1.0)).psi;
        const double p10 = efficiency(sc.with_reboot_mean(10.0)).psi;
        CHECK(p0 > p1);
        CHECK(p1 > p10);
    }
}

TEST_CASE("no arrivals: nothing is completed") {
    const auto quiet = no_arrivals();
    CHECK(expected_jobs_per_cycle(quiet) == 0.0);
    const auto r = efficiency(quiet);
    CHECK(r.psi == 0.0);
    CHECK(r.mean_cycle_length == doctest::Approx(100.0).epsilon(1e-8));
}

TEST_CASE("efficiency reports divergence when failure is not certain") {
    const Scenario never{BaselineHazard::constant(0.0), IntensityModel::constant(0.0), ServiceTimeModel::exponential(1.0),
                         StressDistribution::degenerate(0.05), 1.0};
    QuadratureSettings q;
    q.max_subdivisions = 20;
    CHECK_THROWS_AS(mean_cycle_length(never, q), DivergenceError);
    const auto r = efficiency(never, q);
    CHECK(r.diverged);
    CHECK(r.psi == 0.0);
}

TEST_CASE("printed E[M] differs from the factored form for multi-atom stress") {
    const auto sc = canonical::s3();
    const double factored = expected_jobs_per_cycle(sc);
    const double printed = expected_jobs_per_cycle_printed_form(sc);
    CHECK(std::abs(factored - printed) / factored > 0.01);
    CHECK(efficiency_printed_form(sc).psi != doctest::Approx(efficiency(sc).psi));
}
