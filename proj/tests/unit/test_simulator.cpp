#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "../oracles.hpp"
#include "rsbr/canonical.hpp"
#include "rsbr/closed_form.hpp"
#include "rsbr/errors.hpp"
#include "rsbr/simulator.hpp"
#include "rsbr/stats.hpp"

using namespace rsbr;

namespace {

Scenario constant_case(double r0, double lambda, double eta = 0.05) {
    return Scenario{BaselineHazard::constant(r0), IntensityModel::constant(lambda), ServiceTimeModel::exponential(1.0),
                    StressDistribution::degenerate(eta), 1.0};
}

struct Moments {
    double mean;
    double se;
};

Moments moments(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

TEST_CASE("arrivals: zero intensity gives no jobs") {
    const auto s = constant_case(0.01, 0.0);
    RngPolicy policy(1);
    for (std::uint64_t i = 0; i < 100; ++i) {
        auto rng = policy.stream_for(i);
        CHECK(sample_arrivals(s, 50.0, rng).empty());
    }
}

TEST_CASE("arrivals: Poisson mean count for constant intensity") {
    const auto s = constant_case(0.01, 2.0);
    RngPolicy policy(7);
    const std::size_t n = 100000;
    std::vector<double> counts(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = policy.stream_for(i);
        const auto a = sample_arrivals(s, 5.0, rng);
        CHECK(std::is_sorted(a.begin(), a.end()));
        if (!a.empty()) CHECK((a.front() >= 0.0 && a.back() <= 5.0));
        counts[i] = static_cast<double>(a.size());
    }
    const auto m = moments(counts);
    CHECK(std::abs(m.mean - 10.0) < 3.0 * std::sqrt(10.0) / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("arrivals: counts in disjoint windows are uncorrelated") {
    const auto s = canonical::s2();
    RngPolicy policy(8);
    const std::size_t n = 20000;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = policy.stream_for(i);
        const auto a = sample_arrivals(s, 12.0, rng);
        x[i] = static_cast<double>(std::count_if(a.begin(), a.end(), [](double t) { return t <= 4.0; }));
        y[i] = static_cast<double>(a.size()) - x[i];
    }
    const auto mx = moments(x), my = moments(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx.mean) * (y[i] - my.mean);
        sxx += (x[i] - mx.mean) * (x[i] - mx.mean);
        syy += (y[i] - my.mean) * (y[i] - my.mean);
    }
    CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(mx.mean - s.intensity.cumulative(4.0)) < 3.0 * std::sqrt(s.intensity.cumulative(4.0) / n));
}

TEST_CASE("arrivals: thinning gaps are exponential for constant intensity") {
    const auto s = constant_case(0.01, 2.0);
    RngPolicy policy(9);
    auto rng = policy.stream_for(0);
    const auto a = sample_arrivals(s, 20000.0, rng);
    std::vector<double> gaps;
    for (std::size_t i = 0; i < a.size(); ++i) gaps.push_back(i == 0 ? a[0] : a[i] - a[i - 1]);
    std::sort(gaps.begin(), gaps.end());
    const double d = stats::ks_statistic(gaps, [](double g) { return -std::expm1(-2.0 * g); });
    CHECK(stats::ks_p_value(d, gaps.size()) > 0.01);
}

TEST_CASE("arrivals: inversion and thinning agree") {
    const auto s = constant_case(0.01, 2.0);
    RngPolicy policy(10);
    const std::size_t n = 20000;
    std::vector<double> thin(n), inv(n);
    std::vector<double> first_inv;
    for (std::size_t i = 0; i < n; ++i) {
        auto r1 = policy.stream_for(i);
        auto r2 = policy.stream_for(n + i);
        thin[i] = static_cast<double>(sample_arrivals(s, 5.0, r1).size());
        const auto a = sample_arrivals_by_inversion(s, 5.0, r2);
        CHECK(std::is_sorted(a.begin(), a.end()));
        inv[i] = static_cast<double>(a.size());
        if (!a.empty()) first_inv.push_back(a.front());
    }
    const auto mt = moments(thin), mi = moments(inv);
    CHECK(std::abs(mt.mean - mi.mean) < 3.0 * std::hypot(mt.se, mi.se));
    std::sort(first_inv.begin(), first_inv.end());
    // first arrival given at least one arrival in [0, 5]
    const double norm = -std::expm1(-10.0);
    const double d = stats::ks_statistic(first_inv, [&](double x) { return -std::expm1(-2.0 * x) / norm; });
    CHECK(stats::ks_p_value(d, first_inv.size()) > 0.01);
    CHECK_THROWS_AS(
        [&] {
            auto rng = policy.stream_for(0);
            sample_arrivals_by_inversion(canonical::s2(), 5.0, rng);
        }(),
        ModelError);
}

TEST_CASE("paths: stresses and service times follow their laws") {
    RngPolicy policy(11);
    {
        const auto s = canonical::s1();
        auto rng = policy.stream_for(0);
        const auto p = sample_path(s, 100.0, rng);
        CHECK_NOTHROW(p.validate());
        CHECK(p.horizon == 100.0);
        for (const auto& j : p.jobs) CHECK(j.stress == 0.05);
    }
    const auto s2 = canonical::s2();
    const auto& atoms = s2.stress.atoms();
    const std::size_t n = 100000;
    std::vector<std::size_t> hits(atoms.size(), 0);
    auto rng = policy.stream_for(1);
    for (std::size_t i = 0; i < n; ++i) {
        const double h = sample_stress(s2.stress, rng);
        for (std::size_t k = 0; k < atoms.size(); ++k)
            if (h == atoms[k].eta) ++hits[k];
    }
    CHECK(std::accumulate(hits.begin(), hits.end(), std::size_t{0}) == n);
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const double freq = static_cast<double>(hits[k]) / n;
        CHECK(std::abs(freq - atoms[k].p) < 3.0 * oracle::proportion_se(atoms[k].p, n));
    }

    for (const auto& g : {ServiceTimeModel::exponential(1.0), ServiceTimeModel{ServiceTimeModel::Lognormal{-0.5, 0.8}},
                          ServiceTimeModel{ServiceTimeModel::Weibull{1.5, 1.2}}}) {
        std::vector<double> w(n);
        for (auto& x : w) x = sample_service_time(g, rng);
        const auto m = moments(w);
        CHECK(std::abs(m.mean - g.mean()) < 3.0 * m.se);
    }
}

TEST_CASE("integrated breakdown: hand-evaluated cases") {
    const auto s = constant_case(0.0, 1.0);
    CHECK(integrated_breakdown(s, {{{2.0, 3.0, 0.5}}, 10.0}, 10.0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(integrated_breakdown(s, {{{8.0, 5.0, 0.5}}, 10.0}, 10.0) == doctest::Approx(1.0).epsilon(1e-15));
    const auto w = canonical::s2();
    CHECK(integrated_breakdown(w, {{}, 10.0}, 7.0) == w.baseline.cumulative(7.0));
    CHECK_THROWS_AS(integrated_breakdown(s, {{}, 10.0}, 11.0), DomainError);
}

TEST_CASE("integrated breakdown is continuous, nondecreasing, and matches conditional survival") {
    RngPolicy policy(12);
    for (const auto& name : canonical::names()) {
        const auto s = *canonical::by_name(name);
        for (std::uint64_t i = 0; i < 200; ++i) {
            auto rng = policy.stream_for(i);
            const auto path = sample_path(s, 25.0, rng);
            double prev = 0.0;
            for (int k = 0; k <= 50; ++k) {
                const double t = 25.0 * k / 50.0;
                const double ib = integrated_breakdown(s, path, t);
                CHECK(ib >= prev);
                prev = ib;
                const double cs = conditional_survival_given_path(s, path, t);
                CHECK(std::abs(std::exp(-ib) - cs) <= 1e-12 * cs);
            }
            for (const auto& j : path.jobs) {
                const double ib = integrated_breakdown(s, path, std::min(j.completion(), 25.0));
                const double eps = 1e-9;
                const double left = integrated_breakdown(s, path, std::max(0.0, std::min(j.completion(), 25.0) - eps));
                CHECK(ib - left <= 1e-6);
            }
        }
    }
}

TEST_CASE("failure times: empty path with constant baseline is exponential") {
    const auto s = constant_case(0.01, 0.0);
    const WorkloadPath empty{{}, 1e5};
    RngPolicy policy(13);
    auto rng = policy.stream_for(0);
    std::vector<double> y(100000);
    for (auto& x : y) {
        const auto f = sample_failure_time(s, empty, rng);
        CHECK_FALSE(f.censored);
        x = f.time;
    }
    std::sort(y.begin(), y.end());
    const double d = stats::ks_statistic(y, [](double t) { return -std::expm1(-0.01 * t); });
    CHECK(stats::ks_p_value(d, y.size()) > 0.01);
}

TEST_CASE("failure times: fixed path survival matches the conditional survival") {
    const auto s = constant_case(0.01, 1.0);
    const WorkloadPath p1{{{2.0, 3.0, 0.5}}, 20.0};
    RngPolicy policy(14);
    auto rng = policy.stream_for(0);
    const std::size_t n = 100000;
    std::vector<FailureSample> draws(n);
    for (auto& d : draws) d = sample_failure_time(s, p1, rng);
    for (double t : {1.0, 3.0, 6.0, 10.0}) {
        const double p = conditional_survival_given_path(s, p1, t);
        const double hat =
            static_cast<double>(std::count_if(draws.begin(), draws.end(), [&](const FailureSample& f) { return f.time > t; })) / n;
        INFO("t=" << t);
        CHECK(std::abs(hat - p) < 3.0 * oracle::proportion_se(p, n));
    }
    const double censored = static_cast<double>(
        std::count_if(draws.begin(), draws.end(), [](const FailureSample& f) { return f.censored; })) / n;
    const double p20 = conditional_survival_given_path(s, p1, 20.0);
    CHECK(std::abs(censored - p20) < 3.0 * oracle::proportion_se(p20, n));
    for (const auto& d : draws)
        if (d.censored) CHECK(d.time == 20.0);
}

TEST_CASE("failure times: a zero threshold is an immediate failure") {
    const auto s = canonical::s2();
    const WorkloadPath p1{{{2.0, 3.0, 0.5}}, 20.0};
    const auto f = failure_time_for_threshold(s, p1, 0.0);
    CHECK(f.time == 0.0);
    CHECK_FALSE(f.censored);
}

TEST_CASE("failure times: threshold inversion is exact on every baseline") {
    RngPolicy policy(15);
    for (const auto& name : canonical::names()) {
        const auto s = *canonical::by_name(name);
        for (std::uint64_t i = 0; i < 100; ++i) {
            auto rng = policy.stream_for(i);
            const auto path = sample_path(s, 40.0, rng);
            const double e = rng.exponential();
            const auto f = failure_time_for_threshold(s, path, e);
            if (f.censored) {
                CHECK(integrated_breakdown(s, path, 40.0) < e);
            } else {
                CHECK(integrated_breakdown(s, path, f.time) == doctest::Approx(e).epsilon(1e-9));
                CHECK(integrated_breakdown(s, path, std::max(0.0, f.time - 1e-9)) <= e + 1e-12);
            }
        }
    }
}

TEST_CASE("failure times: histogram on a fixed path fits the conditional density") {
    const auto s = canonical::s2();
    const WorkloadPath path{{{1.0, 2.0, 0.2}, {2.5, 6.0, 0.05}, {4.0, 0.5, 0.6}, {9.0, 3.0, 0.1}}, 30.0};
    RngPolicy policy(16);
    auto rng = policy.stream_for(0);
    const std::size_t n = 100000;
    std::vector<double> edges;
    for (int k = 0; k <= 30; ++k) edges.push_back(k);
    std::vector<double> counts(edges.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto f = sample_failure_time(s, path, rng);
        if (f.censored) {
            counts.back() += 1.0;
            continue;
        }
        const auto bin = std::min<std::size_t>(static_cast<std::size_t>(f.time), edges.size() - 2);
        counts[bin] += 1.0;
    }
    const std::vector<double> jumps{1.0, 3.0, 2.5, 8.5, 4.0, 4.5, 9.0, 12.0};
    double chi2 = 0.0;
    double total_p = 0.0;
    std::size_t bins = 0;
    QuadratureSettings q;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double p = integrate([&](double t) { return conditional_failure_density(s, path, t); }, edges[k],
                                   edges[k + 1], q, jumps);
        total_p += p;
        const double expected = p * n;
        CHECK(expected >= 5.0);
        chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
        ++bins;
    }
    const double tail = conditional_survival_given_path(s, path, 30.0);
    CHECK(total_p + tail == doctest::Approx(1.0).epsilon(1e-8));
    chi2 += (counts.back() - tail * n) * (counts.back() - tail * n) / (tail * n);
    ++bins;
    CHECK(stats::chi_square_p_value(chi2, static_cast<double>(bins - 1)) > 0.01);
}

TEST_CASE("estimate_survival: reduces to the baseline when no jobs arrive") {
    const auto s = constant_case(0.01, 0.0);
    const std::vector<double> grid{5.0, 20.0, 60.0};
    const auto c = estimate_survival(s, grid, 50000, RngPolicy(17));
    CHECK(c.n_replicas == 50000);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double p = baseline_survival(s, grid[i]);
        CHECK(std::abs(c.estimates[i] - p) < 3.0 * oracle::proportion_se(p, c.n_replicas));
        CHECK(c.ci_half_widths[i] >= 0.0);
        CHECK(c.ci_lo(i) >= 0.0);
        CHECK(c.ci_hi(i) <= 1.0);
    }
    CHECK(c.z == doctest::Approx(2.5758).epsilon(1e-4));
    CHECK_THROWS_AS(estimate_survival(s, grid, 50, RngPolicy(1)), DomainError);
}

TEST_CASE("estimate_survival: interval half-width halves when replicas are quadrupled") {
    const auto s = canonical::s1();
    const std::vector<double> grid{5.0, 10.0, 15.0};
    const auto small = estimate_survival(s, grid, 10000, RngPolicy(18));
    const auto big = estimate_survival(s, grid, 40000, RngPolicy(19));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double ratio = big.ci_half_widths[i] / small.ci_half_widths[i];
        CHECK(ratio >= 0.45);
        CHECK(ratio <= 0.55);
    }
}

TEST_CASE("estimate_survival: closed form inside the interval for S1") {
    const auto s = canonical::s1();
    std::vector<double> grid;
    for (int i = 1; i <= 20; ++i) grid.push_back(i);
    const auto c = estimate_survival(s, grid, 20000, RngPolicy(20));
    int inside = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = survival(s, grid[i]);
        inside += (v >= c.ci_lo(i) && v <= c.ci_hi(i)) ? 1 : 0;
    }
    CHECK(inside >= 18);
}

TEST_CASE("simulation output does not depend on the thread count") {
    const auto s = canonical::s2();
    const std::vector<double> grid{2.0, 7.0, 13.0};
    const auto one = estimate_survival(s, grid, 5000, RngPolicy(21), 1);
    const auto four = estimate_survival(s, grid, 5000, RngPolicy(21), 4);
    CHECK(one.estimates == four.estimates);
    CHECK(one.ci_half_widths == four.ci_half_widths);
    const auto e1 = estimate_efficiency(s, 2000, RngPolicy(22), 1);
    const auto e3 = estimate_efficiency(s, 2000, RngPolicy(22), 3);
    CHECK(e1.psi == e3.psi);
    CHECK(e1.std_error == e3.std_error);
}

TEST_CASE("streams are pure functions of the index and do not overlap") {
    RngPolicy policy(23);
    auto a = policy.stream_for(5);
    auto b = policy.stream_for(5);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    std::set<std::uint64_t> seen;
    std::size_t total = 0;
    for (std::uint64_t idx = 0; idx < 16; ++idx) {
        auto r = policy.stream_for(idx);
        for (int i = 0; i < 1000; ++i) {
            seen.insert(r.next_u64());
            ++total;
        }
    }
    CHECK(seen.size() == total);
    auto other = RngPolicy(24).stream_for(5);
    auto mine = policy.stream_for(5);
    CHECK(other.next_u64() != mine.next_u64());
}

TEST_CASE("renewal cycles: invariants and the no-arrival case") {
    RngPolicy policy(25);
    const auto s = canonical::s4();
    for (std::uint64_t i = 0; i < 500; ++i) {
        auto rng = policy.stream_for(i);
        const auto c = simulate_renewal_cycle(s, rng);
        CHECK(c.failure_time > 0.0);
        CHECK(c.completed_jobs <= c.total_arrivals);
    }
    const auto quiet = constant_case(0.01, 0.0);
    std::vector<double> y;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        auto rng = policy.stream_for(i);
        const auto c = simulate_renewal_cycle(quiet, rng);
        CHECK(c.completed_jobs == 0);
        y.push_back(c.failure_time);
    }
    std::sort(y.begin(), y.end());
    const double d = stats::ks_statistic(y, [](double t) { return -std::expm1(-0.01 * t); });
    CHECK(stats::ks_p_value(d, y.size()) > 0.01);
    const auto e = estimate_efficiency(quiet, 1000, RngPolicy(26));
    CHECK(e.psi == 0.0);
}

TEST_CASE("renewal cycles: a cycle that never fails hits the horizon cap") {
    const auto never = constant_case(0.0, 0.0);
    RngPolicy policy(27);
    auto rng = policy.stream_for(0);
    CHECK_THROWS_AS(simulate_renewal_cycle(never, rng, CycleSettings{50.0, 1000.0}), DivergenceError);
}

TEST_CASE("renewal cycles: huge stress shortens the cycle") {
    const auto mild = canonical::s1();
    const auto harsh = mild.with_stress(StressDistribution::degenerate(1e3));
    const auto a = estimate_efficiency(mild, 5000, RngPolicy(28));
    const auto b = estimate_efficiency(harsh, 5000, RngPolicy(28));
    CHECK(b.mean_cycle_length < a.mean_cycle_length);
}

TEST_CASE("efficiency estimate: reboot time lowers psi with common random numbers") {
    const auto s = canonical::s1();
    const auto zero = estimate_efficiency(s.with_reboot_mean(0.0), 5000, RngPolicy(29));
    const auto one = estimate_efficiency(s.with_reboot_mean(1.0), 5000, RngPolicy(29));
    CHECK(zero.psi > one.psi);
    CHECK(one.reboot_mean_nu == 1.0);
    CHECK(one.n_cycles == 5000);
    CHECK(one.ci_lo < one.psi);
    CHECK(one.ci_hi > one.psi);
    CHECK(one.psi == doctest::Approx(one.mean_completed_jobs / (one.mean_cycle_length + 1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(estimate_efficiency(s, 10, RngPolicy(1)), DomainError);
}

TEST_CASE("efficiency estimate agrees with the closed form on S1") {
    const auto s = canonical::s1();
    const auto e = estimate_efficiency(s, 20000, RngPolicy(30));
    const auto r = efficiency(s);
    CHECK(std::abs(e.psi - r.psi) < 3.0 * e.std_error);
}

TEST_CASE("order statistics: pooled arrival times follow m(x)/m(t)") {
    const auto flat = constant_case(0.01, 2.0);
    const auto a = order_statistics_test(flat, 5.0, 10, 1000, RngPolicy(31));
    CHECK(a.n_points == 10000);
    CHECK(a.retained_paths == 1000);
    CHECK(a.attempted_paths >= a.retained_paths);
    CHECK(a.p_value > 0.01);
    CHECK(a.acceptance_probability == doctest::Approx(std::exp(-10.0) * std::pow(10.0, 10) / 3628800.0).epsilon(1e-12));

    const auto wave = canonical::s5();
    const double t = 7.0;
    const auto n = static_cast<std::size_t>(std::lround(wave.intensity.cumulative(t)));
    const auto b = order_statistics_test(wave, t, n, 500, RngPolicy(32));
    CHECK(b.p_value > 0.01);
}

TEST_CASE("order statistics: a wrong reference distribution is rejected") {
    const auto wave = canonical::s5();
    const double t = 7.0;
    const auto n = static_cast<std::size_t>(std::lround(wave.intensity.cumulative(t)));
    const auto r = order_statistics_test(wave, t, n, 500, RngPolicy(33), [t](double x) { return x / t; });
    CHECK(r.p_value < 0.01);
}

TEST_CASE("order statistics: improbable conditioning is refused") {
    CHECK_THROWS_AS(order_statistics_test(constant_case(0.01, 2.0), 5.0, 40, 10, RngPolicy(34)), InefficiencyError);
}
