#pragma once

// Analytic results for a server whose breakdown rate rises by a random
// stress for each job in service. Stress expectations are exact finite sums
// over the atoms; every remaining integral goes through rsbr::integrate.

#include <vector>

#include "rsbr/model.hpp"
#include "rsbr/quadrature.hpp"
#include "rsbr/workload_path.hpp"

namespace rsbr {

enum class CurveKind { survival, hazard, generic };

/// A function sampled on a strictly increasing time grid.
struct Curve {
    std::vector<double> grid;
    std::vector<double> values;
    CurveKind kind = CurveKind::generic;

    /// Throws DomainError when the grid or values break the kind's invariants.
    void validate() const;
};

struct EfficiencyReport {
    double psi = 0.0;
    double mean_cycle_length = 0.0;
    double expected_jobs_per_cycle = 0.0;
    double reboot_mean_nu = 0.0;
    /// Set when an improper integral failed to decay; psi is then 0.
    bool diverged = false;
};

/// eta * int_0^t e^{-eta w} m(t - w) Gbar(w) dw for one stress value.
double inner_exposure(const Scenario& s, double t, double eta, const QuadratureSettings& q = {});

/// E_H[inner_exposure(t, H)], the workload part of -ln S_Y(t).
double total_exposure(const Scenario& s, double t, const QuadratureSettings& q = {});

/// Unconditional survival S_Y(t) = Fbar_0(t) exp(-E_H[inner_exposure]).
double survival(const Scenario& s, double t, const QuadratureSettings& q = {});

/// Hazard r(t) = -d ln S_Y / dt
///   = r_0(t) + E_H[H int_0^t e^{-H w} lambda(t - w) Gbar(w) dw].
double hazard(const Scenario& s, double t, const QuadratureSettings& q = {});

/// The hazard with m(t - w) in place of lambda(t - w). Kept only so the
/// difference from the true derivative can be measured; it is not -d ln S/dt.
double hazard_printed_form(const Scenario& s, double t, const QuadratureSettings& q = {});

Curve survival_curve(const Scenario& s, const std::vector<double>& grid, const QuadratureSettings& q = {});
Curve hazard_curve(const Scenario& s, const std::vector<double>& grid, const QuadratureSettings& q = {});

/// P(Y > t | path) = Fbar_0(t) exp(-sum_j H_j min(W_j, t - T_j)).
double conditional_survival_given_path(const Scenario& s, const WorkloadPath& path, double t);

/// Density of Y given the path: the conditional survival times
/// r_0(t) + sum of stresses of jobs still in service at t.
double conditional_failure_density(const Scenario& s, const WorkloadPath& path, double t);

/// E[exp(-eta min(W, t - T'))] with T' ~ lambda(x)/m(t) on [0, t], evaluated
/// as 1 - inner_exposure(t, eta) / m(t). Throws DomainError when m(t) = 0.
double single_job_factor(const Scenario& s, double t, double eta, const QuadratureSettings& q = {});

/// a(t) = int_0^t e^{-eta v} g_W(v) m(t - v) dv (point masses of W included).
double a_func(const Scenario& s, double t, double eta, const QuadratureSettings& q = {});

/// b(t) = int_0^t e^{-eta (t - r)} Gbar_W(t - r) lambda(r) dr.
double b_func(const Scenario& s, double t, double eta, const QuadratureSettings& q = {});

/// E[Y] = int_0^inf S_Y(t) dt. Throws DivergenceError when the tail never decays.
double mean_cycle_length(const Scenario& s, const QuadratureSettings& q = {});

/// E[M] = int_0^inf S_Y(t) E_H[a(t)] (r_0(t) + E_H[H b(t)]) dt.
///
/// S_Y(t) equals exp(-R_0 - m + E_H[a + b]) identically; the completed-job
/// count and the stress of the job in service at failure belong to different
/// jobs, so their stress expectations factor.
double expected_jobs_per_cycle(const Scenario& s, const QuadratureSettings& q = {});

/// E[M] with the single joint expectation E_H[H a(t) b(t)] in the second
/// term. Agrees with expected_jobs_per_cycle only for a degenerate stress law.
double expected_jobs_per_cycle_printed_form(const Scenario& s, const QuadratureSettings& q = {});

/// psi = E[M] / (E[Y] + nu). Divergence yields psi = 0 with `diverged` set.
EfficiencyReport efficiency(const Scenario& s, const QuadratureSettings& q = {});

/// efficiency() built on expected_jobs_per_cycle_printed_form.
EfficiencyReport efficiency_printed_form(const Scenario& s, const QuadratureSettings& q = {});

}  // namespace rsbr
