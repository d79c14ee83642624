"""Python interface to the rsbr survival and efficiency library."""

from ._core import (
    ConvergenceError,
    DivergenceError,
    DomainError,
    Error,
    InefficiencyError,
    ModelError,
    ParseError,
    QuadratureSettings,
    Scenario,
    ValidationError,
    a_func,
    b_func,
    builtin,
    builtin_names,
    conditional_failure_density,
    conditional_survival_given_path,
    efficiency,
    estimate_efficiency,
    estimate_survival,
    expected_jobs_per_cycle,
    hazard,
    hazard_curve,
    hazard_printed_form,
    inner_exposure,
    load_scenario,
    mean_cycle_length,
    order_statistics_test,
    parse_scenario,
    run_cli,
    single_job_factor,
    survival,
    survival_curve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
