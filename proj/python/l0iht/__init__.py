"""Iterative hard thresholding for l0-regularized box and cone programs."""

from ._l0iht import (
    ConeL0Problem,
    ConvergenceError,
    DimensionError,
    Error,
    InvariantViolation,
    L0Problem,
    ParameterError,
    UnsupportedProblem,
    choose_rho,
    delta_lower_bound,
    dist_dual_cone,
    enumerate_supports,
    gen_cone,
    gen_least_squares,
    hard_threshold_step,
    problem_from_json,
    problem_to_json,
    project_box,
    project_dual_cone,
    solve,
    threshold_coordinate,
    variant_inner_cap,
)

__all__ = [
    "ConeL0Problem",
    "ConvergenceError",
    "DimensionError",
    "Error",
    "InvariantViolation",
    "L0Problem",
    "ParameterError",
    "UnsupportedProblem",
    "choose_rho",
    "delta_lower_bound",
    "dist_dual_cone",
    "enumerate_supports",
    "gen_cone",
    "gen_least_squares",
    "hard_threshold_step",
    "problem_from_json",
    "problem_to_json",
    "project_box",
    "project_dual_cone",
    "solve",
    "threshold_coordinate",
    "variant_inner_cap",
]
