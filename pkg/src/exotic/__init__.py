"""Globally optimal convex-non-concave min-max optimization.

The solver lifts the max player into a product space where the inner
problem becomes convex, then runs an optimistic hierarchical tree search
over that space, feeding every node through an iterative projected
subgradient solver. Baselines, brute-force oracles, analytic benchmarks
and theoretical bound evaluators round out the toolkit.
"""

from .baselines import BaselineConfig, run_agp, run_gda, saddle_residual
from .core import ExoticConfig, RunReport, budget_to_hmax, run_exotic, solve_ncc
from .domains import BoxDomain, ProductDomain, SimplexDomain
from .engine import engine_name
from .errors import (
    BudgetTooSmallError,
    DegenerateCellError,
    ExoticError,
    GridTooLargeError,
    OutOfBranchError,
    UnsupportedProblemError,
)
from .inner_solver import InnerSolverConfig, Selection, StepRule, estimate_G, opt, project
from .oracles import GridSpec, grid_minmax, security_value_exact, worst_case_response
from .problems import (
    GameSpec,
    MinMaxProblem,
    bilinear_toy,
    example_security_game,
    handcrafted_optimum,
    handcrafted_problem,
    quartic_saddle,
    security_game_problem,
)
from .reformulation import (
    InnerProblem,
    OuterPoint,
    feasibility_residual,
    inner_objective_F,
    outer_domain,
)
from .theory import TheoryParams, gap_bound_linear, gap_bound_sublinear, lambert_w

__version__ = "0.1.0"

__all__ = [
    "BaselineConfig",
    "BoxDomain",
    "BudgetTooSmallError",
    "DegenerateCellError",
    "ExoticConfig",
    "ExoticError",
    "GameSpec",
    "GridSpec",
    "GridTooLargeError",
    "InnerProblem",
    "InnerSolverConfig",
    "MinMaxProblem",
    "OuterPoint",
    "OutOfBranchError",
    "ProductDomain",
    "RunReport",
    "Selection",
    "SimplexDomain",
    "StepRule",
    "TheoryParams",
    "UnsupportedProblemError",
    "bilinear_toy",
    "budget_to_hmax",
    "engine_name",
    "estimate_G",
    "example_security_game",
    "feasibility_residual",
    "gap_bound_linear",
    "gap_bound_sublinear",
    "grid_minmax",
    "handcrafted_optimum",
    "handcrafted_problem",
    "inner_objective_F",
    "lambert_w",
    "opt",
    "outer_domain",
    "project",
    "quartic_saddle",
    "run_agp",
    "run_exotic",
    "run_gda",
    "saddle_residual",
    "security_game_problem",
    "security_value_exact",
    "solve_ncc",
    "worst_case_response",
]
