"""Adaptive RBF partition-of-unity collocation for 2D Poisson problems."""

from .adaptivity import (
    AdaptiveConfig,
    AdaptiveResult,
    indicator_coarse_fine,
    indicator_interpolant,
    solution_errors,
    solve_adaptive,
    solve_on,
)
from .assembly import GlobalSystem, LocalSystem, assemble
from .errors import CoverageError, CoveringError, LocalConditioningError, SolveError
from .geometry import (
    Covering,
    HaltonStream,
    Patch,
    PointSet,
    boundary_count,
    build_covering,
    make_initial_points,
)
from .harness import RunConfig, compute_errors, run_convergence, run_solve
from .kernels import Matern6, Wendland2, make_kernel
from .problems import PoissonProblem, make_problem
from .pum_weights import WeightEvaluation, evaluate_weights
from .solver import Solution, estimate_condition, evaluate, solve

__version__ = "0.1.0"

__all__ = [
    "AdaptiveConfig",
    "AdaptiveResult",
    "CoverageError",
    "Covering",
    "CoveringError",
    "GlobalSystem",
    "HaltonStream",
    "LocalConditioningError",
    "LocalSystem",
    "Matern6",
    "Patch",
    "PointSet",
    "PoissonProblem",
    "RunConfig",
    "Solution",
    "SolveError",
    "Wendland2",
    "WeightEvaluation",
    "assemble",
    "boundary_count",
    "build_covering",
    "compute_errors",
    "estimate_condition",
    "evaluate",
    "evaluate_weights",
    "indicator_coarse_fine",
    "indicator_interpolant",
    "make_initial_points",
    "make_kernel",
    "make_problem",
    "run_convergence",
    "run_solve",
    "solution_errors",
    "solve",
    "solve_adaptive",
    "solve_on",
]
