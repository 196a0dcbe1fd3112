"""Adaptive point refinement driven by interpolation-disagreement indicators.

Each iteration solves on the current set, draws fresh Halton test points,
scores them with an error indicator, then adds high-error test points and
removes the interior points nearest to low-error test points.  The boundary
ring is regenerated for the new interior count and never edited in place.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .assembly import assemble
from .errors import CoveringError
from .geometry import (
    OVERLAP_DEFAULT,
    CellGrid,
    HaltonStream,
    PointSet,
    boundary_count,
    boundary_ring,
    build_covering,
    default_patches_per_axis,
    unit_grid,
)
from .kernels import make_kernel
from .solver import evaluate, local_values, solve

STOP_CONVERGED = "converged"
STOP_REMOVAL_EMPTY = "removal_set_empty"
STOP_MAX_ITERATIONS = "max_iterations"
STOP_MAX_POINTS = "max_points"


@dataclass(frozen=True)
class AdaptiveConfig:
    """Knobs of the adaptive run."""

    epsilon: float = 3.0
    kernel: str = "matern6"
    tau_min: float = 1e-8
    tau_max: float = 1e-5
    indicator: str = "interp"  # "interp" or "coarsefine"
    test_multiplier: float = 2.0
    patches_per_axis: int = 0  # 0 means resolve from the point count
    overlap: float = OVERLAP_DEFAULT
    max_iterations: int = 50
    max_points: int = 5000
    min_interior: int = 9
    separation: float = 1e-4
    stopping: str = "both_empty"  # or "removal_empty"

    def validated(self):
        if self.tau_min >= self.tau_max:
            raise ValueError("tau_min must be below tau_max")
        if self.indicator not in ("interp", "coarsefine"):
            raise ValueError(f"unknown indicator {self.indicator!r}")
        if self.stopping not in ("both_empty", "removal_empty"):
            raise ValueError(f"unknown stopping rule {self.stopping!r}")
        if self.test_multiplier <= 0:
            raise ValueError("test_multiplier must be positive")
        return self


@dataclass
class IterationRecord:
    """Everything observed during one iteration, for history and audits."""

    k: int
    n_interior: int
    n_boundary: int
    n_total: int
    n_added: int
    n_removed: int
    mae: float
    rmse: float
    condition: float
    seconds: float
    stop_reason: str = ""
    points: PointSet = None
    test_points: np.ndarray = None
    indicator_values: np.ndarray = None


@dataclass
class AdaptiveResult:
    solution: object
    points: PointSet
    records: list = field(default_factory=list)
    stop_reason: str = ""
    seconds_total: float = 0.0

    @property
    def iterations(self):
        return len(self.records)


def covering_for(points, config):
    """Build the per-iteration covering, backing off when patches run empty."""
    per_axis = config.patches_per_axis or default_patches_per_axis(points.n_total)
    while True:
        try:
            return build_covering(points, per_axis, config.overlap)
        except CoveringError:
            if per_axis <= 2:
                raise
            per_axis -= 1


def solve_on(problem, points, config, with_condition=True):
    """Assemble and solve on a fixed point set under the run configuration."""
    kernel = make_kernel(config.kernel, config.epsilon)
    covering = covering_for(points, config)
    system = assemble(points, covering, kernel, problem.source, problem.dirichlet)
    return solve(system, with_condition=with_condition)


def solution_errors(solution, problem, n_side=40):
    """(MAE, RMSE) of the approximant against the exact solution.

    Measured on the uniform n_side x n_side grid including the boundary.
    """
    grid = unit_grid(n_side)
    err = np.abs(evaluate(solution, grid) - problem.exact(grid))
    return float(err.max()), float(math.sqrt(np.mean(err * err)))


def indicator_interpolant(solution, tests):
    """|global blend - nearest patch's local interpolant| at the test points.

    Identically zero wherever a single patch is active, since the blend then
    equals that patch's interpolant.
    """
    tests = np.atleast_2d(np.asarray(tests, dtype=float))
    blended = evaluate(solution, tests)
    covering = solution.covering
    diff = tests[:, None, :] - covering.centers[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    d2[~covering.active_mask(tests)] = np.inf
    nearest = np.argmin(d2, axis=1)
    errors = np.empty(tests.shape[0])
    for j in np.unique(nearest):
        idx = np.nonzero(nearest == j)[0]
        errors[idx] = np.abs(blended[idx] - local_values(solution, int(j), tests[idx]))
    return errors


def refined_point_set(coarse, stream, separation):
    """Coarse set plus one separation-filtered Halton point per interior node.

    The boundary ring is kept as-is so the fine set is a strict superset of
    the coarse one.
    """
    candidates = stream.draw(coarse.n_interior)
    current = coarse.all_points()
    grid = CellGrid(current, max(separation, 1e-12))
    accepted = []
    for cand in candidates:
        if grid.in_ball(cand, separation).size:
            continue
        if accepted and (
            np.einsum("ij,ij->i", np.asarray(accepted) - cand, np.asarray(accepted) - cand).min()
            < separation * separation
        ):
            continue
        if not (0.0 < cand[0] < 1.0 and 0.0 < cand[1] < 1.0):
            continue
        accepted.append(cand)
    if not accepted:
        return coarse
    interior = np.vstack([coarse.interior, np.asarray(accepted)])
    return PointSet(interior, coarse.boundary)


def indicator_coarse_fine(problem, coarse, config=None, stream=None, eval_points=None):
    """Disagreement between solves on a coarse set and its refined superset.

    Evaluated at the coarse collocation points unless ``eval_points`` is
    given.  When the refinement adds nothing, the two solves coincide and the
    result is exactly zero.
    """
    config = (config or AdaptiveConfig()).validated()
    stream = stream if stream is not None else HaltonStream()
    fine = refined_point_set(coarse, stream, config.separation)
    coarse_solution = solve_on(problem, coarse, config, with_condition=False)
    if fine is coarse:
        fine_solution = coarse_solution
    else:
        fine_solution = solve_on(problem, fine, config, with_condition=False)
    pts = coarse.all_points() if eval_points is None else eval_points
    return np.abs(evaluate(fine_solution, pts) - evaluate(coarse_solution, pts))


def _nominate_removals(points, tests, errors, low_mask):
    """Map each low-error test point to its nearest interior node.

    Returns interior indices, deduplicated, ordered by the smallest
    nominating error so the most confidently resolved nodes go first.
    """
    if not low_mask.any():
        return np.empty(0, dtype=np.int64)
    cell = 1.0 / max(4.0, math.sqrt(points.n_interior))
    grid = CellGrid(points.interior, cell)
    best = {}
    for t in np.nonzero(low_mask)[0]:
        idx = grid.nearest(tests[t])
        err = errors[t]
        if idx not in best or err < best[idx]:
            best[idx] = err
    ordered = sorted(best.items(), key=lambda kv: (kv[1], kv[0]))
    return np.asarray([idx for idx, _ in ordered], dtype=np.int64)


def _filter_additions(points, candidates, separation):
    """Greedily keep candidates at least ``separation`` from everything.

    Checked against the full pre-removal point set and previously accepted
    candidates, so an addition colliding with a removed node is dropped.
    """
    if candidates.shape[0] == 0:
        return candidates.reshape(0, 2)
    grid = CellGrid(points.all_points(), max(separation, 1e-12))
    sep2 = separation * separation
    accepted = []
    for cand in candidates:
        if grid.in_ball(cand, separation).size:
            continue
        if accepted:
            d = np.asarray(accepted) - cand
            if np.einsum("ij,ij->i", d, d).min() < sep2:
                continue
        accepted.append(cand)
    return np.asarray(accepted).reshape(-1, 2)


def refinement_decision(points, tests, errors, config):
    """Additions and interior removal indices for one iteration."""
    additions = _filter_additions(points, tests[errors > config.tau_max], config.separation)
    removals = _nominate_removals(points, tests, errors, errors < config.tau_min)
    allowed = points.n_interior + additions.shape[0] - config.min_interior
    if removals.shape[0] > allowed:
        removals = removals[: max(allowed, 0)]
    return additions, removals


def apply_refinement(points, additions, removals, separation):
    """Next point set: edit the interior, regenerate the boundary ring."""
    keep = np.ones(points.n_interior, dtype=bool)
    keep[removals] = False
    interior = points.interior[keep]
    if additions.shape[0]:
        interior = np.vstack([interior, additions])
    # Dropping an interior point that hugs the regenerated ring changes the
    # ring size, which moves the ring points, so sweep until stable.
    while True:
        boundary = boundary_ring(boundary_count(interior.shape[0]))
        bgrid = CellGrid(boundary, max(separation, 1e-12))
        clear = np.asarray(
            [bgrid.in_ball(p, separation).size == 0 for p in interior], dtype=bool
        )
        if clear.all():
            return PointSet(interior, boundary)
        interior = interior[clear]


def solve_adaptive(problem, initial, config=None, test_stream=None):
    """Run the adaptive refinement loop until a stopping rule fires.

    Returns the result of the last solved iteration; the decided additions
    and removals of that iteration are recorded but not applied.
    """
    config = (config or AdaptiveConfig()).validated()
    stream = test_stream if test_stream is not None else HaltonStream()
    points = initial
    records = []
    stop_reason = STOP_MAX_ITERATIONS
    solution = None
    t_start = time.perf_counter()
    for k in range(1, config.max_iterations + 1):
        t_iter = time.perf_counter()
        solution = solve_on(problem, points, config)
        mae, rmse = solution_errors(solution, problem)
        tests = stream.draw(math.ceil(config.test_multiplier * points.n_interior))
        if config.indicator == "interp":
            errors = indicator_interpolant(solution, tests)
        else:
            errors = indicator_coarse_fine(
                problem, points, config, stream=stream, eval_points=tests
            )
        additions, removals = refinement_decision(points, tests, errors, config)
        records.append(
            IterationRecord(
                k=k,
                n_interior=points.n_interior,
                n_boundary=points.n_boundary,
                n_total=points.n_total,
                n_added=additions.shape[0],
                n_removed=removals.shape[0],
                mae=mae,
                rmse=rmse,
                condition=solution.condition,
                seconds=time.perf_counter() - t_iter,
                points=points,
                test_points=tests,
                indicator_values=errors,
            )
        )
        if config.stopping == "both_empty":
            if additions.shape[0] == 0 and removals.shape[0] == 0:
                stop_reason = STOP_CONVERGED
                break
        else:
            if removals.shape[0] == 0:
                stop_reason = STOP_REMOVAL_EMPTY
                break
        if k == config.max_iterations:
            stop_reason = STOP_MAX_ITERATIONS
            break
        nxt = apply_refinement(points, additions, removals, config.separation)
        if nxt.n_total > config.max_points:
            stop_reason = STOP_MAX_POINTS
            break
        points = nxt
    records[-1].stop_reason = stop_reason
    return AdaptiveResult(
        solution=solution,
        points=points,
        records=records,
        stop_reason=stop_reason,
        seconds_total=time.perf_counter() - t_start,
    )
