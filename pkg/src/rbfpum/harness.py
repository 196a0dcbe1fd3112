"""Run orchestration: configs, adaptive and fixed-grid runs, file outputs."""

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .adaptivity import (
    AdaptiveConfig,
    covering_for,
    solution_errors,
    solve_adaptive,
    solve_on,
)
from .assembly import assemble
from .geometry import HaltonStream, make_initial_points, unit_grid
from .kernels import make_kernel
from .problems import make_problem
from .solver import evaluate

HISTORY_COLUMNS = [
    "k",
    "N_i",
    "N_b",
    "N_tot",
    "added",
    "removed",
    "mae",
    "rmse",
    "cn",
    "seconds",
    "stop_reason",
]


@dataclass
class RunConfig:
    """Everything a solve run needs; mirrors the CLI options."""

    problem: str = "u1"
    mode: str = "grid"
    n_side: int = 11
    epsilon: float = 3.0
    kernel: str = "matern6"
    tau_min: float = 1e-8
    tau_max: float = 1e-5
    indicator: str = "interp"
    test_multiplier: float = 2.0
    patches_per_axis: int = 0
    overlap: float = 2.25
    max_iterations: int = 50
    max_points: int = 5000
    separation: float = 1e-4
    stopping: str = "both_empty"
    dump_matrix: bool = False
    figures: bool = True
    out: str = ""

    def adaptive_config(self):
        return AdaptiveConfig(
            epsilon=self.epsilon,
            kernel=self.kernel,
            tau_min=self.tau_min,
            tau_max=self.tau_max,
            indicator=self.indicator,
            test_multiplier=self.test_multiplier,
            patches_per_axis=self.patches_per_axis,
            overlap=self.overlap,
            max_iterations=self.max_iterations,
            max_points=self.max_points,
            separation=self.separation,
            stopping=self.stopping,
        ).validated()


CONFIG_FIELD_TYPES = {
    "problem": str,
    "mode": str,
    "n_side": int,
    "epsilon": float,
    "kernel": str,
    "tau_min": float,
    "tau_max": float,
    "indicator": str,
    "test_multiplier": float,
    "patches_per_axis": int,
    "overlap": float,
    "max_iterations": int,
    "max_points": int,
    "separation": float,
    "stopping": str,
    "dump_matrix": bool,
    "figures": bool,
    "out": str,
}


def parse_config_file(path):
    """Flat key=value file; blank lines and #-comments are skipped."""
    values = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in CONFIG_FIELD_TYPES:
            raise ValueError(f"{path}:{lineno}: unknown option {key!r}")
        kind = CONFIG_FIELD_TYPES[key]
        if kind is bool:
            lowered = value.lower()
            if lowered in ("1", "true", "yes", "on"):
                values[key] = True
            elif lowered in ("0", "false", "no", "off"):
                values[key] = False
            else:
                raise ValueError(f"{path}:{lineno}: bad boolean {value!r}")
        else:
            try:
                values[key] = kind(value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def compute_errors(solution, problem, n_side=40):
    """MAE and RMSE on the uniform n_side grid including boundary points."""
    return solution_errors(solution, problem, n_side)


@dataclass
class RunOutput:
    config: RunConfig
    result: object
    problem: object
    written: list = field(default_factory=list)


def run_solve(config):
    """Adaptive run per the config; writes outputs when ``out`` is set."""
    problem = make_problem(config.problem)
    initial = make_initial_points(config.n_side, config.mode)
    start = 1 + (initial.n_interior if config.mode == "halton" else 0)
    stream = HaltonStream(start)
    result = solve_adaptive(problem, initial, config.adaptive_config(), stream)
    output = RunOutput(config, result, problem)
    if config.out:
        output.written = write_outputs(config, problem, result)
    return output


def _float_cell(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value))


def write_history_csv(path, records):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HISTORY_COLUMNS)
        for rec in records:
            writer.writerow(
                [
                    rec.k,
                    rec.n_interior,
                    rec.n_boundary,
                    rec.n_total,
                    rec.n_added,
                    rec.n_removed,
                    _float_cell(rec.mae),
                    _float_cell(rec.rmse),
                    _float_cell(rec.condition),
                    _float_cell(rec.seconds),
                    rec.stop_reason,
                ]
            )


def write_points_csv(path, points, tests=None):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "kind"])
        for x, y in points.interior:
            writer.writerow([_float_cell(x), _float_cell(y), "interior"])
        for x, y in points.boundary:
            writer.writerow([_float_cell(x), _float_cell(y), "boundary"])
        if tests is not None:
            for x, y in tests:
                writer.writerow([_float_cell(x), _float_cell(y), "test"])


def write_solution_grid_csv(path, solution, problem, n_side=40):
    grid = unit_grid(n_side)
    values = evaluate(solution, grid)
    exact = problem.exact(grid)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "value", "exact", "abs_error"])
        for (x, y), v, e in zip(grid, values, exact):
            writer.writerow(
                [
                    _float_cell(x),
                    _float_cell(y),
                    _float_cell(v),
                    _float_cell(e),
                    _float_cell(abs(v - e)),
                ]
            )
    return grid, values


def write_matrix_csv(path, matrix):
    coo = matrix.tocoo()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "value"])
        for r, c, v in zip(coo.row, coo.col, coo.data):
            writer.writerow([int(r), int(c), repr(float(v))])


def report_payload(config, result):
    """The reproducible part of the report; timings live in their own key."""
    final = result.records[-1]
    history = [
        {
            "k": rec.k,
            "n_interior": rec.n_interior,
            "n_boundary": rec.n_boundary,
            "n_total": rec.n_total,
            "added": rec.n_added,
            "removed": rec.n_removed,
            "mae": rec.mae,
            "rmse": rec.rmse,
            "cn": rec.condition,
        }
        for rec in result.records
    ]
    return {
        "config": asdict(config),
        "problem": config.problem,
        "iterations": result.iterations,
        "stop_reason": result.stop_reason,
        "n_interior": result.points.n_interior,
        "n_boundary": result.points.n_boundary,
        "n_total": result.points.n_total,
        "mae": final.mae,
        "rmse": final.rmse,
        "cn": final.condition,
        "history": history,
    }


def write_report_json(path, config, result):
    payload = report_payload(config, result)
    payload["timings"] = {
        "total_seconds": result.seconds_total,
        "per_iteration": [rec.seconds for rec in result.records],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_outputs(config, problem, result):
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def record(path):
        written.append(str(path))
        return path

    write_report_json(record(out / "report.json"), config, result)
    write_history_csv(record(out / "history.csv"), result.records)
    for rec in result.records:
        write_points_csv(
            record(out / f"points_iter_{rec.k}.csv"), rec.points, rec.test_points
        )
    write_points_csv(record(out / "points_final.csv"), result.points)
    grid, values = write_solution_grid_csv(
        record(out / "solution_grid.csv"), result.solution, problem
    )
    if config.dump_matrix:
        aconfig = config.adaptive_config()
        kernel = make_kernel(config.kernel, config.epsilon)
        covering = covering_for(result.points, aconfig)
        system = assemble(
            result.points, covering, kernel, problem.source, problem.dirichlet
        )
        write_matrix_csv(record(out / "matrix_final.csv"), system.matrix)
    if config.figures:
        from . import plots

        record(plots.points_figure(out / "points_final.png", result.points))
        record(plots.solution_figure(out / "solution_grid.png", grid, values))
        record(plots.history_figure(out / "history.png", result.records))
    return written


@dataclass
class ConvergenceRow:
    side: int
    n_interior: int
    n_boundary: int
    n_total: int
    mae: float
    rmse: float
    condition: float
    seconds: float


def run_convergence(config, sides):
    """Fixed-grid solves at the given sides under the config's discretization."""
    problem = make_problem(config.problem)
    aconfig = config.adaptive_config()
    rows = []
    for side in sides:
        t0 = time.perf_counter()
        points = make_initial_points(side, config.mode)
        solution = solve_on(problem, points, aconfig)
        mae, rmse = solution_errors(solution, problem)
        rows.append(
            ConvergenceRow(
                side,
                points.n_interior,
                points.n_boundary,
                points.n_total,
                mae,
                rmse,
                solution.condition,
                time.perf_counter() - t0,
            )
        )
    if config.out:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "convergence.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["side", "N_i", "N_b", "N_tot", "mae", "rmse", "cn", "seconds"])
            for row in rows:
                writer.writerow(
                    [
                        row.side,
                        row.n_interior,
                        row.n_boundary,
                        row.n_total,
                        _float_cell(row.mae),
                        _float_cell(row.rmse),
                        _float_cell(row.condition),
                        _float_cell(row.seconds),
                    ]
                )
        if config.figures:
            from . import plots

            plots.convergence_figure(out / "convergence.png", rows)
    return rows
