"""Gradient baselines and the first-order saddle residual diagnostic.

Both baselines are plain projected-gradient dynamics: simultaneous updates
(descent in x, ascent in y) and the alternating variant where y reacts to
the already-updated x. They find stationary points at best, which is
exactly what makes them useful comparators for the global solver.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ExoticError, UnsupportedProblemError
from .problems import MinMaxProblem

__all__ = [
    "BaselineConfig",
    "BaselineRun",
    "run_gda",
    "run_agp",
    "saddle_residual",
    "sweep",
    "sweep_csv",
]


@dataclass(frozen=True)
class BaselineConfig:
    step_x: float = 0.05
    step_y: float = 0.05
    iterations: int = 10_000
    init: Optional[tuple[np.ndarray, np.ndarray]] = None
    seed: int = 0
    trace_every: int = 0

    def __post_init__(self):
        if self.step_x <= 0 or self.step_y <= 0:
            raise ExoticError("step sizes must be positive")
        if self.iterations < 0:
            raise ExoticError("iterations must be >= 0")


@dataclass
class BaselineRun:
    x: np.ndarray
    y: np.ndarray
    value: float
    trace: list[tuple[int, float]]


def _require_grads(problem: MinMaxProblem) -> None:
    if problem.grad_y is None:
        raise UnsupportedProblemError(f"{problem.name}: baselines need grad_y")


def _initial_point(problem, config):
    if config.init is not None:
        x0, y0 = config.init
        return (
            problem.x_domain.project(np.asarray(x0, dtype=float)),
            problem.y_domain.project(np.asarray(y0, dtype=float)),
        )
    rng = np.random.default_rng(config.seed)
    return problem.x_domain.sample(rng), problem.y_domain.sample(rng)


def _iterate(problem, config, alternating: bool) -> BaselineRun:
    _require_grads(problem)
    x, y = _initial_point(problem, config)
    trace = []
    for k in range(config.iterations):
        if config.trace_every and k % config.trace_every == 0:
            trace.append((k, problem.f(x, y)))
        gx = problem.grad_x(x, y)
        x_new = problem.x_domain.project(x - config.step_x * gx)
        y_at = x_new if alternating else x
        gy = problem.grad_y(y_at, y)
        y_new = problem.y_domain.project(y + config.step_y * gy)
        x, y = x_new, y_new
    return BaselineRun(x=x, y=y, value=problem.f(x, y), trace=trace)


def run_gda(problem: MinMaxProblem, config: BaselineConfig = BaselineConfig()) -> BaselineRun:
    """Simultaneous projected gradient descent-ascent."""
    return _iterate(problem, config, alternating=False)


def run_agp(problem: MinMaxProblem, config: BaselineConfig = BaselineConfig()) -> BaselineRun:
    """Alternating projected gradient: y responds to the updated x.

    Plain alternation, no smoothing or regularization schedule; used as a
    qualitative comparator only.
    """
    return _iterate(problem, config, alternating=True)


def saddle_residual(
    problem: MinMaxProblem,
    x: np.ndarray,
    y: np.ndarray,
    step_x: float = 1.0,
    step_y: float = 1.0,
) -> float:
    """Norm of the projected first-order stationarity map at (x, y).

    Zero at any interior stationary point; being small is necessary but far
    from sufficient for min-max optimality.
    """
    _require_grads(problem)
    if step_x <= 0 or step_y <= 0:
        raise ExoticError("step sizes must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rx = step_x * (x - problem.x_domain.project(x - problem.grad_x(x, y) / step_x))
    ry = step_y * (y - problem.y_domain.project(y + problem.grad_y(x, y) / step_y))
    return float(np.linalg.norm(np.concatenate([rx, ry])))


def sweep(
    problem: MinMaxProblem,
    algorithm: str,
    runs: int,
    config: BaselineConfig = BaselineConfig(),
    *,
    max_workers: int = 1,
) -> list[dict]:
    """Repeated baseline runs from seeded random initial points.

    Run r uses seed config.seed + r. Rows come back in run order no matter
    how the work is distributed.
    """
    runner = {"gda": run_gda, "agp": run_agp}.get(algorithm)
    if runner is None:
        raise ExoticError(f"unknown baseline algorithm: {algorithm!r}")

    def one(r: int) -> dict:
        cfg = BaselineConfig(
            step_x=config.step_x,
            step_y=config.step_y,
            iterations=config.iterations,
            init=None,
            seed=config.seed + r,
        )
        res = runner(problem, cfg)
        return {
            "seed": cfg.seed,
            "x": res.x,
            "y": res.y,
            "f": res.value,
            "residual": saddle_residual(problem, res.x, res.y, config.step_x, config.step_y),
        }

    if max_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(one, range(runs)))
    return [one(r) for r in range(runs)]


def sweep_csv(problem: MinMaxProblem, rows: list[dict]) -> str:
    """Serialize sweep rows: seed, one column per coordinate, value, residual."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    dx, dy = problem.dx, problem.dy
    header = (
        ["seed"]
        + [f"x{i}" for i in range(dx)]
        + [f"y{i}" for i in range(dy)]
        + ["f", "saddle_residual"]
    )
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [row["seed"]]
            + [repr(float(v)) for v in row["x"]]
            + [repr(float(v)) for v in row["y"]]
            + [repr(float(row["f"])), repr(float(row["residual"]))]
        )
    return buf.getvalue()
