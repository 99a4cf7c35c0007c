"""Iterative inner solver: projected subgradient descent on x -> F(x, w).

The solver output is always feasible because the reported objective level
is F at the returned point, never an extrapolation. Two selection rules are
supported: best-iterate (default; the minimum of F over the initializer and
all iterates) and last-iterate, and two step rules: constant and
eta/sqrt(k). The inverse-sqrt rule accepts an index offset so a warm
restart can continue the schedule instead of rewinding it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Protocol

import numpy as np

from . import engine
from .domains import BoxDomain, Domain, SimplexDomain
from .errors import ExoticError

__all__ = [
    "Selection",
    "StepRule",
    "InnerSolverConfig",
    "InnerSolution",
    "project",
    "opt",
    "estimate_G",
]


class Selection(enum.Enum):
    BEST_ITERATE = "best"
    LAST_ITERATE = "last"


class StepRule(enum.Enum):
    CONSTANT = "constant"
    INVERSE_SQRT = "inverse-sqrt"


class InnerMinimization(Protocol):
    """What the solver needs from an inner problem."""

    domain: Domain

    def value(self, x: np.ndarray) -> float: ...

    def value_and_subgrad(self, x: np.ndarray) -> tuple[float, np.ndarray]: ...

    def affine_pieces(self) -> Optional[tuple[np.ndarray, np.ndarray]]: ...


@dataclass(frozen=True)
class InnerSolverConfig:
    """step_size None means diameter(domain)/10, resolved per problem."""

    step_size: Optional[float] = None
    selection: Selection = Selection.BEST_ITERATE
    step_rule: StepRule = StepRule.INVERSE_SQRT
    store_trace: bool = False

    def __post_init__(self):
        if self.step_size is not None and not self.step_size > 0:
            raise ExoticError("step size must be positive")

    def resolved_step(self, domain: Domain) -> float:
        if self.step_size is not None:
            return self.step_size
        d = domain.diameter
        if d <= 0:
            return 1.0
        return d / 10.0


DEFAULT_CONFIG = InnerSolverConfig()


@dataclass(frozen=True)
class InnerSolution:
    """Selected iterate x, its feasible objective level t = F(x, w), the
    iteration count spent, and optionally the per-iterate value trace."""

    x: np.ndarray
    t: float
    iterations_used: int
    trace: Optional[np.ndarray] = None


def project(domain: Domain, point: np.ndarray) -> np.ndarray:
    """Euclidean projection onto a box, simplex, or product of those."""
    return domain.project(np.asarray(point, dtype=float))


def _kernel_args(domain: Domain):
    """Kernel dispatch info for supported domain kinds, else None."""
    if isinstance(domain, BoxDomain):
        return 0, domain.lower, domain.upper
    if isinstance(domain, SimplexDomain):
        z = np.zeros(domain.dim)
        return 1, z, z
    return None


def opt(
    inner: InnerMinimization,
    init: np.ndarray,
    iterations: int,
    config: InnerSolverConfig = DEFAULT_CONFIG,
    *,
    step_offset: int = 0,
) -> InnerSolution:
    """Run `iterations` projected subgradient steps from init (projected
    into the domain first) and return the selected iterate."""
    if iterations < 1:
        raise ExoticError("iterations must be >= 1")
    eta = config.resolved_step(inner.domain)
    inverse_sqrt = config.step_rule is StepRule.INVERSE_SQRT
    trace = np.empty(iterations + 1) if config.store_trace else None

    pieces = inner.affine_pieces()
    kargs = _kernel_args(inner.domain)
    if pieces is not None and kargs is not None:
        kind, lo, hi = kargs
        coefs, consts = pieces
        x_best, t_best, x_last, t_last = engine.active.pgd_max_affine(
            coefs, consts, kind, lo, hi,
            np.asarray(init, dtype=float), int(iterations), float(eta),
            bool(inverse_sqrt), int(step_offset), trace,
        )
    else:
        x = inner.domain.project(np.asarray(init, dtype=float))
        t, g = inner.value_and_subgrad(x)
        x_best, t_best = x.copy(), t
        if trace is not None:
            trace[0] = t
        for k in range(1, iterations + 1):
            step = eta / math.sqrt(step_offset + k) if inverse_sqrt else eta
            x = inner.domain.project(x - step * g)
            t, g = inner.value_and_subgrad(x)
            if t < t_best:
                t_best, x_best = t, x.copy()
            if trace is not None:
                trace[k] = t
        x_last, t_last = x, t

    if config.selection is Selection.BEST_ITERATE:
        x_out, t_out = x_best, t_best
    else:
        x_out, t_out = x_last, t_last
    return InnerSolution(x=np.asarray(x_out), t=float(t_out),
                         iterations_used=int(iterations), trace=trace)


def estimate_G(
    inner: InnerMinimization,
    init: np.ndarray,
    iterations: int,
    config: InnerSolverConfig = DEFAULT_CONFIG,
) -> float:
    """Feasible upper estimate of G(w) = min_x F(x, w) after j iterations."""
    return opt(inner, init, iterations, config).t
