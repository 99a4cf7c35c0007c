"""Lifted outer problem for the tree search.

A convex-non-concave min-max problem over X x Y is equivalent to maximizing

    G(w) = min over x in X of  F(x, w),   F(x, w) = max_i f(x, y_i),

over w in W = Y^(p+1), where p is the intrinsic (parameter) dimension of X
and w stacks p+1 points of Y. Each w therefore selects finitely many y's,
the inner problem becomes convex, and G can be driven by an iterative
solver. This module builds W, the outer points, and the inner objective F.

The epigraph variable t that makes the inner objective linear is never
materialized: the inner problem is solved directly as min_x F(x, w) and t
is reported as F(x, w), which is feasible by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domains import Domain, ProductDomain
from .errors import ExoticError
from .problems import MinMaxProblem

__all__ = [
    "OuterPoint",
    "InnerProblem",
    "lift_count",
    "outer_domain",
    "outer_param_bounds",
    "outer_point_from_params",
    "inner_objective_F",
    "feasibility_residual",
]


MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True)
class OuterPoint:
    """A point of W: an ordered tuple of points of Y."""

    components: tuple[np.ndarray, ...]

    def __post_init__(self):
        comps = tuple(np.asarray(c, dtype=float) for c in self.components)
        object.__setattr__(self, "components", comps)

    def __len__(self) -> int:
        return len(self.components)

    def flatten(self) -> np.ndarray:
        return np.concatenate(self.components)


def lift_count(problem: MinMaxProblem) -> int:
    """Number of Y-copies in W: intrinsic dimension of X plus one."""
    return problem.x_domain.param_dim + 1


def _flatten_factors(domain: Domain) -> tuple:
    if isinstance(domain, ProductDomain):
        return domain.factors
    return (domain,)


def outer_domain(problem: MinMaxProblem) -> ProductDomain:
    """W as a product domain: lift_count copies of Y, factors flattened."""
    copies = lift_count(problem)
    return ProductDomain(_flatten_factors(problem.y_domain) * copies)


def outer_param_bounds(problem: MinMaxProblem) -> tuple[np.ndarray, np.ndarray]:
    """Parameter-space box of W (the space the partition tree splits)."""
    lo, hi = problem.y_domain.param_bounds()
    copies = lift_count(problem)
    return np.tile(lo, copies), np.tile(hi, copies)


def outer_point_from_params(problem: MinMaxProblem, theta: np.ndarray) -> OuterPoint:
    """Map a W-parameter vector to the tuple of ambient Y points."""
    theta = np.asarray(theta, dtype=float)
    copies = lift_count(problem)
    per = problem.y_domain.param_dim
    if theta.shape != (copies * per,):
        raise ExoticError(
            f"expected {copies * per} outer parameters, got shape {theta.shape}"
        )
    comps = tuple(
        problem.y_domain.from_params(theta[i * per : (i + 1) * per])
        for i in range(copies)
    )
    return OuterPoint(comps)


class InnerProblem:
    """The convex problem attached to one outer point w.

    Minimize F(x, w) = max_i f(x, y_i) over X. F is a pointwise max of
    convex functions, so generally non-smooth; a subgradient at x is the
    x-gradient of any achieving piece (lowest index on ties).
    """

    def __init__(self, problem: MinMaxProblem, outer: OuterPoint):
        if len(outer) != lift_count(problem):
            raise ExoticError(
                f"outer point has {len(outer)} components, expected {lift_count(problem)}"
            )
        for comp in outer.components:
            if not problem.y_domain.contains(comp, MEMBERSHIP_TOL):
                raise ExoticError("outer point component outside Y")
        self.problem = problem
        self.outer = outer
        self.domain = problem.x_domain
        self._pieces: Optional[tuple[np.ndarray, np.ndarray]] = None
        if problem.affine_x is not None:
            rows = [problem.affine_x(c) for c in outer.components]
            coefs = np.ascontiguousarray([r[0] for r in rows], dtype=float)
            consts = np.ascontiguousarray([r[1] for r in rows], dtype=float)
            self._pieces = (coefs, consts)

    def affine_pieces(self) -> Optional[tuple[np.ndarray, np.ndarray]]:
        """(coefs, consts) with F(x) = max_i coefs[i] @ x + consts[i], if affine."""
        return self._pieces

    def value(self, x: np.ndarray) -> float:
        if self._pieces is not None:
            coefs, consts = self._pieces
            return float(np.max(coefs @ x + consts))
        return max(self.problem.f(x, c) for c in self.outer.components)

    def value_and_subgrad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        if self._pieces is not None:
            coefs, consts = self._pieces
            vals = coefs @ x + consts
            i = int(np.argmax(vals))
            return float(vals[i]), coefs[i]
        vals = [self.problem.f(x, c) for c in self.outer.components]
        i = int(np.argmax(vals))
        return float(vals[i]), self.problem.grad_x(x, self.outer.components[i])


def inner_objective_F(inner: InnerProblem, x: np.ndarray) -> float:
    """F(x, w), the max of f over the outer point's components."""
    x = np.asarray(x, dtype=float)
    if not inner.domain.contains(x):
        raise ExoticError("x outside the inner feasible set")
    return inner.value(x)


def feasibility_residual(inner: InnerProblem, t: float, x: np.ndarray) -> float:
    """max_i f(x, y_i) - t; nonpositive exactly when (t, x) is feasible."""
    return inner.value(np.asarray(x, dtype=float)) - float(t)
