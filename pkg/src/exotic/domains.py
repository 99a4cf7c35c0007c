"""Feasible-set geometry: boxes, probability simplices and their products.

Every domain supports two coordinate views:

* the *ambient* view, the vectors actually passed to objective functions
  (a simplex over m actions lives in R^m);
* the *parameter* view, a box used for hierarchical partitioning and grid
  construction (a simplex is charted by m-1 stick-breaking coordinates
  in [0,1]^{m-1}).

For boxes the two views coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ExoticError

__all__ = [
    "BoxDomain",
    "SimplexDomain",
    "ProductDomain",
    "Domain",
    "project_box",
    "project_simplex",
]


def project_box(lower: np.ndarray, upper: np.ndarray, point: np.ndarray) -> np.ndarray:
    """Euclidean projection onto a box: coordinate-wise clipping."""
    return np.minimum(np.maximum(point, lower), upper)


def project_simplex(point: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex.

    Sorting-based variant: find the largest prefix of the descending sort
    whose shifted entries stay positive, then threshold.
    """
    v = np.asarray(point, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, v.size + 1)
    cond = u + (1.0 - css) / idx > 0
    rho = int(np.nonzero(cond)[0][-1])
    tau = (1.0 - css[rho]) / (rho + 1)
    return np.maximum(v + tau, 0.0)


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box {x : lower <= x <= upper}."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size < 1:
            raise ExoticError("box bounds must be 1-d arrays of equal positive length")
        if not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)):
            raise ExoticError("box bounds must be finite")
        if np.any(lo > hi):
            raise ExoticError("box requires lower[i] <= upper[i] for all i")

    @staticmethod
    def cube(radius: float, dim: int) -> "BoxDomain":
        """The symmetric box [-radius, radius]^dim."""
        r = float(radius)
        return BoxDomain(np.full(dim, -r), np.full(dim, r))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def param_dim(self) -> int:
        return self.lower.size

    def param_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lower.copy(), self.upper.copy()

    def from_params(self, theta: np.ndarray) -> np.ndarray:
        return np.asarray(theta, dtype=float).copy()

    def project(self, point: np.ndarray) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise ExoticError(f"expected point of dimension {self.dim}, got shape {point.shape}")
        return project_box(self.lower, self.upper, point)

    def contains(self, point: np.ndarray, tol: float = 1e-9) -> bool:
        point = np.asarray(point, dtype=float)
        return point.shape == (self.dim,) and bool(
            np.all(point >= self.lower - tol) and np.all(point <= self.upper + tol)
        )

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper)


@dataclass(frozen=True)
class SimplexDomain:
    """Probability simplex over `dim` actions: x >= 0, sum(x) = 1."""

    dim: int

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ExoticError("simplex dimension must be >= 1")
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def param_dim(self) -> int:
        return self.dim - 1

    def param_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.zeros(self.param_dim), np.ones(self.param_dim)

    def from_params(self, theta: np.ndarray) -> np.ndarray:
        """Stick-breaking chart: theta in [0,1]^{dim-1} -> probability vector."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.param_dim,):
            raise ExoticError(f"expected {self.param_dim} stick coordinates")
        p = np.empty(self.dim)
        rem = 1.0
        for k in range(self.dim - 1):
            p[k] = theta[k] * rem
            rem *= 1.0 - theta[k]
        p[-1] = rem
        return p

    def project(self, point: np.ndarray) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise ExoticError(f"expected point of dimension {self.dim}, got shape {point.shape}")
        return project_simplex(point)

    def contains(self, point: np.ndarray, tol: float = 1e-9) -> bool:
        point = np.asarray(point, dtype=float)
        return point.shape == (self.dim,) and bool(
            np.all(point >= -tol) and abs(float(np.sum(point)) - 1.0) <= tol
        )

    @property
    def center(self) -> np.ndarray:
        return np.full(self.dim, 1.0 / self.dim)

    @property
    def diameter(self) -> float:
        # distance between two vertices; a single-point simplex has none
        return float(np.sqrt(2.0)) if self.dim >= 2 else 0.0

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.dirichlet(np.ones(self.dim))


@dataclass(frozen=True)
class ProductDomain:
    """Cartesian product of boxes and simplices, flattened into one vector."""

    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ExoticError("product domain needs at least one factor")
        for f in factors:
            if not isinstance(f, (BoxDomain, SimplexDomain)):
                raise ExoticError("product factors must be boxes or simplices")
        object.__setattr__(self, "factors", factors)
        dims = np.array([f.dim for f in factors])
        object.__setattr__(self, "_offsets", np.concatenate([[0], np.cumsum(dims)]))
        pdims = np.array([f.param_dim for f in factors])
        object.__setattr__(self, "_poffsets", np.concatenate([[0], np.cumsum(pdims)]))

    @property
    def dim(self) -> int:
        return int(self._offsets[-1])

    @property
    def param_dim(self) -> int:
        return int(self._poffsets[-1])

    def split(self, point: np.ndarray) -> list[np.ndarray]:
        """Slice an ambient vector into per-factor pieces."""
        o = self._offsets
        return [np.asarray(point)[o[i] : o[i + 1]] for i in range(len(self.factors))]

    def param_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        los, his = zip(*(f.param_bounds() for f in self.factors))
        return np.concatenate(los), np.concatenate(his)

    def from_params(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        po = self._poffsets
        parts = [
            f.from_params(theta[po[i] : po[i + 1]]) for i, f in enumerate(self.factors)
        ]
        return np.concatenate(parts)

    def project(self, point: np.ndarray) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise ExoticError(f"expected point of dimension {self.dim}, got shape {point.shape}")
        return np.concatenate(
            [f.project(p) for f, p in zip(self.factors, self.split(point))]
        )

    def contains(self, point: np.ndarray, tol: float = 1e-9) -> bool:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            return False
        return all(f.contains(p, tol) for f, p in zip(self.factors, self.split(point)))

    @property
    def center(self) -> np.ndarray:
        return np.concatenate([f.center for f in self.factors])

    @property
    def diameter(self) -> float:
        return float(np.sqrt(sum(f.diameter**2 for f in self.factors)))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return np.concatenate([f.sample(rng) for f in self.factors])


Domain = Union[BoxDomain, SimplexDomain, ProductDomain]
