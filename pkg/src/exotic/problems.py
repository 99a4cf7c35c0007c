"""Min-max problem instances and the registry of built-in benchmarks.

A problem bundles the objective f(x, y), its x-gradient, the two feasible
sets, and optional extras: a y-gradient (used by the gradient baselines and
by the non-convex wrapper) and an affine-in-x decomposition that unlocks the
fast compiled path of the inner solver.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .domains import BoxDomain, Domain, ProductDomain, SimplexDomain
from .errors import ExoticError

__all__ = [
    "MinMaxProblem",
    "GameSpec",
    "handcrafted_problem",
    "handcrafted_optimum",
    "bilinear_toy",
    "security_game_problem",
    "quartic_saddle",
    "example_security_game",
    "PROBLEM_NAMES",
]

XDomain = Union[BoxDomain, SimplexDomain]


@dataclass(frozen=True)
class MinMaxProblem:
    """An instance of min over x in X of max over y in Y of f(x, y).

    f must be continuous and, for the tree-search solver, convex in x for
    every fixed y (both are contracts, spot-checked by the test suite).
    `affine_x`, when given, maps y to (coef, const) with
    f(x, y) = coef @ x + const for all x.
    """

    name: str
    f: Callable[[np.ndarray, np.ndarray], float]
    grad_x: Callable[[np.ndarray, np.ndarray], np.ndarray]
    x_domain: XDomain
    y_domain: Domain
    grad_y: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    affine_x: Optional[Callable[[np.ndarray], tuple[np.ndarray, float]]] = None
    convex_in_x: bool = True

    @property
    def dx(self) -> int:
        return self.x_domain.dim

    @property
    def dy(self) -> int:
        return self.y_domain.dim


@dataclass(frozen=True)
class GameSpec:
    """Finite N-player game seen from one protected player.

    `cost` is the protected player's dense cost tensor, indexed by the joint
    action profile in player order.
    """

    action_counts: tuple[int, ...]
    protected: int
    cost: np.ndarray

    def __post_init__(self):
        counts = tuple(int(c) for c in self.action_counts)
        object.__setattr__(self, "action_counts", counts)
        if len(counts) < 2:
            raise ExoticError("a game needs at least 2 players")
        if any(c < 1 for c in counts):
            raise ExoticError("every player needs at least one action")
        if not 0 <= int(self.protected) < len(counts):
            raise ExoticError("protected player index out of range")
        object.__setattr__(self, "protected", int(self.protected))
        cost = np.asarray(self.cost, dtype=float)
        if cost.shape != counts:
            raise ExoticError(
                f"cost tensor shape {cost.shape} does not match action counts {counts}"
            )
        if not np.all(np.isfinite(cost)):
            raise ExoticError("cost tensor entries must be finite")
        object.__setattr__(self, "cost", cost)

    @property
    def num_players(self) -> int:
        return len(self.action_counts)

    @property
    def adversaries(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.num_players) if j != self.protected)

    @staticmethod
    def from_json(doc: Union[str, dict]) -> "GameSpec":
        """Parse {"action_counts": [...], "protected": i, "cost": [flat row-major]}."""
        if isinstance(doc, str):
            doc = json.loads(doc)
        unknown = set(doc) - {"action_counts", "protected", "cost"}
        if unknown:
            raise ExoticError(f"unknown game keys: {sorted(unknown)}")
        counts = tuple(int(c) for c in doc["action_counts"])
        flat = np.asarray(doc["cost"], dtype=float)
        expected = int(np.prod(counts))
        if flat.size != expected:
            raise ExoticError(
                f"cost array has {flat.size} entries, expected {expected}"
            )
        return GameSpec(counts, int(doc.get("protected", 0)), flat.reshape(counts))

    def to_json(self) -> str:
        return json.dumps(
            {
                "action_counts": list(self.action_counts),
                "protected": self.protected,
                "cost": [float(v) for v in self.cost.reshape(-1)],
            }
        )


def handcrafted_problem(dx: int, dy: int, c: float) -> MinMaxProblem:
    """Benchmark family with a known optimum: f = -(sum y)^3 + (sum x)(sum y).

    X = [-c, c]^dx and Y = [-1, 1]^dy. The objective is linear in x and a
    cubic in the aggregate of y, hence convex-non-concave. The closed-form
    optimum of `handcrafted_optimum` is guaranteed for c > 3*dy^2/dx; smaller
    positive c is accepted but comes with no such guarantee.
    """
    dx, dy = int(dx), int(dy)
    if dx < 1 or dy < 1:
        raise ExoticError("dimensions must be positive")
    if not c > 0:
        raise ExoticError("c must be positive")

    def f(x, y):
        sy = float(np.sum(y))
        return -sy**3 + float(np.sum(x)) * sy

    def grad_x(x, y):
        return np.full(dx, float(np.sum(y)))

    def grad_y(x, y):
        sy = float(np.sum(y))
        return np.full(dy, -3.0 * sy**2 + float(np.sum(x)))

    def affine_x(y):
        sy = float(np.sum(y))
        return np.full(dx, sy), -sy**3

    return MinMaxProblem(
        name=f"handcrafted(dx={dx},dy={dy},c={c:g})",
        f=f,
        grad_x=grad_x,
        grad_y=grad_y,
        affine_x=affine_x,
        x_domain=BoxDomain.cube(c, dx),
        y_domain=BoxDomain.cube(1.0, dy),
    )


def handcrafted_optimum(dx: int, dy: int) -> tuple[float, float, tuple[float, float]]:
    """Closed-form optimum of the handcrafted family (valid for c > 3*dy^2/dx).

    Returns (optimal value, optimal aggregate sum(x), the two optimal
    aggregates sum(y)).
    """
    dx, dy = int(dx), int(dy)
    if dx < 1 or dy < 1:
        raise ExoticError("dimensions must be positive")
    return 0.25 * dy**3, 0.75 * dy**2, (-float(dy), 0.5 * dy)


def bilinear_toy() -> MinMaxProblem:
    """Convex-concave sanity instance f(x, y) = x*y on [-1,1]^2, value 0."""

    def f(x, y):
        return float(x[0]) * float(y[0])

    return MinMaxProblem(
        name="bilinear",
        f=f,
        grad_x=lambda x, y: np.array([float(y[0])]),
        grad_y=lambda x, y: np.array([float(x[0])]),
        affine_x=lambda y: (np.array([float(y[0])]), 0.0),
        x_domain=BoxDomain.cube(1.0, 1),
        y_domain=BoxDomain.cube(1.0, 1),
    )


def _contract_adversaries(game: GameSpec, strategies: dict[int, np.ndarray]) -> np.ndarray:
    """Contract the cost tensor with the given players' mixed strategies.

    Returns the tensor over the remaining players' actions. Contracting in
    descending axis order keeps the earlier axis numbers stable.
    """
    t = game.cost
    for j in sorted(strategies, reverse=True):
        t = np.tensordot(t, strategies[j], axes=([j], [0]))
    return t


def security_game_problem(game: GameSpec) -> MinMaxProblem:
    """Security problem of the protected player: min over own mixed strategy,
    max over the adversaries' joint (product) mixed strategies of the
    expected cost. Multilinear, hence linear in the protected strategy.
    """
    adv = game.adversaries
    adv_domains = tuple(SimplexDomain(game.action_counts[j]) for j in adv)
    y_domain = ProductDomain(adv_domains)

    def _coeffs(y):
        # expected cost per own pure action, adversary strategies fixed
        parts = y_domain.split(y)
        return _contract_adversaries(game, dict(zip(adv, parts)))

    def f(x, y):
        return float(np.dot(_coeffs(y), x))

    def grad_x(x, y):
        return _coeffs(y)

    def grad_y(x, y):
        parts = y_domain.split(y)
        strategies = dict(zip(adv, parts))
        strategies[game.protected] = np.asarray(x, dtype=float)
        grads = []
        for j in adv:
            others = {k: v for k, v in strategies.items() if k != j}
            grads.append(_contract_adversaries(game, others))
        return np.concatenate(grads)

    return MinMaxProblem(
        name="security",
        f=f,
        grad_x=grad_x,
        grad_y=grad_y,
        affine_x=lambda y: (_coeffs(y), 0.0),
        x_domain=SimplexDomain(game.action_counts[game.protected]),
        y_domain=y_domain,
    )


def quartic_saddle() -> MinMaxProblem:
    """Non-convex-concave instance f = x^4 - x^2 - y^2 + x*y on [-2,2]^2.

    Min-max value -9/64. Intended for the role-swapping wrapper; the
    objective is not convex in x, so the direct tree-search contract does
    not hold.
    """

    def f(x, y):
        xv, yv = float(x[0]), float(y[0])
        return xv**4 - xv**2 - yv**2 + xv * yv

    return MinMaxProblem(
        name="quartic-saddle",
        f=f,
        grad_x=lambda x, y: np.array([4.0 * float(x[0]) ** 3 - 2.0 * float(x[0]) + float(y[0])]),
        grad_y=lambda x, y: np.array([-2.0 * float(y[0]) + float(x[0])]),
        x_domain=BoxDomain.cube(2.0, 1),
        y_domain=BoxDomain.cube(2.0, 1),
        convex_in_x=False,
    )


#: Names accepted by the command-line problem registry.
PROBLEM_NAMES = ("handcrafted", "security", "bilinear", "custom")


def example_security_game() -> GameSpec:
    """3-player, 2-action security instance used throughout tests and docs.

    Exact security value of player 0 is 11.7/7 at the mixed strategy
    (2/7, 5/7).
    """
    cost = np.array(
        [
            [[2.1, 1.2], [1.5, 1.6]],
            [[1.5, 0.4], [1.5, 1.7]],
        ]
    )
    return GameSpec((2, 2, 2), 0, cost)
