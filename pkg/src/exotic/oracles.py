"""Independent ground-truth engines used by tests and acceptance checks.

Brute force on dense grids for tiny instances, and exact security values
for finite games. The game oracle rests on multilinearity: the worst case
over a product of simplices is attained at a pure joint action, so the
security value is the minimum over the protected player's simplex of a
finite max of linear functions, solved exactly by enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ExoticError, GridTooLargeError
from .problems import GameSpec, MinMaxProblem

__all__ = [
    "GridSpec",
    "grid_minmax",
    "security_value_exact",
    "worst_case_response",
]

GRID_CAP = 10_000_000


@dataclass(frozen=True)
class GridSpec:
    """Points per parameter dimension, applied to both players' sets."""

    points_per_dimension: int = 101

    def __post_init__(self):
        if self.points_per_dimension < 2:
            raise ExoticError("need at least 2 grid points per dimension")


def _param_grid(domain, points: int) -> np.ndarray:
    """All grid points of a domain, ambient coordinates, one per row."""
    lo, hi = domain.param_bounds()
    axes = [np.linspace(lo[i], hi[i], points) for i in range(lo.size)]
    if not axes:
        return domain.center.reshape(1, -1)
    mesh = np.meshgrid(*axes, indexing="ij")
    thetas = np.stack([m.reshape(-1) for m in mesh], axis=1)
    return np.array([domain.from_params(t) for t in thetas])


def grid_minmax(problem: MinMaxProblem, grid: GridSpec) -> tuple[float, np.ndarray, np.ndarray]:
    """min over grid-X of max over grid-Y of f; first index wins ties.

    Returns (value, argmin x, the y achieving the inner max at that x).
    """
    p = grid.points_per_dimension
    nx = p ** problem.x_domain.param_dim
    ny = p ** problem.y_domain.param_dim
    if nx * ny > GRID_CAP:
        raise GridTooLargeError(
            f"{nx} x {ny} grid evaluations exceed the cap of {GRID_CAP}"
        )
    xs = _param_grid(problem.x_domain, p)
    ys = _param_grid(problem.y_domain, p)
    best_val = None
    best_x = best_y = None
    for x in xs:
        inner_val = None
        inner_y = None
        for y in ys:
            v = problem.f(x, y)
            if inner_val is None or v > inner_val:
                inner_val, inner_y = v, y
        if best_val is None or inner_val < best_val:
            best_val, best_x, best_y = inner_val, x, inner_y
    return float(best_val), best_x, best_y


def _pure_profiles(game: GameSpec):
    ranges = [range(game.action_counts[j]) for j in game.adversaries]
    return itertools.product(*ranges)


def _profile_costs(game: GameSpec, profile: tuple[int, ...]) -> np.ndarray:
    """Cost per protected action when the adversaries play `profile`."""
    idx: list = [slice(None)] * game.num_players
    for j, a in zip(game.adversaries, profile):
        idx[j] = a
    return game.cost[tuple(idx)]


def worst_case_response(game: GameSpec, strategy: np.ndarray) -> tuple[tuple[int, ...], float]:
    """Pure adversary profile maximizing the protected player's expected
    cost against `strategy`; lexicographically lowest profile on ties."""
    strategy = np.asarray(strategy, dtype=float)
    best_profile = None
    best_value = None
    for profile in _pure_profiles(game):
        value = float(np.dot(_profile_costs(game, profile), strategy))
        if best_value is None or value > best_value + 1e-15:
            best_value, best_profile = value, profile
    return best_profile, best_value


def security_value_exact(game: GameSpec) -> tuple[float, np.ndarray]:
    """Exact security value and an optimal strategy of the protected player.

    Minimizes z -> max_j c_j @ z over the simplex, where j runs over pure
    adversary profiles. Two actions reduce to one-dimensional piecewise
    linear minimization; up to four actions are handled by enumerating the
    basic feasible points of the epigraph program.
    """
    m = game.action_counts[game.protected]
    profiles = list(_pure_profiles(game))
    costs = np.array([_profile_costs(game, pr) for pr in profiles])  # (J, m)
    if m == 1:
        return float(np.max(costs[:, 0])), np.ones(1)
    if m == 2:
        return _piecewise_linear_min(costs)
    if m <= 4:
        return _epigraph_vertex_min(costs)
    raise ExoticError("exact oracle supports at most 4 protected actions")


def _env_value(costs: np.ndarray, z: np.ndarray) -> float:
    return float(np.max(costs @ z))


def _piecewise_linear_min(costs: np.ndarray) -> tuple[float, np.ndarray]:
    """Minimize max_j of linear costs over the 2-action simplex.

    Strategy (p, 1-p): each profile contributes an affine function of p;
    the upper envelope's minimum sits at p in {0, 1} or at a crossing.
    """
    slopes = costs[:, 0] - costs[:, 1]
    offsets = costs[:, 1]
    candidates = {0.0, 1.0}
    n = len(slopes)
    for a in range(n):
        for b in range(a + 1, n):
            denom = slopes[a] - slopes[b]
            if abs(denom) > 1e-14:
                p = (offsets[b] - offsets[a]) / denom
                if 0.0 < p < 1.0:
                    candidates.add(float(p))
    best_p, best_v = None, None
    for p in sorted(candidates):
        v = float(np.max(slopes * p + offsets))
        if best_v is None or v < best_v - 1e-15:
            best_v, best_p = v, p
    z = np.array([best_p, 1.0 - best_p])
    return best_v, z


def _epigraph_vertex_min(costs: np.ndarray) -> tuple[float, np.ndarray]:
    """Enumerate basic feasible points of min t s.t. costs @ z <= t, z in
    the simplex. A vertex of the program activates m constraints on top of
    the simplex equality, drawn from the z >= 0 facets and the cost rows;
    evaluating the envelope at every such z is exact because the optimum is
    one of them."""
    n_rows, m = costs.shape
    # constraint list: ("zero", i) for z_i = 0; ("row", j) for costs[j]@z = t
    cons = [("zero", i) for i in range(m)] + [("row", j) for j in range(n_rows)]
    best_v, best_z = None, None
    for combo in itertools.combinations(range(len(cons)), m):
        a_mat = np.zeros((m + 1, m + 1))  # variables (z_0..z_{m-1}, t)
        rhs = np.zeros(m + 1)
        a_mat[0, :m] = 1.0
        rhs[0] = 1.0
        for r, ci in enumerate(combo, start=1):
            kind, k = cons[ci]
            if kind == "zero":
                a_mat[r, k] = 1.0
            else:
                a_mat[r, :m] = costs[k]
                a_mat[r, m] = -1.0
        try:
            sol = np.linalg.solve(a_mat, rhs)
        except np.linalg.LinAlgError:
            continue
        z = sol[:m]
        if np.any(z < -1e-9) or not np.all(np.isfinite(z)):
            continue
        z = np.maximum(z, 0.0)
        z = z / np.sum(z)
        t = _env_value(costs, z)
        if best_v is None or t < best_v - 1e-12:
            best_v, best_z = float(t), z
    return best_v, best_z
