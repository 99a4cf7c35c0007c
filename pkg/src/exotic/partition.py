"""Hierarchical K-ary partition of the outer search box and its tree.

Cells live in the parameter space of W (simplex factors are charted by
stick-breaking boxes), so splitting is plain interval arithmetic: the
longest edge, ties to the lowest coordinate, cut into K equal pieces.
Node indices follow the dense K-ary grid: child j of node (h, i) is
(h+1, K*i + j), which makes tie-breaking reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateCellError, ExoticError

__all__ = ["Cell", "TreeNode", "Tree", "split", "cell_center", "diameter_bound"]


@dataclass(frozen=True)
class Cell:
    """Axis-aligned box at a given depth of the partition."""

    lower: np.ndarray
    upper: np.ndarray
    depth: int
    index: int

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ExoticError("cell bounds must be 1-d arrays of equal length")
        if np.any(hi < lo):
            raise ExoticError("cell requires lower <= upper")
        if self.depth < 0 or self.index < 0:
            raise ExoticError("cell depth and index must be nonnegative")

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def center_params(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.widths))

    def contains_params(self, theta: np.ndarray, tol: float = 0.0) -> bool:
        return bool(
            np.all(theta >= self.lower - tol) and np.all(theta <= self.upper + tol)
        )


def split(cell: Cell, arity: int) -> list[Cell]:
    """Cut the longest edge (ties: lowest coordinate) into `arity` equal
    sub-intervals; children inherit every other bound."""
    if arity < 2:
        raise ExoticError("arity must be >= 2")
    widths = cell.widths
    axis = int(np.argmax(widths))
    if widths[axis] <= 0.0:
        raise DegenerateCellError(
            f"cell at depth {cell.depth} has zero-width longest edge"
        )
    lo, hi = cell.lower[axis], cell.upper[axis]
    cuts = lo + (hi - lo) * np.arange(arity + 1) / arity
    cuts[0], cuts[-1] = lo, hi
    children = []
    for j in range(arity):
        c_lo = cell.lower.copy()
        c_hi = cell.upper.copy()
        c_lo[axis], c_hi[axis] = cuts[j], cuts[j + 1]
        children.append(
            Cell(c_lo, c_hi, depth=cell.depth + 1, index=arity * cell.index + j)
        )
    return children


def cell_center(cell: Cell, outer_from_params: Callable[[np.ndarray], object]):
    """Representative point of a cell: the parameter-space midpoint mapped
    into W (through the stick-breaking charts where applicable)."""
    return outer_from_params(cell.center_params)


@dataclass
class TreeNode:
    """Search-tree node: cell, representative outer point w, approximate
    value b, solver initializer lam, and the solver-iteration count s that
    produced b. `latest_x` and `total_iters` track warm restarts."""

    cell: Cell
    w: object
    inner: object = None
    b: float = 0.0
    lam: Optional[np.ndarray] = None
    s: int = 0
    children: list = field(default_factory=list)
    latest_x: Optional[np.ndarray] = None
    evaluated: bool = False
    total_iters: int = 0
    refine_iters: int = 0
    corrective_iters: int = 0

    @property
    def depth(self) -> int:
        return self.cell.depth

    @property
    def index(self) -> int:
        return self.cell.index

    def is_leaf(self) -> bool:
        return not self.children


class Tree:
    """K-ary tree over the partition, with per-depth node registers."""

    def __init__(self, root: TreeNode, arity: int):
        if arity < 2:
            raise ExoticError("arity must be >= 2")
        self.root = root
        self.arity = arity
        self.depth_nodes: dict[int, list[TreeNode]] = {0: [root]}

    def register(self, node: TreeNode) -> None:
        self.depth_nodes.setdefault(node.depth, []).append(node)

    def add_children(self, parent: TreeNode, children: list[TreeNode]) -> None:
        if parent.children:
            raise ExoticError("node already expanded")
        parent.children = list(children)
        for child in children:
            self.register(child)

    def nodes(self):
        for h in sorted(self.depth_nodes):
            yield from self.depth_nodes[h]

    def max_depth(self) -> int:
        return max(self.depth_nodes)

    def param_diameter(self) -> float:
        return self.root.cell.diameter

    def to_json_obj(self) -> list[dict]:
        """Per-node records for trace dumps and animations."""
        out = []
        for node in self.nodes():
            out.append(
                {
                    "depth": node.depth,
                    "index": node.index,
                    "bounds": [
                        [float(a), float(b)]
                        for a, b in zip(node.cell.lower, node.cell.upper)
                    ],
                    "value": float(node.b) if node.evaluated else None,
                    "count": int(node.s),
                }
            )
        return out


def diameter_bound(tree: Tree, h: int) -> float:
    """Geometric envelope alpha*beta^h for depth-h cell diameters, with
    alpha the root diameter and beta = (1/K)^(1/D); actual cells obey it
    up to a sqrt(D) slack."""
    if h < 0:
        raise ExoticError("depth must be >= 0")
    d = tree.root.cell.lower.size
    alpha = tree.param_diameter()
    beta = (1.0 / tree.arity) ** (1.0 / d)
    return alpha * beta**h
