"""The optimistic tree search over the lifted outer space.

Three phases:

* initialization: the root box is split once; each of the K depth-1
  children is evaluated with h_max solver iterations;
* tree expansion: for every depth h up to h_max, up to floor(h_max/h)
  leaves are expanded, picking among depth-h leaves that were evaluated
  with at least floor(h_max/(h*m)) iterations the one with the largest
  approximate value; each new child is evaluated with that many iterations;
* re-evaluation: for p = 0 .. floor(log2 h_max), the best node among those
  evaluated with at least 2^p iterations is re-solved with floor(h_max/2)
  iterations, warm-started from its own best point, so its value can only
  tighten; the best re-evaluated node is returned.

Choosing h_max = floor(2n / (5K(1+ln n)^2)) keeps the total number of
inner-solver iterations at or below the budget n.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import engine
from .domains import Domain
from .errors import BudgetTooSmallError, ExoticError, UnsupportedProblemError
from .inner_solver import (
    DEFAULT_CONFIG,
    InnerSolution,
    InnerSolverConfig,
    StepRule,
    opt,
)
from .partition import Cell, Tree, TreeNode, split
from .problems import MinMaxProblem
from .reformulation import InnerProblem, OuterPoint, outer_param_bounds, outer_point_from_params

__all__ = [
    "ExoticConfig",
    "RunReport",
    "budget_to_hmax",
    "min_budget",
    "run_exotic",
    "solve_ncc",
    "eligible_leaf",
]


def budget_to_hmax(n: int, arity: int, *, log_base: float = math.e) -> int:
    """Maximum tree depth affordable within n total solver iterations:
    floor(2n / (5K (1 + log n)^2)), natural log by default."""
    if n < 1:
        raise ExoticError("budget must be a positive integer")
    if arity < 2:
        raise ExoticError("arity must be >= 2")
    log_n = math.log(n, log_base)
    h = int(2 * n / (5 * arity * (1.0 + log_n) ** 2))
    if h < 1:
        raise BudgetTooSmallError(n, arity, min_budget(arity, log_base=log_base))
    return h


def min_budget(arity: int, *, log_base: float = math.e) -> int:
    """Smallest budget n for which budget_to_hmax(n, arity) reaches 1."""
    lo, hi = 1, 1
    while 2 * hi < 5 * arity * (1.0 + math.log(hi, log_base)) ** 2:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if 2 * mid >= 5 * arity * (1.0 + math.log(mid, log_base)) ** 2:
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass(frozen=True)
class ExoticConfig:
    """Exactly one of `budget` (total inner iterations) or `h_max` must be
    given. The seed only affects optional sampling diagnostics; the search
    itself is deterministic."""

    budget: Optional[int] = None
    h_max: Optional[int] = None
    arity: int = 3
    inner: InnerSolverConfig = DEFAULT_CONFIG
    seed: int = 0

    def __post_init__(self):
        if (self.budget is None) == (self.h_max is None):
            raise ExoticError("provide exactly one of budget or h_max")
        if self.h_max is not None and self.h_max < 1:
            raise ExoticError("h_max must be >= 1")
        if self.budget is not None and self.budget < 1:
            raise ExoticError("budget must be >= 1")
        if self.arity < 2:
            raise ExoticError("arity must be >= 2")

    def resolve_hmax(self) -> int:
        if self.h_max is not None:
            return self.h_max
        return budget_to_hmax(self.budget, self.arity)


@dataclass
class RunReport:
    """Outcome of one tree-search run.

    For the plain solver, `w_components` is the returned outer point (the
    tuple of Y points) and `x` the recovered inner minimizer. For the
    role-swapped wrapper, `x` is the original min player's point and
    `w_components` holds the single recovered max-player point.
    """

    value: float
    w_components: tuple
    x: np.ndarray
    total_inner_iterations: int
    nodes_expanded: int
    nodes_evaluated: int
    expansions_per_depth: dict[int, int]
    h_max: int
    arity: int
    budget: Optional[int]
    wall_time_s: float
    engine: str
    mode: str = "minmax"
    tree: Optional[Tree] = field(default=None, repr=False, compare=False)

    def to_json_obj(self, *, include_time: bool = True) -> dict:
        obj = {
            "mode": self.mode,
            "value": float(self.value),
            "w": [[float(v) for v in comp] for comp in self.w_components],
            "x": [float(v) for v in np.atleast_1d(self.x)],
            "iterations": int(self.total_inner_iterations),
            "nodes_expanded": int(self.nodes_expanded),
            "nodes_evaluated": int(self.nodes_evaluated),
            "expansions_per_depth": {
                str(k): int(v) for k, v in sorted(self.expansions_per_depth.items())
            },
            "h_max": int(self.h_max),
            "arity": int(self.arity),
            "budget": None if self.budget is None else int(self.budget),
            "engine": self.engine,
        }
        if include_time:
            obj["time_s"] = float(self.wall_time_s)
        return obj


class _SearchSpace:
    """What the three phases need to know about a problem."""

    param_lo: np.ndarray
    param_hi: np.ndarray
    inner_domain: Domain

    def outer(self, theta: np.ndarray):
        raise NotImplementedError

    def make_inner(self, outer):
        raise NotImplementedError


class _LiftedSpace(_SearchSpace):
    """Standard route: W = Y^(p+1), inner minimization over X."""

    def __init__(self, problem: MinMaxProblem):
        self.problem = problem
        self.param_lo, self.param_hi = outer_param_bounds(problem)
        self.inner_domain = problem.x_domain

    def outer(self, theta):
        return outer_point_from_params(self.problem, theta)

    def make_inner(self, outer):
        return InnerProblem(self.problem, outer)


class _SwappedInner:
    """Inner minimization of -f(x, .) over Y for a fixed outer x."""

    def __init__(self, problem: MinMaxProblem, x_outer: np.ndarray):
        self.problem = problem
        self.x_outer = x_outer
        self.domain = problem.y_domain

    def value(self, y):
        return -self.problem.f(self.x_outer, y)

    def value_and_subgrad(self, y):
        return -self.problem.f(self.x_outer, y), -self.problem.grad_y(self.x_outer, y)

    def affine_pieces(self):
        return None


class _SwappedSpace(_SearchSpace):
    """Role-swapped route: tree search over X, inner minimization of -f
    over Y. Applicable when f is concave in y."""

    def __init__(self, problem: MinMaxProblem):
        if problem.grad_y is None:
            raise UnsupportedProblemError(
                "the role-swapped solver needs grad_y for the inner minimization"
            )
        self.problem = problem
        self.param_lo, self.param_hi = problem.x_domain.param_bounds()
        self.inner_domain = problem.y_domain

    def outer(self, theta):
        return self.problem.x_domain.from_params(theta)

    def make_inner(self, outer):
        return _SwappedInner(self.problem, outer)


def eligible_leaf(tree: Tree, h: int, threshold: int) -> Optional[TreeNode]:
    """Among depth-h leaves evaluated with at least `threshold` iterations,
    the one with the largest approximate value; ties go to the lowest node
    index. None when no leaf qualifies."""
    if threshold < 1:
        raise ExoticError("threshold must be >= 1")
    best = None
    for node in tree.depth_nodes.get(h, ()):
        if not node.is_leaf() or not node.evaluated or node.s < threshold:
            continue
        if best is None or node.b > best.b or (node.b == best.b and node.index < best.index):
            best = node
    return best


def _ladder_rungs(iters: int) -> int:
    """Rung count for the step ladders: about two rungs per iteration
    doubling, so the bottom step scale is roughly eta0/iters^2 while every
    rung still gets a handful of iterations."""
    if iters <= 1:
        return 1
    return max(1, min(iters, int(2 * math.log2(iters))))


#: Node step sizes anneal with cell size: eta_node = eta_base * ratio^STEP_DECAY,
#: ratio being the cell-to-root diameter ratio. Full proportionality (exponent 1)
#: can leave a warm-started node unable to cover the drift of its inherited
#: initializer, freezing an inflated value that the optimistic selection then
#: latches onto; no annealing (exponent 0) caps the refinement accuracy at the
#: root oscillation scale. The intermediate exponent keeps step budgets ahead
#: of the initializer drift at every depth.
STEP_DECAY = 0.75


class _Search:
    def __init__(self, space: _SearchSpace, config: ExoticConfig):
        self.space = space
        self.config = config
        self.h_max = config.resolve_hmax()
        self.iterations = 0
        self.evaluations = 0
        self.expansions_per_depth: dict[int, int] = {}
        self.root_diameter = 1.0

    def _node_config(self, node: TreeNode) -> InnerSolverConfig:
        base = self.config.inner
        if self.root_diameter <= 0:
            return base
        eta = base.resolved_step(self.space.inner_domain)
        ratio = node.cell.diameter / self.root_diameter
        return InnerSolverConfig(
            step_size=max(eta * ratio**STEP_DECAY, 1e-12),
            selection=base.selection,
            step_rule=base.step_rule,
            store_trace=base.store_trace,
        )

    def _leg_refine(self, node: TreeNode, iters: int) -> None:
        """Refining leg: steps matched to the node's cell scale, schedule
        index continuing across passes so repeated visits keep sharpening."""
        init = node.latest_x if node.latest_x is not None else node.lam
        sol = opt(
            node.inner, init, iters, self._node_config(node),
            step_offset=node.refine_iters,
        )
        self._absorb(node, sol)
        node.refine_iters += iters

    def _leg_anchor(self, node: TreeNode, iters: int) -> None:
        """Anchored leg: an independent estimate from the domain center,
        descending through a ladder of constant steps that sweeps
        geometrically down from the base step. Because it ignores the
        inherited initializer, it caps any inflated value a warm start may
        have frozen into the node; the result is merged by taking the
        better of the two estimates."""
        base = self.config.inner
        eta0 = base.resolved_step(self.space.inner_domain)
        rungs = _ladder_rungs(iters)
        per, extra = divmod(iters, rungs)
        x = self.space.inner_domain.center
        best_x, best_t = None, math.inf
        spent = 0
        for i in range(rungs):
            m = per + (1 if i < extra else 0)
            if m < 1:
                continue
            cfg = InnerSolverConfig(
                step_size=eta0 * 2.0**-i,
                selection=base.selection,
                step_rule=StepRule.CONSTANT,
                store_trace=False,
            )
            sol = opt(node.inner, x, m, cfg)
            spent += m
            x = sol.x
            if sol.t < best_t:
                best_x, best_t = sol.x, sol.t
        self._absorb(node, InnerSolution(x=best_x, t=best_t, iterations_used=spent))

    def _absorb(self, node: TreeNode, sol: InnerSolution) -> None:
        if node.evaluated and node.b < sol.t:
            # keep the better certified level (live only under last-iterate
            # selection, where a pass may end on a worse point)
            sol = InnerSolution(x=node.latest_x, t=node.b, iterations_used=sol.iterations_used)
        node.b = sol.t
        node.latest_x = sol.x
        node.total_iters += sol.iterations_used
        node.evaluated = True
        self.iterations += sol.iterations_used

    def _make_node(self, cell: Cell, lam: np.ndarray) -> TreeNode:
        w = self.space.outer(cell.center_params)
        node = TreeNode(cell=cell, w=w, inner=self.space.make_inner(w), lam=lam)
        return node

    def _expand(self, tree: Tree, parent: TreeNode, iters: int) -> None:
        lam = parent.latest_x if parent.latest_x is not None else self.space.inner_domain.center
        children = [self._make_node(c, lam) for c in split(parent.cell, self.config.arity)]
        tree.add_children(parent, children)
        for child in children:
            self._evaluate_birth(child, iters)

    def _leg_ladder(self, node: TreeNode, iters: int) -> None:
        """Descent leg from the node's own best point through the same
        geometric step ladder as the anchored leg. Restores full-range
        descent capability to a node whose refining steps have become
        microscopic, without discarding what it already found."""
        base = self.config.inner
        eta0 = base.resolved_step(self.space.inner_domain)
        rungs = _ladder_rungs(iters)
        per, extra = divmod(iters, rungs)
        for i in range(rungs):
            m = per + (1 if i < extra else 0)
            if m < 1:
                continue
            cfg = InnerSolverConfig(
                step_size=eta0 * 2.0**-i,
                selection=base.selection,
                step_rule=StepRule.CONSTANT,
                store_trace=False,
            )
            init = node.latest_x if node.latest_x is not None else node.lam
            sol = opt(node.inner, init, m, cfg)
            self._absorb(node, sol)

    def _evaluate_birth(self, node: TreeNode, iters: int) -> None:
        """First evaluation of a node: an anchored leg, then a refining leg.

        The anchored leg keeps optimistic selection honest: a warm start
        stranded far from this node's own minimizer would otherwise freeze
        an inflated value that never deflates, and such values hijack the
        expansion order. The refining leg sharpens the inherited point at
        the node's cell scale."""
        if iters >= 4:
            self._leg_refine(node, iters)
        else:
            self._leg_anchor(node, iters)
        node.s = max(node.s, iters)
        self.evaluations += 1

    def _evaluate_again(self, node: TreeNode, iters: int) -> None:
        """Re-evaluation pass: a full-range ladder from the node's best
        point, then continued refinement at the cell scale."""
        if iters >= 2:
            first = (iters + 1) // 2
            self._leg_ladder(node, first)
            self._leg_refine(node, iters - first)
        else:
            self._leg_refine(node, iters)
        node.s = max(node.s, iters)
        self.evaluations += 1

    def run(self) -> tuple[TreeNode, Tree]:
        K = self.config.arity
        h_max = self.h_max
        root_cell = Cell(self.space.param_lo, self.space.param_hi, depth=0, index=0)
        root = TreeNode(cell=root_cell, w=self.space.outer(root_cell.center_params))
        tree = Tree(root, K)
        self.root_diameter = root_cell.diameter

        # Phase I: depth-1 children, each solved with h_max iterations.
        self._expand(tree, root, h_max)
        self.expansions_per_depth[0] = 1

        # Phase II: optimistic expansion, depth by depth.
        for h in range(1, h_max + 1):
            for m in range(1, h_max // h + 1):
                threshold = h_max // (h * m)
                node = eligible_leaf(tree, h, threshold)
                if node is None:
                    continue
                if float(np.max(node.cell.widths)) <= 0.0:
                    # cell already below float resolution; nothing to refine
                    continue
                self._expand(tree, node, threshold)
                self.expansions_per_depth[h] = self.expansions_per_depth.get(h, 0) + 1

        # Phase III: re-evaluate the best node seen at each count scale.
        reeval_iters = h_max // 2
        finalists: list[TreeNode] = []
        if reeval_iters >= 1:
            for p in range(int(math.log2(h_max)) + 1):
                need = 2**p
                cand = None
                for node in tree.nodes():
                    if not node.evaluated or node.s < need:
                        continue
                    if (
                        cand is None
                        or node.b > cand.b
                        or (node.b == cand.b and (node.depth, node.index) < (cand.depth, cand.index))
                    ):
                        cand = node
                if cand is None:
                    continue
                self._evaluate_again(cand, reeval_iters)
                finalists.append(cand)
        if not finalists:
            finalists = [n for n in tree.nodes() if n.evaluated]
        winner = finalists[0]
        for node in finalists[1:]:
            if node.b > winner.b or (
                node.b == winner.b and (node.depth, node.index) < (winner.depth, winner.index)
            ):
                winner = node
        return winner, tree


def run_exotic(problem: MinMaxProblem, config: ExoticConfig) -> RunReport:
    """Solve min over X of max over Y of f to global optimality.

    Requires f convex in x for every y (contract). Returns the approximate
    optimal value, the outer point that produced it, and the recovered
    inner minimizer.
    """
    start = time.perf_counter()
    search = _Search(_LiftedSpace(problem), config)
    winner, tree = search.run()
    elapsed = time.perf_counter() - start
    if config.budget is not None and search.iterations > config.budget:
        raise ExoticError(
            f"internal accounting error: spent {search.iterations} > budget {config.budget}"
        )
    outer: OuterPoint = winner.w
    return RunReport(
        value=float(winner.b),
        w_components=tuple(c.copy() for c in outer.components),
        x=np.asarray(winner.latest_x).copy(),
        total_inner_iterations=search.iterations,
        nodes_expanded=sum(search.expansions_per_depth.values()),
        nodes_evaluated=search.evaluations,
        expansions_per_depth=dict(search.expansions_per_depth),
        h_max=search.h_max,
        arity=config.arity,
        budget=config.budget,
        wall_time_s=elapsed,
        engine=engine.engine_name(),
        mode="minmax",
        tree=tree,
    )


def solve_ncc(problem: MinMaxProblem, config: ExoticConfig) -> RunReport:
    """Solve min-max for f non-convex in x but concave in y.

    Computes max over X of min over Y of -f with the same tree search (the
    inner problem is convex, so no lifting is needed), negates the value,
    and swaps the roles back: `x` is the min player's point, `w_components`
    holds the recovered max player's point.
    """
    start = time.perf_counter()
    search = _Search(_SwappedSpace(problem), config)
    winner, tree = search.run()
    elapsed = time.perf_counter() - start
    return RunReport(
        value=-float(winner.b),
        w_components=(np.asarray(winner.latest_x).copy(),),
        x=np.asarray(winner.w, dtype=float).copy(),
        total_inner_iterations=search.iterations,
        nodes_expanded=sum(search.expansions_per_depth.values()),
        nodes_evaluated=search.evaluations,
        expansions_per_depth=dict(search.expansions_per_depth),
        h_max=search.h_max,
        arity=config.arity,
        budget=config.budget,
        wall_time_s=elapsed,
        engine=engine.engine_name(),
        mode="ncc",
        tree=tree,
    )
