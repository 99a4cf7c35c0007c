"""Closed-form optimality-gap bound evaluators and the Lambert W function.

The bounds take the solver's convergence constants (sublinear: value gap
<= a1 * j^{-a2}; linear: <= c2 * gamma^j), the geometric decay constants
(nu, rho) of the objective near its maximizer, and the cell-counting
constants (big_c, d). None of these are estimated here; callers supply
them, typically as rough empirical fits, and the resulting curves are
illustrative envelopes to overlay on measured gaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import budget_to_hmax
from .errors import ExoticError, OutOfBranchError

__all__ = [
    "TheoryParams",
    "lambert_w",
    "gap_bound_sublinear",
    "gap_bound_linear",
    "gap_bound_sublinear_asymptotic",
    "gap_bound_linear_asymptotic",
]


def lambert_w(y: float) -> float:
    """Principal-branch Lambert W: the x >= 0 with x * exp(x) = y, y >= 0.

    Safeguarded Newton from a log-based initial guess; converges to about
    1e-15 relative in a handful of steps.
    """
    y = float(y)
    if y < 0:
        raise OutOfBranchError("principal branch evaluated for y >= 0 only")
    if y == 0.0:
        return 0.0
    if y > math.e:
        w = math.log(y) - math.log(math.log(y))
    elif y > 1.0:
        w = 1.0
    else:
        w = y  # w ~ y for small y
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - y
        step = f / (ew * (1.0 + w))
        w_new = w - step
        if w_new < 0.0:
            w_new = 0.0
        if abs(w_new - w) <= 1e-16 * max(1.0, abs(w_new)):
            return w_new
        w = w_new
    return w


@dataclass(frozen=True)
class TheoryParams:
    """Constants entering the gap bounds.

    nu > 0 and rho in (0,1): geometric decay of the objective over cells
    containing a maximizer. big_c > 1 and d > 0: near-optimal cell counts
    grow at most like big_c * rho^{-d h}. a1 > 0, a2 > 0: sublinear solver
    rate. c2 > 0, gamma in (0,1): linear solver rate. arity and budget
    describe the search being bounded.
    """

    nu: float
    rho: float
    big_c: float
    d: float
    a1: float = 1.0
    a2: float = 0.5
    c2: float = 1.0
    gamma: float = 0.5
    arity: int = 3
    budget: int = 100_000

    def __post_init__(self):
        if self.nu <= 0:
            raise ExoticError("nu must be positive")
        if not 0 < self.rho < 1:
            raise ExoticError("rho must lie in (0, 1)")
        if self.big_c <= 1:
            raise ExoticError("big_c must exceed 1")
        if self.d <= 0:
            raise ExoticError("d must be positive (the d -> 0 limit is not evaluated)")
        if self.a1 <= 0 or self.a2 <= 0:
            raise ExoticError("a1 and a2 must be positive")
        if self.c2 <= 0:
            raise ExoticError("c2 must be positive")
        if not 0 < self.gamma < 1:
            raise ExoticError("gamma must lie in (0, 1)")
        if self.arity < 2:
            raise ExoticError("arity must be >= 2")
        if self.budget < 1:
            raise ExoticError("budget must be positive")


def _floors(params: TheoryParams) -> tuple[int, int]:
    """(h_max, half-scale floor); both must be >= 1 for the bounds."""
    h_max = budget_to_hmax(params.budget, params.arity)
    n, k = params.budget, params.arity
    half = int(n / (5 * k * (1.0 + math.log(n)) ** 2))
    if half < 1:
        raise ExoticError(
            "budget too small for the bound formulas: the half-scale floor is 0"
        )
    return h_max, half


def gap_bound_sublinear(params: TheoryParams, *, return_branch: bool = False):
    """Gap bound under the sublinear solver rate a1 * j^{-a2}.

    Evaluates the regime test and returns the matching closed form; with
    return_branch=True also returns True when the first (regime-test
    satisfied) branch was taken.
    """
    h_max, half = _floors(params)
    expo = params.d + 1.0 / params.a2
    log_inv_rho = math.log(1.0 / params.rho)
    arg = (
        h_max
        * expo
        * log_inv_rho
        / (4.0 * params.big_c * params.a1 ** (1.0 / params.a2) * params.nu ** (-1.0 / params.a2))
    )
    lhs = params.nu * math.exp(-lambert_w(arg) / expo)
    condition = lhs <= 2.0**params.a2 * params.a1
    if condition:
        bound = params.a1 / half**params.a2 + lhs
    else:
        arg2 = params.d * log_inv_rho * h_max / (2.0 * params.big_c)
        bound = 2.0 * params.nu * math.exp(-lambert_w(arg2) / params.d)
    if return_branch:
        return bound, condition
    return bound


def gap_bound_linear(params: TheoryParams, *, return_branch: bool = False):
    """Gap bound under the linear solver rate c2 * gamma^j.

    The derivation merges the two leading constants, so s = max(c2, nu)
    plays both roles here.
    """
    h_max, half = _floors(params)
    s = max(params.c2, params.nu)
    log_inv_rho = math.log(1.0 / params.rho)
    arg = 0.5 * params.d * log_inv_rho * math.sqrt(h_max / (4.0 * params.big_c))
    w_val = lambert_w(arg)
    condition = w_val / (0.5 * params.d * log_inv_rho) >= math.log(1.0 / params.gamma) / (
        2.0 * log_inv_rho
    )
    if condition:
        bound = s * params.gamma**half + s * math.exp(-2.0 * w_val / params.d)
    else:
        arg2 = params.d * log_inv_rho * h_max / (2.0 * params.big_c)
        bound = 2.0 * s * math.exp(-lambert_w(arg2) / params.d)
    if return_branch:
        return bound, condition
    return bound


def _log_ratio(a: float) -> float:
    """a / log(a), the large-argument surrogate for exp(W(a)); needs a > e."""
    if a <= math.e:
        raise ExoticError("asymptotic form needs its argument above e")
    return a / math.log(a)


def gap_bound_sublinear_asymptotic(params: TheoryParams) -> float:
    """Large-budget surrogate of the sublinear bound, using
    exp(-W(a)/c) <= (a/log a)^(-1/c) for a > e."""
    h_max, half = _floors(params)
    expo = params.d + 1.0 / params.a2
    log_inv_rho = math.log(1.0 / params.rho)
    arg = (
        h_max
        * expo
        * log_inv_rho
        / (4.0 * params.big_c * params.a1 ** (1.0 / params.a2) * params.nu ** (-1.0 / params.a2))
    )
    lhs = params.nu * math.exp(-lambert_w(arg) / expo)
    if lhs <= 2.0**params.a2 * params.a1:
        return params.a1 / half**params.a2 + params.nu * _log_ratio(arg) ** (-1.0 / expo)
    arg2 = params.d * log_inv_rho * h_max / (2.0 * params.big_c)
    return 2.0 * params.nu * _log_ratio(arg2) ** (-1.0 / params.d)


def gap_bound_linear_asymptotic(params: TheoryParams) -> float:
    """Large-budget surrogate of the linear-rate bound."""
    h_max, half = _floors(params)
    s = max(params.c2, params.nu)
    log_inv_rho = math.log(1.0 / params.rho)
    arg = 0.5 * params.d * log_inv_rho * math.sqrt(h_max / (4.0 * params.big_c))
    w_val = lambert_w(arg)
    condition = w_val / (0.5 * params.d * log_inv_rho) >= math.log(1.0 / params.gamma) / (
        2.0 * log_inv_rho
    )
    if condition:
        return s * params.gamma**half + s * _log_ratio(arg) ** (-2.0 / params.d)
    arg2 = params.d * log_inv_rho * h_max / (2.0 * params.big_c)
    return 2.0 * s * _log_ratio(arg2) ** (-1.0 / params.d)
