"""Projected subgradient inner solver: feasibility, selections, rates."""

import numpy as np
import pytest

from exotic.domains import BoxDomain, ProductDomain, SimplexDomain
from exotic.engine import available_engines
from exotic.errors import ExoticError
from exotic.inner_solver import (
    InnerSolverConfig,
    Selection,
    StepRule,
    estimate_G,
    opt,
    project,
)
from exotic.problems import bilinear_toy, handcrafted_problem
from exotic.reformulation import InnerProblem, OuterPoint


def kink_instance():
    """max(1 - x, -0.125 + 0.5 x) on [-4, 4]: minimum 0.25 at x = 0.75."""
    p = handcrafted_problem(1, 1, 4.0)
    return InnerProblem(p, OuterPoint((np.array([-1.0]), np.array([0.5]))))


def grid_G(inner, lo=-4.0, hi=4.0, points=100001):
    xs = np.linspace(lo, hi, points)
    return min(inner.value(np.array([x])) for x in xs)


class TestProject:
    def test_box_clip(self):
        got = project(BoxDomain.cube(1.0, 2), np.array([2.0, 0.5]))
        np.testing.assert_allclose(got, [1.0, 0.5])

    def test_simplex_noop(self):
        got = project(SimplexDomain(2), np.array([0.5, 0.5]))
        np.testing.assert_allclose(got, [0.5, 0.5])

    def test_simplex_vertex(self):
        got = project(SimplexDomain(2), np.array([2.0, 0.0]))
        np.testing.assert_allclose(got, [1.0, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(ExoticError):
            project(BoxDomain.cube(1.0, 2), np.zeros(3))


class TestOpt:
    def test_constant_objective(self):
        p = bilinear_toy()
        inner = InnerProblem(p, OuterPoint((np.zeros(1), np.zeros(1))))
        sol = opt(inner, np.array([0.3]), 5)
        assert sol.t == 0.0
        assert sol.iterations_used == 5

    def test_kink_with_moderate_budget(self):
        # measured deterministic accuracy; the analytic minimum is 0.25
        sol = opt(kink_instance(), np.zeros(1), 200, InnerSolverConfig(step_size=0.5))
        assert sol.t == pytest.approx(0.25, abs=5e-3)

    def test_kink_with_default_config(self):
        sol = opt(kink_instance(), np.zeros(1), 1000)
        assert sol.t == pytest.approx(0.25, abs=1e-4)

    def test_linear_objective_reaches_boundary(self):
        p = handcrafted_problem(1, 1, 4.0)
        inner = InnerProblem(p, OuterPoint((np.array([-1.0]), np.array([-1.0]))))
        sol = opt(inner, np.zeros(1), 2000)
        assert sol.t == pytest.approx(-3.0, abs=1e-9)
        np.testing.assert_allclose(sol.x, [4.0])

    def test_iterations_validation(self):
        with pytest.raises(ExoticError):
            opt(kink_instance(), np.zeros(1), 0)

    def test_infeasible_init_projected_first(self):
        sol = opt(kink_instance(), np.array([9.0]), 1)
        # the initializer is clipped to 4.0 before anything else
        assert abs(sol.x[0]) <= 4.0

    def test_last_iterate_constant_rule(self):
        p = handcrafted_problem(1, 1, 4.0)
        inner = InnerProblem(p, OuterPoint((np.array([-1.0]), np.array([-1.0]))))
        cfg = InnerSolverConfig(
            step_size=1.0,
            selection=Selection.LAST_ITERATE,
            step_rule=StepRule.CONSTANT,
        )
        sol = opt(inner, np.zeros(1), 50, cfg)
        np.testing.assert_allclose(sol.x, [4.0])  # walks to the boundary

    def test_step_offset_continues_schedule(self):
        p = handcrafted_problem(1, 1, 4.0)
        inner = InnerProblem(p, OuterPoint((np.array([-1.0]), np.array([-1.0]))))
        cfg = InnerSolverConfig(step_size=1.0, store_trace=True)
        fresh = opt(inner, np.zeros(1), 1, cfg)
        shifted = opt(inner, np.zeros(1), 1, cfg, step_offset=99)
        # same F = 1 - x: one step moves by eta/sqrt(offset + 1)
        assert fresh.x[0] == pytest.approx(1.0)
        assert shifted.x[0] == pytest.approx(0.1)

    def test_trace_and_best_consistency(self):
        cfg = InnerSolverConfig(store_trace=True)
        sol = opt(kink_instance(), np.zeros(1), 500, cfg)
        assert sol.trace.shape == (501,)
        assert sol.t == pytest.approx(float(np.min(sol.trace)), abs=0.0)

    def test_best_estimate_monotone_in_checkpoints(self):
        cfg = InnerSolverConfig(store_trace=True)
        sol = opt(kink_instance(), np.zeros(1), 2000, cfg)
        running = np.minimum.accumulate(sol.trace)
        for j1, j2 in [(10, 100), (100, 1000), (1000, 2000)]:
            assert running[j2] <= running[j1] + 1e-15


class TestEstimateG:
    def test_bilinear_zero(self):
        p = bilinear_toy()
        inner = InnerProblem(p, OuterPoint((np.zeros(1), np.zeros(1))))
        for j in (1, 10, 100):
            assert estimate_G(inner, np.zeros(1), j) == 0.0

    def test_upper_estimate(self):
        inner = kink_instance()
        g = grid_G(inner)
        rng = np.random.default_rng(8)
        for j in (3, 10, 50, 400):
            est = estimate_G(inner, np.array([rng.uniform(-4, 4)]), j)
            assert est >= g - 1e-9

    def test_feasibility_exact(self):
        p = handcrafted_problem(2, 2, 13.0)
        rng = np.random.default_rng(21)
        from exotic.reformulation import outer_param_bounds, outer_point_from_params

        lo, hi = outer_param_bounds(p)
        for _ in range(50):
            inner = InnerProblem(p, outer_point_from_params(p, rng.uniform(lo, hi)))
            sol = opt(inner, p.x_domain.sample(rng), int(rng.integers(1, 60)))
            for comp in inner.outer.components:
                assert p.f(sol.x, comp) <= sol.t + 1e-12

    def test_sublinear_decay(self):
        inner = kink_instance()
        g = grid_G(inner)
        err100 = estimate_G(inner, np.zeros(1), 100) - g
        c1 = max(err100, 1e-6) * np.sqrt(100)
        for j in (1000, 10000):
            err = estimate_G(inner, np.zeros(1), j) - g
            assert err <= 1.05 * c1 / np.sqrt(j)


def test_engines_agree_when_both_present():
    engines = available_engines()
    if "compiled" not in engines:
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(123)
    for _ in range(100):
        m = int(rng.integers(1, 6))
        d = int(rng.integers(1, 5))
        coefs = rng.normal(size=(m, d))
        consts = rng.normal(size=m)
        kind = int(rng.integers(0, 2))
        lo, hi = -np.ones(d), np.ones(d)
        x0 = rng.normal(size=d)
        out = {
            name: mod.pgd_max_affine(
                coefs, consts, kind, lo, hi, x0.copy(), 60, 0.3, True, 0, None
            )
            for name, mod in engines.items()
        }
        a, b = out["compiled"], out["pure-python"]
        assert abs(a[1] - b[1]) < 1e-12
        assert np.max(np.abs(a[0] - b[0])) < 1e-12


def test_generic_path_handles_product_domain():
    """A non-affine inner objective over a product domain uses the generic loop."""

    class Quadratic:
        domain = ProductDomain((SimplexDomain(2), BoxDomain.cube(1.0, 1)))
        target = np.array([0.7, 0.3, -0.4])

        def value(self, x):
            return float(np.sum((x - self.target) ** 2))

        def value_and_subgrad(self, x):
            return self.value(x), 2.0 * (x - self.target)

        def affine_pieces(self):
            return None

    inner = Quadratic()
    sol = opt(inner, inner.domain.center, 4000, InnerSolverConfig(step_size=0.3))
    np.testing.assert_allclose(sol.x, inner.target, atol=1e-2)
    assert sol.t == pytest.approx(0.0, abs=1e-3)
