"""Hierarchical partition: splitting geometry, tree bookkeeping, decay."""

import numpy as np
import pytest

from exotic.domains import SimplexDomain
from exotic.errors import DegenerateCellError, ExoticError
from exotic.partition import Cell, Tree, TreeNode, cell_center, diameter_bound, split


def unit_cell(dim, index=0, depth=0):
    return Cell(np.zeros(dim), np.ones(dim), depth, index)


class TestSplit:
    def test_tie_breaks_to_lowest_coordinate(self):
        cell = Cell(np.array([-1.0, -1.0]), np.array([1.0, 1.0]), 0, 0)
        kids = split(cell, 2)
        np.testing.assert_allclose(kids[0].lower, [-1, -1])
        np.testing.assert_allclose(kids[0].upper, [0, 1])
        np.testing.assert_allclose(kids[1].lower, [0, -1])
        np.testing.assert_allclose(kids[1].upper, [1, 1])

    def test_thirds_along_longest(self):
        cell = Cell(np.array([0.0, 0.0]), np.array([3.0, 1.0]), 0, 0)
        kids = split(cell, 3)
        cuts = [k.upper[0] for k in kids]
        np.testing.assert_allclose(cuts, [1.0, 2.0, 3.0])
        for k in kids:
            np.testing.assert_allclose([k.lower[1], k.upper[1]], [0.0, 1.0])

    def test_grid_indices(self):
        cell = unit_cell(1, index=2, depth=3)
        kids = split(cell, 3)
        assert [k.index for k in kids] == [6, 7, 8]
        assert all(k.depth == 4 for k in kids)

    def test_degenerate_rejected(self):
        cell = Cell(np.zeros(2), np.zeros(2), 0, 0)
        with pytest.raises(DegenerateCellError):
            split(cell, 2)

    def test_arity_validated(self):
        with pytest.raises(ExoticError):
            split(unit_cell(1), 1)

    @pytest.mark.parametrize("dim,h", [(1, 4), (2, 3), (3, 2)])
    def test_round_robin_halving(self, dim, h):
        """After dim*h binary splits every edge has been halved h times."""
        cell = unit_cell(dim)
        rng = np.random.default_rng(h)
        for _ in range(dim * h):
            cell = split(cell, 2)[int(rng.integers(0, 2))]
        assert float(np.max(cell.widths)) == pytest.approx(2.0**-h)

    def test_partition_covers_parent_exactly_once(self):
        rng = np.random.default_rng(99)
        cell = Cell(np.array([-1.0, 0.0, 2.0]), np.array([1.5, 0.5, 4.0]), 0, 0)
        for _ in range(200):
            kids = split(cell, 3)
            point = rng.uniform(cell.lower, cell.upper)
            hits = [k.contains_params(point) for k in kids]
            # boundary points may touch two cells; interior points hit one
            assert 1 <= sum(hits) <= 2
            strict = [
                bool(np.all(point > k.lower) and np.all(point < k.upper)) for k in kids
            ]
            assert sum(strict) <= 1
            cell = kids[int(rng.integers(0, 3))]
            if float(np.max(cell.widths)) < 1e-6:
                break


class TestCenters:
    def test_box_midpoints(self):
        center = cell_center(
            Cell(np.array([-1.0, -1.0]), np.array([1.0, 1.0]), 0, 0), lambda t: t
        )
        np.testing.assert_allclose(center, [0.0, 0.0])
        center = cell_center(
            Cell(np.array([0.0, -1.0]), np.array([1.0, 1.0]), 1, 0), lambda t: t
        )
        np.testing.assert_allclose(center, [0.5, 0.0])

    def test_stick_breaking_midpoint_is_uniform_pair(self):
        dom = SimplexDomain(2)

        def to_w(theta):
            return (dom.from_params(theta[:1]), dom.from_params(theta[1:]))

        root = Cell(np.zeros(2), np.ones(2), 0, 0)
        w = cell_center(root, to_w)
        np.testing.assert_allclose(w[0], [0.5, 0.5])
        np.testing.assert_allclose(w[1], [0.5, 0.5])

    def test_center_contained(self):
        rng = np.random.default_rng(5)
        for trial in range(1000):
            dim = int(rng.integers(1, 4))
            cell = Cell(rng.uniform(-2, 0, dim), rng.uniform(0.5, 2, dim), 0, 0)
            for _ in range(int(rng.integers(0, 6))):
                cell = split(cell, int(rng.integers(2, 4)))[0]
            assert cell.contains_params(cell.center_params)


class TestTree:
    def build(self, dim=2, arity=3):
        root = TreeNode(cell=unit_cell(dim), w=None)
        tree = Tree(root, arity)
        kids = [TreeNode(cell=c, w=None) for c in split(root.cell, arity)]
        tree.add_children(root, kids)
        return tree

    def test_registration(self):
        tree = self.build()
        assert len(tree.depth_nodes[1]) == 3
        assert tree.max_depth() == 1
        assert not tree.root.is_leaf()

    def test_double_expansion_rejected(self):
        tree = self.build()
        with pytest.raises(ExoticError):
            tree.add_children(tree.root, [])

    def test_json_dump_schema(self):
        tree = self.build()
        rows = tree.to_json_obj()
        assert len(rows) == 4
        for row in rows:
            assert set(row) == {"depth", "index", "bounds", "value", "count"}
            assert len(row["bounds"]) == 2

    def test_determinism_bit_identical(self):
        a, b = self.build(), self.build()
        for na, nb in zip(a.nodes(), b.nodes()):
            assert na.cell.lower.tobytes() == nb.cell.lower.tobytes()
            assert na.cell.upper.tobytes() == nb.cell.upper.tobytes()


class TestDiameterBound:
    def test_unit_interval_halving(self):
        tree = Tree(TreeNode(cell=unit_cell(1), w=None), 2)
        assert diameter_bound(tree, 3) == pytest.approx(0.125)

    def test_root_depth_gives_diameter(self):
        tree = Tree(TreeNode(cell=unit_cell(2), w=None), 2)
        assert diameter_bound(tree, 0) == pytest.approx(np.sqrt(2.0))

    def test_square_two_levels(self):
        # beta = 2^(-1/2); the envelope is alpha * beta^h with alpha = sqrt(2)
        tree = Tree(TreeNode(cell=unit_cell(2), w=None), 2)
        assert diameter_bound(tree, 2) == pytest.approx(np.sqrt(2.0) * 0.5)

    def test_negative_depth_rejected(self):
        tree = Tree(TreeNode(cell=unit_cell(1), w=None), 2)
        with pytest.raises(ExoticError):
            diameter_bound(tree, -1)

    @pytest.mark.parametrize("dim", [1, 2, 3])
    @pytest.mark.parametrize("arity", [2, 3])
    def test_geometric_decay_with_slack(self, dim, arity):
        """Measured depth-h diameters stay under diam * sqrt(D) * K^(-floor(h/D))."""
        root = unit_cell(dim)
        alpha = root.diameter
        rng = np.random.default_rng(dim * 10 + arity)
        worst = {h: 0.0 for h in range(5 * dim + 1)}
        for _ in range(200):
            cell = root
            worst[0] = max(worst[0], cell.diameter)
            for h in range(1, 5 * dim + 1):
                cell = split(cell, arity)[int(rng.integers(0, arity))]
                worst[h] = max(worst[h], cell.diameter)
        for h, measured in worst.items():
            envelope = alpha * np.sqrt(dim) * arity ** (-(h // dim))
            assert measured <= envelope + 1e-12
