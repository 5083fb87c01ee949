"""Frozen values for the brute-force oracles themselves.

The oracles are only trustworthy if they reproduce hand-computed answers, so
these values were fixed before any package code was tested against them.
"""

import numpy as np
import pytest

from oracles import (
    active_set_qp,
    cover_count,
    grid_qp,
    random_two_relu_losses,
    sampled_dichotomies,
    separable_by_sampling,
)


class TestCoverCount:
    @pytest.mark.parametrize(
        "N,d,expected",
        [(1, 1, 2), (3, 1, 6), (3, 2, 8), (4, 2, 14), (5, 3, 30), (8, 3, 128), (8, 1, 16)],
    )
    def test_frozen(self, N, d, expected):
        assert cover_count(N, d) == expected


class TestSampledDichotomies:
    def test_three_collinear_points(self):
        X = np.array([[0.0], [1.0], [2.0]])
        found = sampled_dichotomies(X, 20_000, np.random.default_rng(0))
        assert found == {
            (1, 1, 1), (-1, -1, -1),
            (1, 1, -1), (-1, -1, 1),
            (1, -1, -1), (-1, 1, 1),
        }

    def test_triangle_gives_all_eight(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        found = sampled_dichotomies(X, 20_000, np.random.default_rng(1))
        assert len(found) == 8

    def test_square_misses_the_diagonals(self):
        X = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
        found = sampled_dichotomies(X, 50_000, np.random.default_rng(2))
        assert len(found) == 14
        assert (1, 1, -1, -1) not in found


class TestGridQp:
    def test_projection_onto_halfplane(self):
        val, z = grid_qp(np.eye(2), [1.0, 1.0], [[1.0, 1.0]], [1.0], step=1e-3, lo=-1, hi=2)
        assert val == pytest.approx(0.5, abs=1e-5)
        np.testing.assert_allclose(z, [0.5, 0.5], atol=1e-3)

    def test_infeasible_grid(self):
        val, z = grid_qp(np.eye(2), [0.0, 0.0], [[1.0, 0.0], [-1.0, 0.0]], [-1.0, -1.0], step=0.1)
        assert val == np.inf and z is None


class TestRandomNetworks:
    def test_losses_nonnegative_and_zero_labels_reachable(self):
        X = np.random.default_rng(0).normal(size=(5, 2))
        losses = random_two_relu_losses(X, np.zeros(5), 2000, np.random.default_rng(1))
        assert np.all(losses >= 0)
        assert losses.min() == 0.0  # some net has a dead output unit


class TestSeparabilitySampling:
    def test_xor_square_is_separated_by_a_strip(self):
        # the band |x - y| < 1/2 holds both S1 corners and excludes the others
        X = np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
        assert separable_by_sampling(X, [0, 1], [2, 3], 100_000, np.random.default_rng(0))

    def test_point_inside_hull_is_never_separated(self):
        X = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [0.5, 0.5]])
        assert not separable_by_sampling(X, [0, 1, 2], [3], 100_000, np.random.default_rng(0))

    def test_one_point_each_side(self):
        X = np.array([[0.0, 0.0], [2.0, 0.0]])
        assert separable_by_sampling(X, [0], [1], 10_000, np.random.default_rng(0))


class TestActiveSetOracle:
    def test_projection_onto_halfplane(self):
        val, z = active_set_qp(np.eye(2), [1.0, 1.0], [[1.0, 1.0]], [1.0])
        assert val == pytest.approx(0.5, abs=1e-12)
        np.testing.assert_allclose(z, [0.5, 0.5], atol=1e-12)

    def test_interior_minimum(self):
        val, z = active_set_qp(np.eye(2), [0.2, 0.1], [[1.0, 1.0]], [1.0])
        assert val == pytest.approx(0.0, abs=1e-15)
