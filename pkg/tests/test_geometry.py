import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactrelu.geometry import (
    cover_count,
    enumerate_dichotomies,
    realize,
    realize_fast,
    strict_separation_lp,
)
from exactrelu.reduce import gadget_dataset

from oracles import cover_count as oracle_cover_count
from oracles import sampled_dichotomies


def signs_of(dichotomies):
    return {tuple(int(s) for s in dc.signs) for dc in dichotomies}


class TestEnumerateDichotomies:
    def test_single_point(self):
        assert signs_of(enumerate_dichotomies(np.array([[0.7]]))) == {(1,), (-1,)}

    def test_three_collinear_points(self):
        X = np.array([[0.0], [1.0], [2.0]])
        found = signs_of(enumerate_dichotomies(X, d=1))
        assert len(found) == 6
        assert found == sampled_dichotomies(X, 20_000, np.random.default_rng(0))

    def test_three_generic_points_in_plane(self):
        X = np.array([[0.0, 0.0], [1.0, 0.2], [0.3, 1.0]])
        assert len(enumerate_dichotomies(X, d=2)) == 8 == cover_count(3, 2)

    def test_collinear_points_in_plane(self):
        # not in general position: a line through three points cuts like d = 1
        X = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        assert len(enumerate_dichotomies(X)) == 6

    def test_duplicates_share_a_sign(self):
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
        found = signs_of(enumerate_dichotomies(X))
        assert all(s[0] == s[2] for s in found)
        assert len(found) == 4

    @pytest.mark.parametrize("d", [1, 2, 3])
    @pytest.mark.parametrize("N", [2, 4, 6, 8])
    def test_count_law_and_sampling_oracle(self, N, d):
        rng = np.random.default_rng(100 * N + d)
        X = rng.normal(size=(N, d))
        dich = enumerate_dichotomies(X)
        found = signs_of(dich)
        assert len(dich) == len(found) == oracle_cover_count(N, d)
        assert sampled_dichotomies(X, 100_000, rng) <= found

    def test_witnesses_reproduce_signs(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(7, 3))
        for dc in enumerate_dichotomies(X):
            assert dc.consistent_with(X)
            v = dc.witness(X)
            s = np.asarray(dc.signs)
            assert np.all(v[s > 0] >= -1e-9) and np.all(v[s < 0] <= 1e-9)

    def test_negation_symmetry(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(6, 2))
        assert signs_of(enumerate_dichotomies(X)) == signs_of(enumerate_dichotomies(-X))

    def test_deterministic_order(self):
        X = np.random.default_rng(7).normal(size=(6, 2))
        a = [dc.signs for dc in enumerate_dichotomies(X)]
        b = [dc.signs for dc in enumerate_dichotomies(X)]
        assert a == b


class TestStrictSeparation:
    def test_two_points(self):
        w = strict_separation_lp(np.array([[0.0]]), np.array([[1.0]]))
        assert w is not None
        assert w(np.array([0.0])) > 0 > w(np.array([1.0]))
        assert np.max(np.abs(w.alpha)) == pytest.approx(1.0)

    def test_identical_point(self):
        assert strict_separation_lp(np.array([[0.3, 0.3]]), np.array([[0.3, 0.3]])) is None

    def test_gadget_planes_not_separable(self):
        ds = gadget_dataset()
        assert strict_separation_lp(ds.X[ds.y == 1], ds.X[ds.y == 0]) is None

    def test_gadget_nonseparability_by_exhaustion(self):
        # no dichotomy of the 13 points puts T1 and the origin strictly on one side
        ds = gadget_dataset()
        target = tuple(1 if y == 1 else -1 for y in ds.y)
        assert target not in signs_of(enumerate_dichotomies(ds.X))

    def test_margin_is_maximal(self):
        w = strict_separation_lp(np.array([[0.0], [-1.0]]), np.array([[2.0]]))
        # best threshold sits halfway between 0 and 2 with unit slope
        assert w(np.array([0.0])) == pytest.approx(1.0, abs=1e-7)


class TestRealize:
    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 100_000), st.integers(2, 10), st.integers(1, 4))
    def test_fast_path_agrees_with_lp(self, seed, N, d):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(N, d))
        if rng.random() < 0.3:
            X = np.round(X)
        s = rng.choice([-1, 1], N)
        a, b = realize(X, s), realize_fast(X, s)
        assert (a is None) == (b is None)
        if b is not None:
            assert np.all(s * b(X) > 0)

    def test_one_signed_is_constant(self):
        X = np.random.default_rng(0).normal(size=(4, 2))
        w = realize(X, [1, 1, 1, 1])
        assert w is not None and np.all(w(X) > 0)
