import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from exactrelu.core import AffineFunction, Dataset, KReluNet, max_error
from exactrelu.interp import (
    ProjectionTieError,
    SweepState,
    fit_overparam,
    node_bound,
    sample_direction,
    verify_interpolation,
)


def random_binary(rng, N, d):
    return Dataset(rng.standard_normal((N, d)), (rng.random(N) < 0.5).astype(float))


class TestSampleDirection:
    def test_one_dimension(self):
        assert {float(sample_direction(1, s)[0]) for s in range(50)} == {1.0, -1.0}

    def test_deterministic(self):
        assert sample_direction(3, 17).tobytes() == sample_direction(3, 17).tobytes()

    @pytest.mark.parametrize("d", [1, 2, 7, 50])
    def test_unit_norm(self, d):
        for s in range(20):
            assert abs(np.linalg.norm(sample_direction(d, s)) - 1.0) <= 1e-12

    def test_angles_uniform_in_plane(self):
        V = np.array([sample_direction(2, s) for s in range(10_000)])
        assert abs(np.linalg.norm(V, axis=1).mean() - 1.0) <= 1e-12
        angles = np.arctan2(V[:, 1], V[:, 0])
        counts, _ = np.histogram(angles, bins=36, range=(-np.pi, np.pi))
        assert chisquare(counts).pvalue > 0.01

    def test_rejects_zero_dimension(self):
        with pytest.raises(ValueError):
            sample_direction(0, 0)


class TestHandExamples:
    def test_one_zero_one_on_a_line(self):
        ds = Dataset(np.array([[0.0], [1.0], [2.0]]), np.array([1.0, 0.0, 1.0]))
        net = fit_overparam(ds, seed=0)
        np.testing.assert_allclose(net(ds.X), [1.0, 0.0, 1.0], atol=1e-12)
        assert len(net) == 3

    def test_all_ones(self):
        # the first ramp and one flattening unit: the run of 1s starts from y0 = 0
        ds = Dataset(np.array([[0.0], [1.0], [2.0]]), np.ones(3))
        net = fit_overparam(ds)
        np.testing.assert_allclose(net(ds.X), 1.0, atol=1e-12)
        assert len(net) == 2
        assert net.w0 == 0.0 and net.theta == 1.0

    def test_single_point_labeled_one(self):
        net = fit_overparam(Dataset(np.array([[0.5, -2.0]]), np.ones(1)))
        assert len(net) == 1 and float(net(np.array([0.5, -2.0]))) == pytest.approx(1.0, abs=1e-12)

    def test_all_zeros_gives_the_empty_net(self):
        ds = Dataset(np.random.default_rng(0).normal(size=(5, 3)), np.zeros(5))
        net = fit_overparam(ds)
        assert len(net) == 0 and net.w0 == 0.0 and net.theta == 0.0
        assert np.all(net(ds.X) == 0.0)

    def test_labels_must_be_binary(self):
        with pytest.raises(ValueError):
            fit_overparam(Dataset(np.zeros((2, 1)) + [[0.0], [1.0]], np.array([1.0, 0.5])))

    def test_duplicate_points_report_the_pair(self):
        X = np.array([[0.0, 1.0], [2.0, 3.0], [0.0, 1.0]])
        with pytest.raises(ProjectionTieError) as info:
            fit_overparam(Dataset(X, np.array([1.0, 0.0, 0.0])), max_retries=3)
        assert info.value.pair == (0, 2)


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000), st.integers(1, 30), st.integers(1, 6))
    def test_interpolates_random_labels(self, seed, N, d):
        ds = random_binary(np.random.default_rng(seed), N, d)
        net = fit_overparam(ds, seed=seed)
        assert verify_interpolation(net, ds, 1e-9)

    @pytest.mark.parametrize("d", [1, 5, 10])
    def test_two_hundred_points(self, d):
        # the 1e-9 target is out of float64 reach for some draws at this size;
        # the error grows with theta times the summed unit magnitudes
        rng = np.random.default_rng(200 + d)
        for k in range(3):
            ds = random_binary(rng, 200, d)
            net = fit_overparam(ds, seed=k)
            assert len(net) <= 200
            assert max_error(net, ds) <= 1e-7

    def test_adversarial_label_runs(self):
        # long runs of equal labels alternate the two no-op style steps
        rng = np.random.default_rng(7)
        for pattern in ([1] * 5 + [0] * 5, [1, 1, 0, 0] * 5, [0, 0, 1, 1, 1, 0, 1, 1] * 3, [0] * 9 + [1]):
            y = np.array(pattern, dtype=float)
            X = np.sort(rng.standard_normal(len(y)))[:, None]
            net = fit_overparam(Dataset(X, y), check=True)
            assert max_error(net, Dataset(X, y)) <= 1e-9

    @pytest.mark.parametrize("seed", range(10))
    def test_node_count_matches_label_changes(self, seed):
        rng = np.random.default_rng(seed)
        ds = random_binary(rng, 25, 3)
        net = fit_overparam(ds, seed=seed)
        assert len(net) == node_bound(ds, sample_direction(3, seed)) <= ds.N

    @pytest.mark.parametrize("seed", range(10))
    def test_units_are_zero_before_their_emission(self, seed):
        rng = np.random.default_rng(100 + seed)
        ds = random_binary(rng, 30, 4)
        net = fit_overparam(ds, seed=seed)
        v = sample_direction(4, seed)
        X = ds.X[np.argsort(ds.X @ v, kind="stable")]
        for a, _ in net.nodes:
            # each unit points along +v, so it is active on a suffix of the sweep
            assert a.alpha @ v > 0
            assert np.allclose(a.alpha / np.linalg.norm(a.alpha), v, atol=1e-9)
            active = a(X) > 0
            if active.any():
                assert active[int(np.argmax(active)):].all()

    def test_seed_determinism(self):
        ds = random_binary(np.random.default_rng(3), 40, 5)
        a, b = fit_overparam(ds, seed=9), fit_overparam(ds, seed=9)
        assert len(a) == len(b) and a.w0 == b.w0 and a.theta == b.theta
        for (fa, wa), (fb, wb) in zip(a.nodes, b.nodes):
            assert fa.alpha.tobytes() == fb.alpha.tobytes() and fa.beta == fb.beta and wa == wb

    def test_sweep_state_evaluates_its_piece(self):
        st_ = SweepState(np.array([1.0, 0.0]), np.arange(2), np.zeros(2), np.array([2.0, 0.0]), -1.0)
        assert st_.g([3.0, 5.0]) == 5.0


class TestVerify:
    def setup_method(self):
        self.ds = random_binary(np.random.default_rng(11), 12, 2)
        self.net = fit_overparam(self.ds)

    def test_fit_passes(self):
        assert verify_interpolation(self.net, self.ds, 1e-9)

    def test_flipped_label_fails(self):
        y = self.ds.y.copy()
        y[0] = 1.0 - y[0]
        assert not verify_interpolation(self.net, Dataset(self.ds.X, y), 1e-9)

    def test_too_many_nodes_fails(self):
        idle = (AffineFunction(np.zeros(2), -1.0), 1)
        nodes = tuple(self.net.nodes) + (idle,) * (self.ds.N + 1 - len(self.net))
        padded = KReluNet(nodes, self.net.w0, self.net.theta)
        assert max_error(padded, self.ds) == max_error(self.net, self.ds)
        assert not verify_interpolation(padded, self.ds, 1e-9)
