import numpy as np
import pytest

from exactrelu import generate as gen
from exactrelu.core import max_error
from exactrelu.reduce import check_separability, exhaustive_separability, gadget_dataset


class TestGenerators:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_separable_witness_is_valid(self, d):
        inst, w = gen.separable_instance(10, d, np.random.default_rng(7))
        assert check_separability(inst, w)
        assert inst.N == 10 and inst.d == d

    def test_unseparable_is_certified(self):
        inst = gen.unseparable_instance(6, 2, np.random.default_rng(1))
        assert inst.S0 and exhaustive_separability(inst) is None

    def test_planted_net_labels(self):
        ds, net = gen.planted_net(9, 2, np.random.default_rng(2))
        assert max_error(net, ds) == 0.0

    def test_random_labels_are_binary(self):
        ds = gen.random_labels(30, 4, np.random.default_rng(3))
        assert ds.is_binary() and ds.X.shape == (30, 4)

    def test_gadget_only(self):
        ds = gen.gadget_only()
        assert ds.N == 13 and np.array_equal(ds.X, gadget_dataset().X)

    @pytest.mark.parametrize("N,d", [(0, 2), (3, 0), (-1, 1)])
    def test_bad_sizes(self, N, d):
        with pytest.raises(ValueError):
            gen.planted_net(N, d, np.random.default_rng(0))

    def test_seeded(self):
        a, _ = gen.separable_instance(8, 2, np.random.default_rng(5))
        b, _ = gen.separable_instance(8, 2, np.random.default_rng(5))
        assert np.array_equal(a.points, b.points) and a.S1 == b.S1
