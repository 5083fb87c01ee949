import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactrelu.core import Dataset
from exactrelu.exact import ActivationPattern, build_subprogram
from exactrelu.qp import TOL_FEAS, TOL_KKT, QuadraticProgram, solve_qp

from oracles import active_set_qp, grid_qp


def random_qp3(rng, m_res=4, m_ineq=3, box=None):
    """Random 3-variable program with a strictly feasible point in ``[-1, 1]^3``.

    With ``box`` the variables are also bounded by ``|z_i| <= box``.
    """
    R = rng.normal(size=(m_res, 3))
    t = rng.normal(size=m_res)
    G = rng.normal(size=(m_ineq, 3))
    z_in = rng.uniform(-1, 1, size=3)
    h = G @ z_in + rng.uniform(0.05, 1.0, size=m_ineq)
    if box is not None:
        G = np.vstack([G, np.eye(3), -np.eye(3)])
        h = np.concatenate([h, np.full(6, box)])
    return QuadraticProgram(R, t, G, h)


class TestExamples:
    def test_unconstrained(self):
        sol = solve_qp(QuadraticProgram.from_terms(1, [([1.0], 3.0)]))
        assert sol.optimal
        assert sol.z[0] == pytest.approx(3.0, abs=1e-10)
        assert sol.objective == pytest.approx(0.0, abs=1e-12)

    def test_active_bound(self):
        sol = solve_qp(QuadraticProgram.from_terms(1, [([1.0], 3.0)], [([1.0], 1.0)]))
        assert sol.z[0] == pytest.approx(1.0, abs=1e-10)
        assert sol.objective == pytest.approx(4.0, abs=1e-9)
        assert sol.multipliers[0] == pytest.approx(4.0, abs=1e-8)  # 2 (z - 3) + lam = 0

    def test_projection_onto_halfplane(self):
        qp = QuadraticProgram.from_terms(2, [([1, 0], 1.0), ([0, 1], 1.0)], [([1, 1], 1.0)])
        sol = solve_qp(qp)
        np.testing.assert_allclose(sol.z, [0.5, 0.5], atol=1e-10)
        grid_val, _ = grid_qp(qp.R, qp.t, qp.G, qp.h, lo=-1, hi=2, step=1e-3)
        assert sol.objective == pytest.approx(0.5, abs=1e-10)
        assert abs(grid_val - sol.objective) <= 1e-5

    def test_offset_is_added(self):
        sol = solve_qp(QuadraticProgram.from_terms(1, [([1.0], 3.0)], offset=2.5))
        assert sol.objective == pytest.approx(2.5)

    def test_infeasible(self):
        qp = QuadraticProgram.from_terms(1, [([1.0], 0.0)], [([1.0], -1.0), ([-1.0], -1.0)])
        sol = solve_qp(qp)
        assert sol.status == "infeasible" and not sol.optimal

    def test_zero_row_with_negative_rhs_is_infeasible(self):
        qp = QuadraticProgram.from_terms(2, [([1, 0], 0.0)], [([0, 0], -1.0)])
        assert solve_qp(qp).status == "infeasible"

    def test_no_residuals(self):
        qp = QuadraticProgram.from_terms(2, [], [([1, 1], -1.0)], offset=1.0)
        sol = solve_qp(qp)
        assert sol.optimal and sol.objective == 1.0 and qp.violation(sol.z) <= TOL_FEAS

    def test_inconsistent_dimensions(self):
        with pytest.raises(ValueError):
            QuadraticProgram(np.ones((2, 2)), np.ones(3), np.zeros((0, 2)), np.zeros(0))


class TestOracles:
    def test_active_set_oracle_on_random_three_variable_programs(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            qp = random_qp3(rng, box=2.0)
            sol = solve_qp(qp)
            assert sol.optimal and sol.kkt_residual <= TOL_KKT
            exact_val, _ = active_set_qp(qp.R, qp.t, qp.G, qp.h)
            assert abs(sol.objective - exact_val) <= 1e-6

    def test_grid_oracle_on_random_three_variable_programs(self):
        # a 0.02 grid only bounds the optimum from above; near a slanted
        # active constraint its value lags by roughly gradient times spacing
        rng = np.random.default_rng(12)
        for _ in range(10):
            qp = random_qp3(rng, box=2.0)
            sol = solve_qp(qp)
            grid_val, _ = grid_qp(qp.R, qp.t, qp.G, qp.h, lo=-2, hi=2, step=0.02)
            assert sol.objective <= grid_val + 1e-9
            assert grid_val - sol.objective <= 0.05

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 100_000))
    def test_never_beaten_by_random_feasible_points(self, seed):
        rng = np.random.default_rng(seed)
        qp = random_qp3(rng)
        sol = solve_qp(qp)
        assert sol.optimal
        assert qp.violation(sol.z) <= TOL_FEAS
        Z = rng.uniform(-4, 4, size=(10_000, 3))
        feas = np.all(Z @ qp.G.T <= qp.h, axis=1)
        r = Z[feas] @ qp.R.T - qp.t
        vals = np.einsum("ij,ij->i", r, r)
        if vals.size:
            assert sol.objective <= vals.min() + 1e-6

    def test_determinism(self):
        qp = random_qp3(np.random.default_rng(3))
        a, b = solve_qp(qp), solve_qp(qp)
        assert a.z.tobytes() == b.z.tobytes() and a.objective == b.objective


class TestPatternPrograms:
    """Homogeneous, highly degenerate programs as the trainer builds them."""

    def test_random_patterns_solve_to_kkt_tolerance(self):
        rng = np.random.default_rng(4)
        for trial in range(200):
            d = int(rng.integers(1, 4))
            N = int(rng.integers(1, 9))
            X = rng.normal(size=(N, d))
            if trial % 4 == 0:
                X = np.round(X)
            ds = Dataset(X, rng.choice([0.0, 1.0, 2.5], N))
            q1 = tuple(int(s) for s in rng.choice([-1, 1], N))
            q2 = tuple(int(s) for s in rng.choice([-1, 1], N))
            split = tuple(0 if a < 0 and b < 0 else int(rng.choice([-1, 1])) for a, b in zip(q1, q2))
            pat = ActivationPattern(tuple(range(N)), q1, q2, split,
                                    int(rng.choice([-1, 1])), int(rng.choice([-1, 1])),
                                    int(rng.choice([-1, 1])), int(rng.choice([-1, 1])))
            qp = build_subprogram(ds, pat)
            assert qp.n == 2 * d + 3 and qp.n_constraints <= 3 * N + 1
            sol = solve_qp(qp)
            assert sol.status in ("optimal", "infeasible")
            if sol.optimal:
                assert sol.kkt_residual <= TOL_KKT
                assert qp.violation(sol.z) <= TOL_FEAS
                # the origin is always feasible for a homogeneous program
                assert sol.objective <= qp.objective(np.zeros(qp.n)) + 1e-9
