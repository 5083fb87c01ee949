"""Small dense least-squares programs with linear inequality constraints.

    minimize    ||R z - t||^2 + offset
    subject to  G z <= h

Solved with a primal active-set method whose steps are minimum-norm
least-squares solves in the null space of the working constraints, so a
singular Hessian ``R^T R`` (variables no residual touches) needs no special
casing.  Programs built from activation patterns are homogeneous and highly
degenerate at the origin, where a plain active-set method can cycle, so the
right-hand side is first loosened by tiny distinct amounts.  The final working
set is then re-solved against the true right-hand side and the answer is only
reported optimal after a KKT check with non-negative multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, nnls

TOL_FEAS = 1e-9
TOL_KKT = 1e-8


@dataclass(frozen=True)
class QuadraticProgram:
    R: np.ndarray
    t: np.ndarray
    G: np.ndarray
    h: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        G = np.asarray(self.G, dtype=float)
        n = R.shape[1]
        if G.size == 0:
            G = G.reshape(0, n)
        t = np.asarray(self.t, dtype=float).reshape(-1)
        h = np.asarray(self.h, dtype=float).reshape(-1)
        if R.shape[0] != t.shape[0] or G.shape[0] != h.shape[0] or G.shape[1] != n:
            raise ValueError("inconsistent program dimensions")
        if n < 1:
            raise ValueError("need at least one variable")
        for name, v in (("R", R), ("t", t), ("G", G), ("h", h)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def from_terms(cls, n: int, residuals=(), inequalities=(), offset: float = 0.0):
        """Build from ``[(row, target), ...]`` and ``[(row, rhs), ...]`` lists."""
        R = np.array([r for r, _ in residuals], dtype=float).reshape(-1, n)
        t = np.array([v for _, v in residuals], dtype=float)
        G = np.array([g for g, _ in inequalities], dtype=float).reshape(-1, n)
        h = np.array([v for _, v in inequalities], dtype=float)
        return cls(R, t, G, h, offset)

    @property
    def n(self) -> int:
        return self.R.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.G.shape[0]

    def objective(self, z) -> float:
        r = self.R @ np.asarray(z, dtype=float) - self.t
        return float(r @ r) + self.offset

    def violation(self, z) -> float:
        if self.G.shape[0] == 0:
            return 0.0
        return float(max(0.0, np.max(self.G @ np.asarray(z, dtype=float) - self.h)))


@dataclass(frozen=True)
class QpSolution:
    z: np.ndarray
    objective: float
    kkt_residual: float
    status: str  # "optimal", "infeasible" or "failed"
    iterations: int = 0
    multipliers: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _null_space(A: np.ndarray, n: int) -> np.ndarray:
    if A.shape[0] == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(A)
    rank = int(np.sum(s > 1e-12 * max(1.0, s[0])))
    return vt[rank:].T


def _min_norm_lstsq(A: np.ndarray, b: np.ndarray, cutoff: float = 1e-10) -> np.ndarray:
    """Minimum-norm least squares dropping singular values below ``cutoff``.

    The cutoff is absolute: callers scale ``A`` to unit spectral norm or less,
    so a tiny largest singular value means "no curvature", not "rescale".
    """
    u, s, vt = np.linalg.svd(A, full_matrices=False)
    keep = s > cutoff
    return vt[keep].T @ ((u[:, keep].T @ b) / s[keep])


def _phase_one(G: np.ndarray, h: np.ndarray, n: int):
    """A point minimizing the largest violation; returns (z, max_violation)."""
    # max s  s.t.  G z + s <= h,  s <= 1
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A = np.hstack([G, np.ones((G.shape[0], 1))])
    res = linprog(
        c,
        A_ub=A,
        b_ub=h,
        bounds=[(None, None)] * n + [(None, 1.0)],
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        return np.zeros(n), np.inf
    z = res.x[:n]
    return z, float(max(0.0, np.max(G @ z - h))) if G.shape[0] else 0.0


def _kkt(R, t, G, h, z, W, lam) -> float:
    grad = 2.0 * R.T @ (R @ z - t)
    stat = grad.copy()
    if W:
        stat += G[W].T @ lam
    scale = 1.0 + float(np.max(np.abs(2.0 * R.T @ t))) if R.size else 1.0
    res = float(np.max(np.abs(stat))) / scale if stat.size else 0.0
    if G.shape[0]:
        slack = G @ z - h
        res = max(res, float(max(0.0, np.max(slack))))
        if W:
            res = max(res, float(max(0.0, -np.min(lam))))
            res = max(res, float(np.max(np.abs(lam * slack[W]))) / scale)
    return res


PERTURBATIONS = (1e-7, 1e-10, 0.0)


def _spread(m: int) -> np.ndarray:
    """Deterministic distinct weights in [1, 2) (golden-ratio sequence)."""
    return 1.0 + np.mod(np.arange(1, m + 1) * 0.6180339887498949, 1.0)


def _multipliers(Gw, grad):
    """Non-negative ``lam`` minimizing ``||Gw^T lam + grad||``."""
    if Gw.shape[0] == 0:
        return np.zeros(0)
    lam, _ = nnls(Gw.T, -grad, maxiter=50 * Gw.shape[0] + 100)
    return lam


def _polish(R, t, G, h, z, W):
    """Solve the equality program on working set ``W`` from ``z``; returns (z, lam)."""
    n = R.shape[1]
    A = G[W]
    z_new = np.array(z, dtype=float)
    if W:
        # land exactly on the working constraints (min-norm correction)
        corr, *_ = np.linalg.lstsq(A, h[W] - A @ z_new, rcond=1e-12)
        z_new = z_new + corr
    Z = _null_space(A, n)
    if Z.shape[1] and R.shape[0]:
        z_new = z_new + Z @ _min_norm_lstsq(R @ Z, t - R @ z_new)
    grad = 2.0 * R.T @ (R @ z_new - t)
    return z_new, _multipliers(A, grad)


def _near_active(G, h, z, band: float) -> list:
    slack = G @ z - h
    return [int(i) for i in np.flatnonzero(slack >= -band)]


def solve_qp(qp: QuadraticProgram, z0=None, max_iter: int | None = None) -> QpSolution:
    """Minimize the program; deterministic for identical inputs.

    ``z0`` is an optional feasible starting point.  Without it the origin is
    used when feasible, otherwise an LP phase one finds a start.  Infeasible
    programs get status ``"infeasible"``; ``"failed"`` means no candidate
    passed the KKT check.
    """
    n = qp.n
    R, t = qp.R, qp.t
    G, h = qp.G, qp.h

    norms = np.linalg.norm(G, axis=1) if G.shape[0] else np.zeros(0)
    bad_zero = (norms == 0) & (h < -TOL_FEAS)
    if np.any(bad_zero):
        return QpSolution(np.zeros(n), np.inf, float(-np.min(h[bad_zero])), "infeasible")
    keep = np.flatnonzero(norms > 0)
    Gn = G[keep] / norms[keep, None]
    hn = h[keep] / norms[keep]

    # scale so the objective Hessian has unit spectral norm
    rs = float(np.linalg.norm(R, 2)) if R.size else 0.0
    rs = rs if rs > 0 else 1.0
    Rs, ts = R / rs, t / rs
    m = Gn.shape[0]

    if m and not np.all(hn >= 0) and not (
        z0 is not None and np.max(Gn @ np.asarray(z0, float) - hn) <= TOL_FEAS
    ):
        z_lp, viol = _phase_one(Gn, hn, n)
        if viol > TOL_FEAS:
            return QpSolution(z_lp, np.inf, viol, "infeasible")
        if z0 is None:
            z0 = z_lp

    # Degenerate vertices (the origin of a homogeneous system above all) make
    # active-set methods cycle.  Loosening every constraint by a tiny distinct
    # amount removes the degeneracy; the true program is then solved exactly on
    # the constraints that end up (nearly) active and checked for optimality.
    best = None
    iterations = 0
    scale = 1.0 + float(np.linalg.norm(ts))
    for delta in PERTURBATIONS:
        hp = hn + delta * scale * _spread(m)
        sol = _active_set(Rs, ts, Gn, hp, z0, max_iter)
        if sol is None:
            continue
        iterations += sol[4]
        for W in (sol[1], _near_active(Gn, hn, sol[0], 10 * delta * scale)):
            z, lam = _polish(Rs, ts, Gn, hn, sol[0], W)
            kkt = _kkt(Rs, ts, Gn, hn, z, W, lam)
            if kkt <= TOL_KKT:
                best = (z, W, lam, kkt, iterations)
                break
        if best is not None:
            break
    if best is None:
        z = np.zeros(n) if z0 is None else np.asarray(z0, float)
        return QpSolution(z, qp.objective(z), np.inf, "failed", iterations)
    z, W, lam, kkt, it = best
    lam_full = np.zeros(G.shape[0])
    if W:
        # undo row and objective scaling: grad of the original is rs^2 times larger
        lam_full[keep[W]] = lam * rs * rs / norms[keep[W]]
    status = "optimal" if kkt <= TOL_KKT else "failed"
    return QpSolution(z, qp.objective(z), kkt, status, it, lam_full)


def _active_set(R, t, Gn, hn, z0, max_iter):
    """Primal active-set method on normalized rows; returns (z, W, lam, kkt, it) or None."""
    n = R.shape[1]
    m = Gn.shape[0]
    if z0 is not None and (m == 0 or np.max(Gn @ np.asarray(z0, float) - hn) <= TOL_FEAS):
        z = np.array(z0, dtype=float)
    elif m == 0 or np.all(hn >= 0):
        z = np.zeros(n)
    else:
        z, viol = _phase_one(Gn, hn, n)
        if viol > TOL_FEAS:
            return None
    if max_iter is None:
        max_iter = 50 * (n + m) + 100
    W: list[int] = []
    lam = np.zeros(0)
    for it in range(1, max_iter + 1):
        Z = _null_space(Gn[W], n)
        if Z.shape[1] and R.shape[0]:
            u = _min_norm_lstsq(R @ Z, t - R @ z)
            p = Z @ u
        else:
            p = np.zeros(n)
        if np.linalg.norm(p) <= 1e-13 * (1.0 + np.linalg.norm(z)):
            grad = 2.0 * R.T @ (R @ z - t)
            if not W:
                return z, W, np.zeros(0), _kkt(R, t, Gn, hn, z, W, np.zeros(0)), it
            lam, *_ = np.linalg.lstsq(Gn[W].T, -grad, rcond=1e-10)
            neg = np.flatnonzero(lam < -1e-12 * (1.0 + float(np.max(np.abs(grad)))))
            if neg.size == 0:
                lam = np.maximum(lam, 0.0)
                kkt = _kkt(R, t, Gn, hn, z, W, lam)
                return (z, W, lam, kkt, it) if kkt <= TOL_KKT else None
            W.pop(int(neg[np.argmin(np.array(W)[neg])]))
            continue
        Gp = Gn @ p
        alpha, block = 1.0, -1
        cand = [i for i in range(m) if i not in W and Gp[i] > 1e-14]
        if cand:
            ci = np.array(cand)
            ratios = np.maximum(hn[ci] - Gn[ci] @ z, 0.0) / Gp[ci]
            k = int(np.argmin(ratios))
            if ratios[k] < 1.0:
                tied = np.flatnonzero(ratios <= ratios[k] + 1e-15)
                k = int(tied[0])
                alpha, block = float(ratios[k]), int(ci[k])
        z = z + alpha * p
        if block >= 0:
            W.append(block)
    return None
