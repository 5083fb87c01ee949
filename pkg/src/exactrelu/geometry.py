"""Hyperplane dichotomies of finite point sets.

``enumerate_dichotomies`` lists every sign vector a hyperplane can cut out of a
point set.  In the parameter space ``(alpha, beta)`` each point is a
hyperplane through the origin; dichotomies are the open cells of that central
arrangement.  Once the points affinely span their space every cell is a
pointed cone, so it touches an extreme ray, and an extreme ray is a hyperplane
in input space through an affinely independent ``d``-subset.  The cells around
such a ray are obtained by perturbing the hyperplane: off-plane points keep
their side, and the on-plane points take the sign pattern of any dichotomy of
those points *inside* the hyperplane.  That inner problem is the same problem
one dimension down, which is how degenerate inputs (more than ``d`` points on
one hyperplane) are handled exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, nnls

from .core import AffineFunction

TOL_GEOM = 1e-9


@dataclass(frozen=True)
class Dichotomy:
    """Signs over point indices (``+1``: ``witness >= 0``) and a realizing map."""

    signs: tuple
    witness: AffineFunction

    @property
    def positive(self) -> tuple:
        return tuple(i for i, s in enumerate(self.signs) if s > 0)

    @property
    def negative(self) -> tuple:
        return tuple(i for i, s in enumerate(self.signs) if s < 0)

    def consistent_with(self, points, tol: float = TOL_GEOM) -> bool:
        v = self.witness(np.asarray(points, dtype=float))
        s = np.asarray(self.signs)
        return bool(np.all(s * v >= -tol))


def _normalizer(X: np.ndarray):
    """Affine map sending ``X`` into the unit max-norm ball around its centre."""
    if X.shape[0] == 0 or X.shape[1] == 0:
        return np.zeros(X.shape[1]), 1.0
    lo, hi = X.min(axis=0), X.max(axis=0)
    center = (lo + hi) / 2
    scale = float(np.max(np.abs(X - center)))
    return center, (scale if scale > 0 else 1.0)


def _unscale(alpha, beta, center, scale) -> AffineFunction:
    # witness was built for (x - center) / scale
    a = np.asarray(alpha, dtype=float) / scale
    return AffineFunction(a, float(beta) - float(a @ center))


def _affine_basis(U: np.ndarray, tol: float):
    """Origin and orthonormal basis (columns) of the affine hull of ``U``."""
    origin = U[0]
    D = U - origin
    if D.shape[1] == 0:
        return origin, np.zeros((0, 0))
    _, s, vt = np.linalg.svd(D, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    return origin, vt[:rank].T


def _enum_unique(U: np.ndarray, tol: float) -> dict:
    """Dichotomies of distinct points ``U`` (M, k): ``{signs: (alpha, beta)}``."""
    M, k = U.shape
    origin, B = _affine_basis(U, tol) if M > 1 else (U[0], np.zeros((k, 0)))
    r = B.shape[1]
    if r == 0:
        zero = np.zeros(k)
        return {(1,) * M: (zero, 1.0), (-1,) * M: (zero, -1.0)}
    if r < k:
        # work inside the affine hull and lift the witnesses back
        inner = _enum_unique((U - origin) @ B, tol)
        out = {}
        for signs, (g, c) in inner.items():
            alpha = B @ g
            out[signs] = (alpha, c - float(alpha @ origin))
        return out

    found: dict = {}
    seen_planes: set = set()
    ones = np.ones((k, 1))
    for subset in itertools.combinations(range(M), k):
        S = U[list(subset)]
        A = np.hstack([S, ones])
        _, s, vt = np.linalg.svd(A)
        if s.size < k or s[-1] <= tol * max(1.0, s[0]):
            continue  # subset does not span a hyperplane
        n = vt[-1]
        alpha, beta = n[:k], n[k]
        norm = np.linalg.norm(alpha)
        alpha, beta = alpha / norm, beta / norm
        vals = U @ alpha + beta
        on = np.flatnonzero(np.abs(vals) <= tol)
        key = tuple(on)
        if key in seen_planes:
            continue
        seen_planes.add(key)
        off = np.flatnonzero(np.abs(vals) > tol)
        off_signs = np.sign(vals[off]).astype(int)

        # dichotomies of the on-plane points within the hyperplane
        h_origin = U[on[0]]
        _, _, vt_h = np.linalg.svd(alpha.reshape(1, -1))
        H = vt_h[1:].T  # orthonormal basis of the hyperplane directions
        inner = _enum_unique((U[on] - h_origin) @ H, tol)
        for in_signs, (g, c) in inner.items():
            d_alpha = H @ g
            d_beta = c - float(d_alpha @ h_origin)
            if off.size:
                dv = np.abs(U[off] @ d_alpha + d_beta)
                eps = 0.5 * float(np.min(np.abs(vals[off]))) / max(float(np.max(dv)), 1e-300)
                eps = min(eps, 1.0)
            else:
                eps = 1.0
            w_alpha = alpha + eps * d_alpha
            w_beta = beta + eps * d_beta
            signs = np.empty(M, dtype=int)
            signs[off] = off_signs
            signs[on] = in_signs
            for flip in (1, -1):
                key_s = tuple(int(v) for v in flip * signs)
                if key_s not in found:
                    found[key_s] = (flip * w_alpha, flip * w_beta)
    return found


def _sign_order(signs: tuple):
    # '+' sorts before '-' so the all-positive vector comes first
    return tuple(-s for s in signs)


def enumerate_dichotomies(points, d: int | None = None, tol: float = TOL_GEOM) -> list[Dichotomy]:
    """Every sign vector realizable by an affine hyperplane, with witnesses.

    Points are rescaled to max-norm 1 before the on-plane tests; duplicates
    (exact coordinate equality) are collapsed and always share a sign.  The
    result is sorted lexicographically with ``+`` before ``-``.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if d in (None, 1) else X.reshape(-1, d)
    if d is not None and X.shape[1] != d:
        raise ValueError(f"points have dimension {X.shape[1]}, expected {d}")
    N = X.shape[0]
    if N == 0:
        return [Dichotomy((), AffineFunction.constant(X.shape[1], 1.0))]
    center, scale = _normalizer(X)
    Xs = (X - center) / scale
    U, inverse = np.unique(Xs, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    found = _enum_unique(U, tol)
    out = []
    for signs, (alpha, beta) in found.items():
        full = tuple(int(signs[j]) for j in inverse)
        out.append(Dichotomy(full, _unscale(alpha, beta, center, scale)))
    out.sort(key=lambda dch: _sign_order(dch.signs))
    return out


def cover_count(N: int, d: int) -> int:
    """Number of affine dichotomies of ``N`` points in general position in R^d."""
    from math import comb

    return 2 * sum(comb(N - 1, k) for k in range(0, d + 1))


def _max_margin(A: np.ndarray, B: np.ndarray):
    """max t s.t. alpha.a + beta >= t (A), alpha.b + beta <= -t (B), |alpha|_inf <= 1."""
    d = A.shape[1] if A.size else B.shape[1]
    n = d + 2  # alpha, beta, t
    rows, rhs = [], []
    for a in A:
        rows.append(np.concatenate([-a, [-1.0, 1.0]]))
        rhs.append(0.0)
    for b in B:
        rows.append(np.concatenate([b, [1.0, 1.0]]))
        rhs.append(0.0)
    c = np.zeros(n)
    c[-1] = -1.0
    bounds = [(-1.0, 1.0)] * d + [(None, None), (None, 1.0)]
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
    if res.status != 0:
        return None, -np.inf
    x = res.x
    return (x[:d], x[d]), float(x[-1])


def strict_separation_lp(A, B, d: int | None = None, tol: float = TOL_GEOM):
    """Maximum-margin strict separator of ``A`` (positive side) from ``B``.

    Returns an ``AffineFunction`` with ``f(a) > 0 > f(b)`` or ``None`` when the
    best margin (points rescaled to max-norm 1, ``|alpha|_inf <= 1``) is at
    most ``tol``.  The rescaling is uniform, so the returned witness,
    normalized to ``|alpha|_inf = 1``, is also max-margin in the input frame.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if d is not None:
        A = A.reshape(-1, d)
        B = B.reshape(-1, d)
    if A.shape[0] == 0 and B.shape[0] == 0:
        raise ValueError("need at least one point")
    dim = A.shape[1] if A.shape[0] else B.shape[1]
    if A.shape[0] == 0:
        return AffineFunction.constant(dim, -1.0)
    if B.shape[0] == 0:
        return AffineFunction.constant(dim, 1.0)
    center, scale = _normalizer(np.vstack([A, B]))
    sol, margin = _max_margin((A - center) / scale, (B - center) / scale)
    if sol is None or margin <= tol:
        return None
    f = _unscale(sol[0], sol[1], center, scale)
    m = float(np.max(np.abs(f.alpha))) if f.d else 0.0
    return f.scaled(1.0 / m) if m > 0 else f


def realize(points, signs, tol: float = TOL_GEOM):
    """Witness strictly realizing ``signs`` on ``points``, or ``None``."""
    X = np.asarray(points, dtype=float)
    s = np.asarray(signs)
    return strict_separation_lp(X[s > 0], X[s < 0], d=X.shape[1], tol=tol)


def realize_fast(points, signs, tol: float = TOL_GEOM):
    """Same answer as ``realize``, usually without an LP.

    Strict realizability means some ``v`` has ``U v >= 1`` for the rows
    ``U_i = s_i (x_i, 1)``.  One non-negative least-squares solve yields
    either the least-norm such ``v`` or a convex combination of the rows that
    is (numerically) zero, a Gordan certificate.  A witness with a clear
    margin or a clean certificate settles the question; borderline cases go
    to the LP.
    """
    X = np.asarray(points, dtype=float)
    s = np.asarray(signs, dtype=float)
    if X.shape[0] == 0 or X.shape[1] == 0 or np.all(s > 0) or np.all(s < 0):
        return realize(X, s, tol)
    center, scale = _normalizer(X)
    U = s[:, None] * np.hstack([(X - center) / scale, np.ones((X.shape[0], 1))])
    n = U.shape[1]
    E = np.vstack([U.T, np.ones((1, U.shape[0]))])
    f = np.zeros(n + 1)
    f[-1] = 1.0
    try:
        u, _ = nnls(E, f, maxiter=50 * U.shape[0] + 100)
    except RuntimeError:
        return realize(X, s, tol)
    r = E @ u - f
    if abs(r[-1]) > 1e-12:
        v = -r[:n] / r[-1]
        amax = float(np.max(np.abs(v[:-1])))
        if amax > 0 and float(np.min(U @ v)) / amax > 1e-7:
            return _unscale(v[:-1], v[-1], center, scale)
    total = float(np.sum(u))
    if total > 0 and float(np.linalg.norm(U.T @ u)) / total <= 1e-12:
        return None
    return realize(X, s, tol)
