"""Exact interpolation of 0/1 labels by a wide one-hidden-layer ReLU network.

All first-layer units share one random direction ``v``.  Sorting the data by
``z_i = v @ x_i`` turns the problem into fitting a piecewise-linear function of
one variable, built in a single sweep: ``g`` is the affine piece active at the
current point, and a new unit is emitted only when the labels require a kink.
The pre-output ``f = sum_j w_j [a_j]_+`` equals 1 on label-1 points and stays
below 1 on label-0 points; ``w0`` and ``theta`` then turn ``f`` into an exact
fit.  At most ``N`` units are emitted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AffineFunction, Dataset, KReluNet, max_error, relu

TIE_REL = 1e-12
TOL_INV = 1e-9


class ProjectionTieError(ValueError):
    """Every sampled direction projected two points onto the same value."""

    def __init__(self, i: int, j: int, attempts: int):
        self.pair = (i, j)
        super().__init__(
            f"points {i} and {j} have equal projections on {attempts} random directions "
            "(duplicate inputs?)"
        )


class InvariantViolation(AssertionError):
    """The sweep left a state its construction rules out."""


@dataclass
class SweepState:
    """Where the sweep is: direction, sorted projections, current piece, node count."""

    v: np.ndarray
    order: np.ndarray
    z: np.ndarray
    g_grad: np.ndarray
    g_bias: float
    j: int = 0

    def g(self, x) -> float:
        return float(np.asarray(x) @ self.g_grad + self.g_bias)


def sample_direction(d: int, seed: int) -> np.ndarray:
    """A uniformly random unit vector in ``R^d``, reproducible from ``seed``."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    rng = np.random.default_rng(seed)
    while True:
        v = rng.standard_normal(d)
        n = float(np.linalg.norm(v))
        if n > 0:
            return v / n


def _find_tie(z_sorted: np.ndarray, order: np.ndarray):
    scale = float(np.max(np.abs(z_sorted))) if z_sorted.size else 0.0
    gaps = np.diff(z_sorted)
    bad = np.flatnonzero(gaps <= TIE_REL * scale)
    if bad.size:
        k = int(bad[0])
        return int(order[k]), int(order[k + 1])
    return None


def _check_labels(dataset: Dataset):
    if not dataset.is_binary():
        raise ValueError("interpolation fitter needs labels in {0, 1}")


class _Sweep:
    def __init__(self, dataset: Dataset, v: np.ndarray, check: bool):
        self.X = dataset.X
        self.v = v
        proj = self.X @ v
        order = np.argsort(proj, kind="stable")
        self.state = SweepState(v, order, proj[order], np.zeros(dataset.d), 0.0)
        self.y = dataset.y[order]
        self.Xs = self.X[order]
        self.nodes: list[tuple[AffineFunction, int]] = []
        self.check = check
        self.f = np.zeros(dataset.N)  # f on the sorted points

    def _emit(self, alpha, beta, w, upto):
        a = AffineFunction(alpha, beta)
        vals = a(self.Xs)
        if self.check and upto > 0:
            scale = 1.0 + float(np.max(np.abs(self.f)))
            if np.any(vals[:upto] > TOL_INV * scale):
                raise InvariantViolation(
                    f"node {len(self.nodes)} is active on an earlier point"
                )
        self.nodes.append((a, w))
        self.f = self.f + w * relu(vals)
        self.state.j += 1

    def _assert(self, upto: int):
        """Inductive claims on sorted points ``0..upto``."""
        if not self.check:
            return
        st = self.state
        f, y = self.f[: upto + 1], self.y[: upto + 1]
        scale = 1.0 + float(np.max(np.abs(f)))
        if np.any(np.abs(f[y == 1] - 1.0) > TOL_INV * scale):
            raise InvariantViolation(f"f != 1 on a label-1 point after step {upto}")
        if np.any(f[y == 0] >= 1.0):
            raise InvariantViolation(f"f >= 1 on a label-0 point after step {upto}")
        if abs(st.g(self.Xs[upto]) - f[upto]) > TOL_INV * scale:
            raise InvariantViolation(f"current piece does not match f at step {upto}")
        c = float(st.g_grad @ self.v)
        off = np.linalg.norm(st.g_grad - c * self.v)
        if off > TOL_INV * (1.0 + np.linalg.norm(st.g_grad)):
            raise InvariantViolation("gradient of the current piece left the direction v")
        if self.y[upto] == 0 and not c < 0:
            raise InvariantViolation(f"piece not decreasing along v at label-0 step {upto}")
        if self.y[upto] == 1 and c < -TOL_INV:
            raise InvariantViolation(f"piece decreasing along v at label-1 step {upto}")

    def _ramp(self, k: float, zi: float, w: int, upto: int):
        """Emit ``k * (v @ x - zi)`` with output weight ``w``."""
        self._emit(k * self.v, -k * zi, w, upto)

    def _set_piece(self, c: float, value: float, zi: float):
        """Current piece ``value + c * (v @ x - zi)``."""
        st = self.state
        st.g_grad, st.g_bias = c * self.v, value - c * zi

    def run(self):
        # Every kink sits at a point where g equals 1, so each emitted unit is
        # a multiple of (v @ x - z_i).  Slopes are carried as scalars and the
        # next value of f is read off the actual sum of units, which keeps
        # rounding from accumulating in the biases.
        st, y, z = self.state, self.y, self.state.z
        N = len(y)
        start = int(np.flatnonzero(y == 1)[0])
        z_prev = z[start - 1] if start > 0 else z[0] - 1.0
        # initialization: a ramp from 0 at the previous projection to 1 here
        c = 1.0 / (z[start] - z_prev)
        self._ramp(c, z_prev, 1, start)
        self._set_piece(c, 0.0, z_prev)
        self._assert(start)
        for i in range(start, N - 1):
            y_prev = y[i - 1] if i > 0 else 0.0
            gap = z[i + 1] - z[i]
            if y[i + 1] == y[i] == y_prev:  # case 1
                pass
            elif y[i + 1] == y[i] and y[i] == 1:  # case 2: a = g - 1, flatten to 1
                self._ramp(c, z[i], -1, i + 1)
                c = 0.0
                self._set_piece(c, 1.0, z[i])
            elif y[i + 1] == y[i]:  # case 3
                pass
            elif y[i] == 0:  # case 4: climb back to 1 at the next point
                k = (1.0 - self.f[i + 1]) / gap
                self._ramp(k, z[i], 1, i + 1)
                c = c + k
                self._set_piece(c, self.f[i], z[i])
            else:  # case 5: a = g - 1 + v @ x - z_i, then slope -1
                self._ramp(c + 1.0, z[i], -1, i + 1)
                c = -1.0
                self._set_piece(c, 1.0, z[i])
            self._assert(i + 1)
        return self


def fit_overparam(dataset: Dataset, seed: int = 0, max_retries: int = 8, check: bool = True) -> KReluNet:
    """Interpolate 0/1 labels exactly with at most ``N`` hidden units.

    Directions are drawn from seeds ``seed, seed + 1, ...``; a direction that
    projects two points (almost) onto the same value is discarded, and after
    ``max_retries`` discarded directions the offending pair is reported.
    With ``check`` every sweep step re-verifies the inductive invariants.
    """
    _check_labels(dataset)
    d = dataset.d
    if not np.any(dataset.y == 1):
        return KReluNet((), 0.0, 0.0, dim=d)
    sweep = None
    tie = None
    for attempt in range(max_retries):
        v = sample_direction(d, seed + attempt)
        proj = dataset.X @ v
        order = np.argsort(proj, kind="stable")
        tie = _find_tie(proj[order], order)
        if tie is None:
            sweep = _Sweep(dataset, v, check).run()
            break
    if sweep is None:
        raise ProjectionTieError(*sorted(tie), attempts=max_retries)
    f = np.empty(dataset.N)
    f[sweep.state.order] = sweep.f
    s0 = f[dataset.y == 0]
    w0 = -float(s0.max()) if s0.size else 0.0
    return KReluNet(tuple(sweep.nodes), w0, 1.0 / (1.0 + w0), dim=d)


def node_bound(dataset: Dataset, v: np.ndarray) -> int:
    """Units the sweep emits along ``v``: one per kink the labels force.

    The first ramp, one unit per label change after the first label-1 point,
    and one flattening unit per run of two or more consecutive 1s.
    """
    y = dataset.y[np.argsort(dataset.X @ v, kind="stable")]
    ones = np.flatnonzero(y == 1)
    if ones.size == 0:
        return 0
    tail = y[ones[0]:]
    changes = int(np.sum(tail[1:] != tail[:-1]))
    padded = np.concatenate([[0.0], y, [0.0]])
    runs = 0
    for i in range(1, len(padded) - 2):
        if padded[i] == 1 and padded[i + 1] == 1 and padded[i - 1] == 0:
            runs += 1
    return 1 + changes + runs


def verify_interpolation(net: KReluNet, dataset: Dataset, tol: float = 1e-9) -> bool:
    """True iff the net fits every label within ``tol`` using at most ``N`` units."""
    if len(net) > dataset.N:
        return False
    return max_error(net, dataset) <= tol


__all__ = [
    "InvariantViolation",
    "ProjectionTieError",
    "SweepState",
    "fit_overparam",
    "node_bound",
    "sample_direction",
    "verify_interpolation",
]
