"""Domain types, network evaluation and losses.

Networks come in two flavours:

* ``TwoReluNet`` -- two first-layer ReLU units feeding one second-layer ReLU,
  ``F(x) = theta * [w0 + w1*[a1(x)]_+ + w2*[a2(x)]_+]_+``.
* ``KReluNet`` -- the same shape with an arbitrary number of first-layer units.

First-layer output weights are kept in normalized form (``+1`` or ``-1``); any
magnitude is absorbed into the affine map since ``w*[a]_+ == sgn(w)*[|w|*a]_+``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class DimensionError(ValueError):
    """Raised when vectors of incompatible dimension are combined."""


def _frozen(a, ndim: int) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim != ndim:
        raise DimensionError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _check_sign(w) -> int:
    if w not in (-1, 1):
        raise ValueError(f"output weight must be +1 or -1, got {w!r}")
    return int(w)


def relu(t):
    """``max(t, 0)``; works elementwise on arrays.  ``relu(0) == 0``."""
    return np.maximum(t, 0.0)


@dataclass(frozen=True)
class LabeledPoint:
    x: np.ndarray
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(self.x, 1))
        if not np.all(np.isfinite(self.x)):
            raise ValueError("point coordinates must be finite")
        object.__setattr__(self, "y", float(self.y))


@dataclass(frozen=True)
class Dataset:
    """Ordered labeled points sharing one input dimension.

    ``X`` has shape ``(N, d)`` and ``y`` shape ``(N,)``.  ``d`` may be 0, which
    is how the bare gadget (no original coordinates) is represented.
    """

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = _frozen(self.X, 2)
        y = _frozen(self.y, 1)
        if X.shape[0] != y.shape[0]:
            raise DimensionError(f"{X.shape[0]} points but {y.shape[0]} labels")
        if X.shape[0] < 1:
            raise ValueError("a dataset needs at least one point")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("dataset entries must be finite")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_points(cls, points: Sequence[LabeledPoint], d: int | None = None) -> "Dataset":
        if not points:
            raise ValueError("a dataset needs at least one point")
        dims = {p.x.shape[0] for p in points}
        if len(dims) != 1 or (d is not None and dims != {d}):
            raise DimensionError(f"mixed point dimensions {sorted(dims)}")
        return cls(np.stack([p.x for p in points]), np.array([p.y for p in points]))

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def points(self) -> list[LabeledPoint]:
        return [LabeledPoint(x, y) for x, y in zip(self.X, self.y)]

    def is_binary(self) -> bool:
        return bool(np.all((self.y == 0) | (self.y == 1)))

    @property
    def S1(self) -> np.ndarray:
        return np.flatnonzero(self.y == 1)

    @property
    def S0(self) -> np.ndarray:
        return np.flatnonzero(self.y == 0)

    def subset(self, idx: Iterable[int]) -> "Dataset":
        idx = np.asarray(list(idx), dtype=int)
        return Dataset(self.X[idx], self.y[idx])


@dataclass(frozen=True)
class AffineFunction:
    """``x -> alpha @ x + beta``."""

    alpha: np.ndarray
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _frozen(self.alpha, 1))
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def d(self) -> int:
        return self.alpha.shape[0]

    @property
    def degenerate(self) -> bool:
        return not np.any(self.alpha)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise DimensionError(f"affine map on R^{self.d} applied to shape {x.shape}")
        return x @ self.alpha + self.beta

    def __neg__(self) -> "AffineFunction":
        return AffineFunction(-self.alpha, -self.beta)

    def scaled(self, c: float) -> "AffineFunction":
        return AffineFunction(c * self.alpha, c * self.beta)

    @classmethod
    def zero(cls, d: int) -> "AffineFunction":
        return cls(np.zeros(d), 0.0)

    @classmethod
    def constant(cls, d: int, beta: float) -> "AffineFunction":
        return cls(np.zeros(d), beta)


def _as_inputs(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != d:
        raise DimensionError(f"network on R^{d} applied to input of shape {x.shape}")
    return x


@dataclass(frozen=True)
class TwoReluNet:
    a1: AffineFunction
    a2: AffineFunction
    w0: float
    w1: int
    w2: int
    theta: float

    def __post_init__(self):
        if self.a1.d != self.a2.d:
            raise DimensionError("first-layer maps disagree on input dimension")
        object.__setattr__(self, "w1", _check_sign(self.w1))
        object.__setattr__(self, "w2", _check_sign(self.w2))
        object.__setattr__(self, "w0", float(self.w0))
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def d(self) -> int:
        return self.a1.d

    def hidden(self, x):
        """Second-layer pre-activation without ``w0``: ``w1[a1]_+ + w2[a2]_+``."""
        x = _as_inputs(x, self.d)
        return self.w1 * relu(self.a1(x)) + self.w2 * relu(self.a2(x))

    def __call__(self, x):
        return eval_two_relu(self, x)

    def to_k(self) -> "KReluNet":
        return KReluNet(((self.a1, self.w1), (self.a2, self.w2)), self.w0, self.theta, self.d)


@dataclass(frozen=True)
class KReluNet:
    nodes: tuple = ()
    w0: float = 0.0
    theta: float = 1.0
    dim: int | None = field(default=None)

    def __post_init__(self):
        nodes = tuple((a, _check_sign(w)) for a, w in self.nodes)
        dims = {a.d for a, _ in nodes}
        if self.dim is not None:
            dims.add(int(self.dim))
        if len(dims) > 1:
            raise DimensionError(f"nodes span several input dimensions {sorted(dims)}")
        if not dims:
            raise ValueError("an empty network needs an explicit dim")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "dim", dims.pop())
        object.__setattr__(self, "w0", float(self.w0))
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def d(self) -> int:
        return self.dim

    def __len__(self) -> int:
        return len(self.nodes)

    def hidden(self, x):
        """``sum_j w_j [a_j(x)]_+``, the pre-output function before ``w0``."""
        x = _as_inputs(x, self.d)
        out = np.zeros(x.shape[:-1])
        for a, w in self.nodes:
            out = out + w * relu(a(x))
        return out

    def __call__(self, x):
        return eval_k_relu(self, x)


def eval_two_relu(net: TwoReluNet, x):
    x = _as_inputs(x, net.d)
    inner = net.w0 + net.w1 * relu(net.a1(x)) + net.w2 * relu(net.a2(x))
    return net.theta * relu(inner)


def eval_k_relu(net: KReluNet, x):
    return net.theta * relu(net.w0 + net.hidden(x))


def _predict(net, X) -> np.ndarray:
    if net.d != X.shape[1]:
        raise DimensionError(f"network on R^{net.d} but dataset in R^{X.shape[1]}")
    return np.asarray(net(X), dtype=float)


def residuals(net, dataset: Dataset) -> np.ndarray:
    return _predict(net, dataset.X) - dataset.y


def squared_loss(net, dataset: Dataset) -> float:
    r = residuals(net, dataset)
    return float(r @ r)


def max_error(net, dataset: Dataset) -> float:
    return float(np.max(np.abs(residuals(net, dataset))))


def zero_loss_decision(net, dataset: Dataset, tol: float) -> bool:
    """True iff every training point is fit within ``tol`` (sup norm)."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return max_error(net, dataset) <= tol
