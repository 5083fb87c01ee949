"""Reduction from 2-affine separability to zero-loss training of a 2-ReLU net.

An instance is a point set split into ``S1`` and ``S0``; it is separable when
two affine functions are both strictly positive on every ``S1`` point and at
least one of them is strictly negative on every ``S0`` point.  The reduction
appends two coordinates, embeds the points as ``(x, 0, 0)`` and adds twelve
fixed gadget points whose geometry pins down the shape of every interpolating
network.

Witnesses (``TwoPlaneWitness``) are always expressed in the instance's
original coordinates.  The reduction itself runs on the normalized instance
(translated so that an ``S1`` point sits at the origin), and the translation
is kept on the instance so results can be mapped back.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import AffineFunction, Dataset, TwoReluNet, max_error, relu, squared_loss
from .geometry import enumerate_dichotomies, realize

TOL_STRICT = 1e-9

# (last two coordinates, label) of the twelve gadget points p1..p12
GADGET_POINTS = (
    ((1.0, 1.0), 1.0),
    ((2.0, 1.0), 1.0),
    ((1.0, 2.0), 1.0),
    ((2.0, 2.0), 1.0),
    ((1.0, -1.0), 0.0),
    ((2.0, -1.0), 0.0),
    ((3.0, -1.0), 0.0),
    ((-1.0, 1.0), 0.0),
    ((-1.0, 2.0), 0.0),
    ((-1.0, 3.0), 0.0),
    ((-1.0, 0.0), 0.0),
    ((0.0, -1.0), 0.0),
)


def gadget_dataset() -> Dataset:
    """The twelve gadget points plus the origin (label 1) in the plane."""
    X = np.array([[0.0, 0.0]] + [p for p, _ in GADGET_POINTS])
    y = np.array([1.0] + [lab for _, lab in GADGET_POINTS])
    return Dataset(X, y)


@dataclass(frozen=True)
class SeparabilityInstance:
    """Points in ``R^d`` with a partition ``S1`` / ``S0`` of their indices.

    ``shift`` records a translation already applied: the stored points equal
    the original points minus ``shift``.  ``source`` keeps the original
    points themselves, since adding ``shift`` back is not exact in floating
    point.
    """

    points: np.ndarray
    S1: tuple
    S0: tuple
    shift: np.ndarray = field(default=None)
    source: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        P = np.array(self.points, dtype=float)
        if P.ndim != 2:
            raise ValueError(f"points must be a 2-d array, got shape {P.shape}")
        if not np.all(np.isfinite(P)):
            raise ValueError("points must be finite")
        S1 = tuple(sorted(int(i) for i in self.S1))
        S0 = tuple(sorted(int(i) for i in self.S0))
        N = P.shape[0]
        if set(S1) & set(S0):
            raise ValueError("S1 and S0 overlap")
        if sorted(S1 + S0) != list(range(N)):
            raise ValueError("S1 and S0 must partition the point indices")
        if not S1:
            raise ValueError("S1 must be nonempty")
        shift = np.zeros(P.shape[1]) if self.shift is None else np.array(self.shift, dtype=float)
        if shift.shape != (P.shape[1],):
            raise ValueError("shift has the wrong dimension")
        src = P + shift if self.source is None else np.array(self.source, dtype=float)
        if src.shape != P.shape:
            raise ValueError("source points have the wrong shape")
        for a in (P, shift, src):
            a.setflags(write=False)
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "S1", S1)
        object.__setattr__(self, "S0", S0)
        object.__setattr__(self, "shift", shift)

    @classmethod
    def from_dataset(cls, dataset: Dataset) -> "SeparabilityInstance":
        if not dataset.is_binary():
            raise ValueError("separability instances need labels in {0, 1}")
        return cls(dataset.X, tuple(dataset.S1), tuple(dataset.S0))

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def labels(self) -> np.ndarray:
        y = np.zeros(self.N)
        y[list(self.S1)] = 1.0
        return y

    @property
    def original_points(self) -> np.ndarray:
        return self.source

    def is_normalized(self) -> bool:
        return bool(np.any(np.all(self.points[list(self.S1)] == 0.0, axis=1)))

    def normalized(self) -> "SeparabilityInstance":
        """Translate so the first ``S1`` point is the origin (no-op if one already is)."""
        if self.is_normalized():
            return self
        x0 = self.points[self.S1[0]]
        return SeparabilityInstance(self.points - x0, self.S1, self.S0, self.shift + x0, self.source)

    def to_frame(self, f: AffineFunction) -> AffineFunction:
        """Re-express an original-coordinate function in this instance's frame."""
        return AffineFunction(f.alpha, f.beta + float(f.alpha @ self.shift))

    def from_frame(self, f: AffineFunction) -> AffineFunction:
        """Re-express a function of this frame in original coordinates."""
        return AffineFunction(f.alpha, f.beta - float(f.alpha @ self.shift))


@dataclass(frozen=True)
class TwoPlaneWitness:
    h1: AffineFunction
    h2: AffineFunction

    def normalized(self) -> "TwoPlaneWitness":
        return TwoPlaneWitness(_unit_inf(self.h1), _unit_inf(self.h2))


@dataclass(frozen=True)
class HardSortWitness:
    """``w1[l1]_+ + w2[l2]_+`` equals ``c`` on one class and lies on ``side`` of it on the other."""

    l1: AffineFunction
    l2: AffineFunction
    w1: int
    w2: int
    c: float
    side: str  # "above" or "below"

    def __post_init__(self):
        if self.side not in ("above", "below"):
            raise ValueError(f"side must be 'above' or 'below', got {self.side!r}")
        if self.w1 not in (-1, 1) or self.w2 not in (-1, 1):
            raise ValueError("hard-sort weights must be +1 or -1")
        if self.l1.d != self.l2.d:
            raise ValueError("affine maps disagree on dimension")
        object.__setattr__(self, "c", float(self.c))

    def values(self, points) -> np.ndarray:
        X = np.asarray(points, dtype=float)
        return self.w1 * relu(self.l1(X)) + self.w2 * relu(self.l2(X))


def _unit_inf(f: AffineFunction) -> AffineFunction:
    """Scale to ``|alpha|_inf = 1``; a degenerate map is scaled to ``|beta| = 1``."""
    m = float(np.max(np.abs(f.alpha))) if f.d else 0.0
    if m == 0.0:
        m = abs(f.beta)
    return f.scaled(1.0 / m) if m > 0 else f


# ---------------------------------------------------------------- checking

def check_separability(instance: SeparabilityInstance, witness: TwoPlaneWitness,
                       tol: float = TOL_STRICT) -> bool:
    """Both planes ``> tol`` on ``S1`` and one of them ``< -tol`` on each ``S0`` point.

    Each plane is first scaled to ``|alpha|_inf = 1`` so the margin is
    scale-free.  The witness is read in original coordinates.
    """
    if witness.h1.d != instance.d or witness.h2.d != instance.d:
        raise ValueError("witness and instance dimensions differ")
    w = witness.normalized()
    X = instance.original_points
    lo = np.minimum(w.h1(X), w.h2(X))
    S1, S0 = list(instance.S1), list(instance.S0)
    if np.any(lo[S1] <= tol):
        return False
    return bool(np.all(lo[S0] < -tol))


def exhaustive_separability(instance: SeparabilityInstance, tol: float = TOL_STRICT):
    """Decide separability by trying every pair of hyperplane dichotomies.

    Every valid pair of planes induces strict sign vectors on the points
    (zeros on ``S0`` can be nudged), so it suffices to find two dichotomies
    positive on all of ``S1`` whose negative parts jointly cover ``S0``.
    Returns a witness or ``None``.
    """
    X = instance.original_points
    S1, S0 = list(instance.S1), list(instance.S0)
    if not S0:
        one = AffineFunction.constant(instance.d, 1.0)
        return TwoPlaneWitness(one, one)
    cands = []
    for dch in enumerate_dichotomies(X, d=instance.d) if instance.d else []:
        s = np.asarray(dch.signs)
        if np.all(s[S1] > 0):
            cands.append((frozenset(i for i in S0 if s[i] < 0), dch))
    full = frozenset(S0)
    for a in range(len(cands)):
        na, da = cands[a]
        for b in range(a, len(cands)):
            nb, db = cands[b]
            if na | nb != full:
                continue
            w = _strict_pair(X, S1, S0, da, db, na, tol)
            if w is not None and check_separability(instance, w, tol):
                return w
    return None


def _strict_pair(X, S1, S0, da, db, na, tol):
    """Max-margin planes for the pair: S1 positive on both, S0 split between them."""
    first = [i for i in S0 if i in na]
    second = [i for i in S0 if i not in na]
    h1 = realize(X[S1 + first], [1] * len(S1) + [-1] * len(first), tol=tol) if first else None
    h2 = realize(X[S1 + second], [1] * len(S1) + [-1] * len(second), tol=tol) if second else None
    if first and h1 is None or second and h2 is None:
        return None
    one = AffineFunction.constant(X.shape[1], 1.0)
    return TwoPlaneWitness(h1 if h1 is not None else one, h2 if h2 is not None else one)


# ---------------------------------------------------------------- reduction

def build_gadget(instance: SeparabilityInstance) -> Dataset:
    """Embed the instance as ``(x, 0, 0)`` and append the twelve gadget points."""
    if not instance.is_normalized():
        raise ValueError("instance is not normalized: no S1 point at the origin")
    d = instance.d
    X = np.hstack([instance.points, np.zeros((instance.N, 2))])
    G = np.array([np.concatenate([np.zeros(d), p]) for p, _ in GADGET_POINTS])
    y = np.concatenate([instance.labels, [lab for _, lab in GADGET_POINTS]])
    return Dataset(np.vstack([X, G]), y)


def reduce_instance(instance: SeparabilityInstance) -> tuple[SeparabilityInstance, Dataset]:
    """Normalize the instance and build its training set."""
    norm = instance.normalized()
    return norm, build_gadget(norm)


def forward_construct(instance: SeparabilityInstance, witness: TwoPlaneWitness) -> TwoReluNet:
    """An interpolating network for ``build_gadget(instance.normalized())``.

    Each plane is moved into the normalized frame and scaled so its bias is
    1/2 (the origin is an ``S1`` point, so valid biases are positive).  With
    ``eps`` the smallest total violation over ``S0`` and
    ``eta = min(eps/2, 1/4)`` the network is
    ``(1/eta) [eta - [-h1(x) - y]_+ - [-h2(x) - z]_+]_+``.
    """
    if not check_separability(instance, witness):
        raise ValueError("witness does not separate the instance")
    norm = instance.normalized()
    d = norm.d
    planes = []
    for h in (witness.h1, witness.h2):
        f = norm.to_frame(h)
        if f.beta <= 0:
            raise ValueError("witness is not positive at the origin")
        planes.append(f.scaled(0.5 / f.beta))
    h1, h2 = planes
    S0 = list(norm.S0)
    if S0:
        P = norm.points[S0]
        eps = float(np.min(relu(-h1(P)) + relu(-h2(P))))
        if eps <= 0:
            raise ValueError("witness has no margin on S0")
        eta = min(eps / 2.0, 0.25)
    else:
        eta = 0.25
    a1 = AffineFunction(np.concatenate([-h1.alpha, [-1.0, 0.0]]), -h1.beta)
    a2 = AffineFunction(np.concatenate([-h2.alpha, [0.0, -1.0]]), -h2.beta)
    return TwoReluNet(a1, a2, eta, -1, -1, 1.0 / eta)


def check_hard_sort(points, pi1, witness: HardSortWitness, tol: float = TOL_STRICT) -> bool:
    """Equality within ``tol`` on ``pi1``, margin ``> tol`` on ``side`` elsewhere."""
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or X.shape[1] != witness.l1.d:
        raise ValueError("points and witness dimensions differ")
    mask = np.zeros(X.shape[0], dtype=bool)
    mask[list(pi1)] = True
    v = witness.values(X) - witness.c
    if np.any(np.abs(v[mask]) > tol):
        return False
    rest = v[~mask]
    if witness.side == "above":
        return bool(np.all(rest > tol))
    return bool(np.all(rest < -tol))


def net_from_hard_sort(witness: HardSortWitness, points, pi1, tol: float = TOL_STRICT) -> TwoReluNet:
    """Network with output 1 on ``pi1`` and 0 on the other points."""
    if not check_hard_sort(points, pi1, witness, tol):
        raise ValueError("witness does not hard-sort the points")
    X = np.asarray(points, dtype=float)
    mask = np.zeros(X.shape[0], dtype=bool)
    mask[list(pi1)] = True
    gap = witness.values(X[~mask]) - witness.c
    if witness.side == "below":
        gap = -gap
    eps = float(np.min(gap)) if gap.size else 1.0
    if witness.side == "above":
        # (2/eps)[c + eps/2 - w1[l1]_+ - w2[l2]_+]_+
        return TwoReluNet(witness.l1, witness.l2, witness.c + eps / 2, -witness.w1, -witness.w2, 2.0 / eps)
    return TwoReluNet(witness.l1, witness.l2, -witness.c + eps / 2, witness.w1, witness.w2, 2.0 / eps)


def hard_sort_from_net(net: TwoReluNet, dataset: Dataset, tol: float = 1e-9) -> HardSortWitness:
    """Read the hard-sorting of ``dataset`` (w.r.t. its label-1 points) off an interpolating net."""
    if not dataset.is_binary():
        raise ValueError("hard-sorting needs labels in {0, 1}")
    if max_error(net, dataset) > tol:
        raise ValueError("network does not interpolate the dataset")
    S1 = dataset.S1
    if S1.size == 0:
        raise ValueError("no label-1 points")
    s = net.hidden(dataset.X)
    c = float(np.mean(s[S1]))
    # output 1 needs theta * (w0 + c) = 1; output 0 needs w0 + s <= 0 < w0 + c
    side = "below" if net.theta > 0 else "above"
    return HardSortWitness(net.a1, net.a2, net.w1, net.w2, c, side)


def _truncate(a: AffineFunction, d: int, rel: float = 1e-12) -> AffineFunction:
    """``-a`` restricted to the first ``d`` coordinates, roundoff-level entries zeroed.

    A unit that only reads the gadget coordinates comes back from the
    solver with ~1e-16 entries elsewhere; rescaling those would turn noise
    into a plane, so entries below ``rel`` times the unit's size become 0.
    """
    scale = max(float(np.max(np.abs(a.alpha))), abs(a.beta))
    alpha = np.where(np.abs(a.alpha[:d]) <= rel * scale, 0.0, -a.alpha[:d])
    beta = 0.0 if abs(a.beta) <= rel * scale else -a.beta
    return AffineFunction(alpha, beta)


def extract_separability_witness(net: TwoReluNet, instance: SeparabilityInstance,
                                 tol: float = 1e-9) -> TwoPlaneWitness:
    """Two planes read off an interpolating network of the reduced instance.

    On an interpolating network both ``a1`` and ``a2`` are non-positive on
    ``S1`` and one of them is positive on each ``S0`` point; dropping the two
    gadget coordinates of ``-a1, -a2`` gives planes that are weakly positive
    on ``S1``.  Both biases are then raised by half the smallest ``S0``
    margin, which makes the ``S1`` side strict without losing ``S0``.
    ``tol`` bounds the squared loss accepted as zero.
    """
    norm = instance.normalized()
    ds = build_gadget(norm)
    if net.d != ds.d:
        raise ValueError(f"network on R^{net.d}, reduced instance in R^{ds.d}")
    loss = squared_loss(net, ds)
    if loss > tol:
        raise ValueError(f"network is not zero-loss on the reduced instance (loss {loss:.3g})")
    d = norm.d
    g = [_truncate(a, d) for a in (net.a1, net.a2)]
    g = [_unit_inf(f) for f in g]
    S0 = list(norm.S0)
    if S0:
        P = norm.points[S0]
        eps = float(np.min(np.maximum(-g[0](P), -g[1](P))))
    else:
        eps = 1.0
    shifted = [AffineFunction(f.alpha, f.beta + eps / 2) for f in g]
    return TwoPlaneWitness(norm.from_frame(shifted[0]), norm.from_frame(shifted[1]))


__all__ = [
    "GADGET_POINTS",
    "HardSortWitness",
    "SeparabilityInstance",
    "TOL_STRICT",
    "TwoPlaneWitness",
    "build_gadget",
    "check_hard_sort",
    "check_separability",
    "exhaustive_separability",
    "extract_separability_witness",
    "forward_construct",
    "gadget_dataset",
    "hard_sort_from_net",
    "net_from_hard_sort",
    "reduce_instance",
]
