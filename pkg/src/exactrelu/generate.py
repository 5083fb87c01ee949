"""Random instance factories.

Every generator takes an explicit ``numpy.random.Generator`` so that a single
seeded stream drives a whole experiment.
"""

from __future__ import annotations

import numpy as np

from .core import AffineFunction, Dataset, TwoReluNet
from .reduce import SeparabilityInstance, TwoPlaneWitness, check_separability, exhaustive_separability, gadget_dataset

KINDS = ("separable", "unseparable", "random-labels", "gadget-only", "planted-net")


def _check_size(N: int, d: int):
    if N < 1:
        raise ValueError(f"need at least one point, got N={N}")
    if d < 1:
        raise ValueError(f"need dimension at least 1, got d={d}")


def separable_instance(N: int, d: int, rng: np.random.Generator, margin: float = 0.05,
                       max_tries: int = 10_000):
    """Points labeled by two random planes, and the planted witness.

    A point is in ``S1`` iff it is on the positive side of both planes.  Draws
    with a point within ``margin`` of a plane, or with empty ``S1``, are
    discarded so the planted witness is strictly valid.
    """
    _check_size(N, d)
    for _ in range(max_tries):
        h = [AffineFunction(rng.standard_normal(d), 0.5 * rng.standard_normal() + 0.5) for _ in range(2)]
        X = rng.standard_normal((N, d))
        v = np.stack([h[0](X), h[1](X)], axis=1)
        if np.min(np.abs(v)) < margin:
            continue
        inside = np.all(v > 0, axis=1)
        if not inside.any():
            continue
        inst = SeparabilityInstance(X, np.flatnonzero(inside), np.flatnonzero(~inside))
        w = TwoPlaneWitness(*h)
        if check_separability(inst, w):
            return inst, w
    raise RuntimeError("could not draw a separable instance")


def unseparable_instance(N: int, d: int, rng: np.random.Generator, max_tries: int = 10_000):
    """Random 0/1-labeled points that no pair of planes separates (checked exhaustively)."""
    _check_size(N, d)
    for _ in range(max_tries):
        X = rng.standard_normal((N, d))
        lab = rng.random(N) < 0.5
        if lab.all() or not lab.any():
            continue
        inst = SeparabilityInstance(X, np.flatnonzero(lab), np.flatnonzero(~lab))
        if exhaustive_separability(inst) is None:
            return inst
    raise RuntimeError("could not draw an unseparable instance")


def random_labels(N: int, d: int, rng: np.random.Generator) -> Dataset:
    _check_size(N, d)
    return Dataset(rng.standard_normal((N, d)), (rng.random(N) < 0.5).astype(float))


def random_two_relu(d: int, rng: np.random.Generator) -> TwoReluNet:
    return TwoReluNet(
        AffineFunction(rng.standard_normal(d), rng.standard_normal()),
        AffineFunction(rng.standard_normal(d), rng.standard_normal()),
        rng.standard_normal(),
        int(rng.choice([-1, 1])),
        int(rng.choice([-1, 1])),
        2.0 * rng.standard_normal(),
    )


def planted_net(N: int, d: int, rng: np.random.Generator):
    """Points labeled by a random two-unit network, and that network."""
    _check_size(N, d)
    net = random_two_relu(d, rng)
    X = rng.standard_normal((N, d))
    return Dataset(X, np.asarray(net(X), dtype=float)), net


def gadget_only() -> Dataset:
    return gadget_dataset()


__all__ = [
    "KINDS",
    "gadget_only",
    "planted_net",
    "random_labels",
    "random_two_relu",
    "separable_instance",
    "unseparable_instance",
]
