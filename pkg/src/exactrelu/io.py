"""File formats: datasets as CSV, networks, instances and witnesses as JSON.

Every real is written with 17 significant digits, so reading a file back
reproduces the float64 values bit for bit.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .core import AffineFunction, Dataset, KReluNet, TwoReluNet
from .reduce import HardSortWitness, SeparabilityInstance, TwoPlaneWitness


def fmt_real(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


# ---------------------------------------------------------------- CSV

def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_dataset_csv(path, header: bool | None = None) -> Dataset:
    """Rows ``x_1, ..., x_d, y``.  ``header=None`` detects a non-numeric first row."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if header is None:
        header = bool(rows) and not all(_is_number(c) for c in rows[0])
    if header:
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"{path}: rows have differing lengths {sorted(widths)}")
    data = np.array([[float(c) for c in r] for r in rows], dtype=float)
    return Dataset(data[:, :-1], data[:, -1])


def write_dataset_csv(path, dataset: Dataset, header: bool = True) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow([f"x_{k + 1}" for k in range(dataset.d)] + ["y"])
        for x, y in zip(dataset.X, dataset.y):
            w.writerow([fmt_real(v) for v in x] + [fmt_real(y)])


# ---------------------------------------------------------------- JSON

def _emit(obj) -> str:
    """JSON text with reals at 17 significant digits (``json`` uses shortest repr)."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_real(obj)
    if isinstance(obj, np.ndarray):
        return _emit(obj.tolist())
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_emit(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_emit(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return _emit(obj) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path):
    return json.loads(Path(path).read_text())


def affine_to_dict(f: AffineFunction) -> dict:
    return {"alpha": [float(a) for a in f.alpha], "beta": float(f.beta)}


def affine_from_dict(obj) -> AffineFunction:
    return AffineFunction(np.array(obj["alpha"], dtype=float), float(obj["beta"]))


def net_to_dict(net) -> dict:
    if isinstance(net, TwoReluNet):
        return {
            "type": "two-relu",
            "a1": affine_to_dict(net.a1),
            "a2": affine_to_dict(net.a2),
            "w0": net.w0,
            "w1": net.w1,
            "w2": net.w2,
            "theta": net.theta,
        }
    if isinstance(net, KReluNet):
        return {
            "type": "k-relu",
            "dim": net.d,
            "nodes": [{"a": affine_to_dict(a), "w": w} for a, w in net.nodes],
            "w0": net.w0,
            "theta": net.theta,
        }
    raise TypeError(f"not a network: {type(net).__name__}")


def net_from_dict(obj):
    kind = obj.get("type", "two-relu" if "a1" in obj else "k-relu")
    if kind == "two-relu":
        return TwoReluNet(
            affine_from_dict(obj["a1"]), affine_from_dict(obj["a2"]),
            float(obj["w0"]), int(obj["w1"]), int(obj["w2"]), float(obj["theta"]),
        )
    if kind == "k-relu":
        nodes = tuple((affine_from_dict(n["a"]), int(n["w"])) for n in obj["nodes"])
        return KReluNet(nodes, float(obj["w0"]), float(obj["theta"]), dim=int(obj["dim"]))
    raise ValueError(f"unknown network type {kind!r}")


def instance_to_dict(inst: SeparabilityInstance) -> dict:
    return {
        "points": inst.original_points.tolist(),
        "S1": list(inst.S1),
        "S0": list(inst.S0),
    }


def instance_from_dict(obj) -> SeparabilityInstance:
    pts = np.array(obj["points"], dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(len(pts), -1)
    return SeparabilityInstance(pts, tuple(obj["S1"]), tuple(obj.get("S0", ())))


def witness_to_dict(w) -> dict:
    if isinstance(w, TwoPlaneWitness):
        return {"type": "two-plane", "h1": affine_to_dict(w.h1), "h2": affine_to_dict(w.h2)}
    if isinstance(w, HardSortWitness):
        return {
            "type": "hard-sort",
            "l1": affine_to_dict(w.l1),
            "l2": affine_to_dict(w.l2),
            "w1": w.w1,
            "w2": w.w2,
            "c": w.c,
            "side": w.side,
        }
    raise TypeError(f"not a witness: {type(w).__name__}")


def witness_from_dict(obj):
    kind = obj.get("type", "hard-sort" if "l1" in obj else "two-plane")
    if kind == "two-plane":
        return TwoPlaneWitness(affine_from_dict(obj["h1"]), affine_from_dict(obj["h2"]))
    if kind == "hard-sort":
        return HardSortWitness(
            affine_from_dict(obj["l1"]), affine_from_dict(obj["l2"]),
            int(obj["w1"]), int(obj["w2"]), float(obj["c"]), str(obj["side"]),
        )
    raise ValueError(f"unknown witness type {kind!r}")


def file_digest(path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


__all__ = [
    "dumps",
    "file_digest",
    "fmt_real",
    "instance_from_dict",
    "instance_to_dict",
    "net_from_dict",
    "net_to_dict",
    "read_dataset_csv",
    "read_json",
    "witness_from_dict",
    "witness_to_dict",
    "write_dataset_csv",
    "write_json",
]
