"""Instance files (JSON, schema version 1) and random instance generation.

A file looks like::

    {"v": 1, "dim": 2, "norm": {"lp": 2},
     "foci": [[0, 0], [1, 0]], "foci_weights": [0.5, 0.5],
     "demand": [[0, 0], [2, 1]] | "points.csv",
     "lambda": [1, 0.5], "candidates": [[...], ...]}

``foci_weights``, ``lambda`` and ``candidates`` are optional; ``foci`` may
be omitted when ``candidates`` is given.  A string ``demand`` is a CSV path
(one point per row, relative to the JSON file).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import Instance
from .norms import NormSpec
from .ordered_median import OrderedSpec

__all__ = ["InstanceError", "InstanceFile", "parse_instance", "load_points",
           "instance_to_dict", "dump_instance", "generate_instance",
           "norm_from_label", "norm_label", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1


class InstanceError(ValueError):
    """Invalid instance data; the message names the offending field."""


@dataclass(frozen=True)
class InstanceFile:
    demand: np.ndarray
    norm: NormSpec
    instance: Instance | None = None
    ordered: OrderedSpec | None = None
    candidates: np.ndarray | None = None


def norm_from_label(label: str) -> NormSpec:
    """``"l2"``, ``"l3/2"``, ``"linf"``, ``"hex"`` or a bare exponent."""
    s = str(label).strip().lower()
    if s == "hex":
        return NormSpec.hex()
    if s.startswith("l"):
        s = s[1:]
    return NormSpec.lp(s)


def norm_label(norm: NormSpec) -> str:
    if norm.kind == "block":
        return "hex" if norm.to_dict() == NormSpec.hex().to_dict() else "block"
    if norm.p == math.inf:
        return "linf"
    return f"l{norm.p:g}"


def load_points(path, dim: int | None = None) -> np.ndarray:
    """Read points from a CSV file (no header, one point per row)."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    try:
        pts = np.array([[float(c) for c in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise InstanceError(f"demand: non-numeric entry in {path}") from exc
    if pts.ndim != 2 or len(pts) == 0:
        raise InstanceError(f"demand: {path} holds no rectangular point list")
    if dim is not None and pts.shape[1] != dim:
        raise InstanceError(f"demand: {path} has {pts.shape[1]} columns, dim={dim}")
    return pts


def _matrix(data, name: str, dim: int | None) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"{name}: expected a list of numeric points") from exc
    if arr.ndim == 1 and dim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise InstanceError(f"{name}: expected a non-empty list of points")
    if dim is not None and arr.shape[1] != dim:
        raise InstanceError(f"{name}: points have dimension {arr.shape[1]}, dim={dim}")
    if not np.isfinite(arr).all():
        raise InstanceError(f"{name}: NaN or infinite coordinates")
    return arr


def _vector(data, name: str) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float).ravel()
    except (TypeError, ValueError) as exc:
        raise InstanceError(f"{name}: expected a list of numbers") from exc
    if not np.isfinite(arr).all():
        raise InstanceError(f"{name}: NaN or infinite entries")
    return arr


def parse_dict(doc: dict, base: Path | None = None) -> InstanceFile:
    if not isinstance(doc, dict):
        raise InstanceError("instance file must hold a JSON object")
    if doc.get("v") != SCHEMA_VERSION:
        raise InstanceError(f"v: expected schema version {SCHEMA_VERSION}, "
                            f"got {doc.get('v')!r}")
    dim = doc.get("dim")
    if dim is not None and (not isinstance(dim, int) or dim < 1):
        raise InstanceError("dim: must be a positive integer")
    try:
        norm = NormSpec.from_dict(doc.get("norm", {"lp": 2}))
    except (ValueError, TypeError, NotImplementedError) as exc:
        raise InstanceError(f"norm: {exc}") from exc

    if "demand" not in doc:
        raise InstanceError("demand: missing")
    demand = doc["demand"]
    if isinstance(demand, str):
        path = Path(demand)
        if base is not None and not path.is_absolute():
            path = base / path
        if not path.exists():
            raise InstanceError(f"demand: CSV file {path} not found")
        A = load_points(path, dim)
        if not np.isfinite(A).all():
            raise InstanceError("demand: NaN or infinite coordinates")
    else:
        A = _matrix(demand, "demand", dim)
    dim = dim or A.shape[1]

    candidates = None
    if "candidates" in doc:
        candidates = _matrix(doc["candidates"], "candidates", dim)
    ordered = None
    if "lambda" in doc:
        try:
            ordered = OrderedSpec(_vector(doc["lambda"], "lambda"))
        except ValueError as exc:
            raise InstanceError(f"lambda: {exc}") from exc

    instance = None
    if "foci" in doc:
        U = _matrix(doc["foci"], "foci", dim)
        w = None
        if doc.get("foci_weights") is not None:
            w = _vector(doc["foci_weights"], "foci_weights")
        try:
            instance = Instance(A, U, w, norm)
        except ValueError as exc:
            field = "foci_weights" if "weight" in str(exc) else "norm" \
                if "norm" in str(exc) else "foci"
            raise InstanceError(f"{field}: {exc}") from exc
        if ordered is not None and ordered.lam.size != instance.k:
            raise InstanceError(f"lambda: {ordered.lam.size} entries for "
                                f"{instance.k} foci")
    elif candidates is None:
        raise InstanceError("foci: missing (required unless candidates are given)")
    return InstanceFile(A, norm, instance, ordered, candidates)


def parse_instance(path) -> InstanceFile:
    """Read and validate an instance file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from exc
    return parse_dict(doc, path.parent)


def instance_to_dict(inst: Instance, ordered: OrderedSpec | None = None,
                     candidates=None) -> dict:
    doc = {"v": SCHEMA_VERSION, "dim": inst.d, "norm": inst.norm.to_dict(),
           "foci": inst.foci.tolist(),
           "foci_weights": inst.foci_weights.tolist(),
           "demand": inst.demand.tolist()}
    if ordered is not None:
        doc["lambda"] = ordered.lam.tolist()
    if candidates is not None:
        doc["candidates"] = np.asarray(candidates, dtype=float).tolist()
    return doc


def dump_instance(inst: Instance, path=None, ordered=None, candidates=None) -> str:
    """Serialize to JSON text; also written to ``path`` when given."""
    text = json.dumps(instance_to_dict(inst, ordered, candidates), indent=1) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def generate_instance(n: int, k: int, d: int = 2, norm: NormSpec | str = "l2",
                      seed: int = 0, weighted: bool = False,
                      foci_from_demand: bool = True) -> Instance:
    """Random instance: demand uniform on ``[0, 100]^d``.

    Foci are ``k`` distinct demand points (or fresh uniform points when
    ``foci_from_demand`` is false).  Weights are uniform random and
    normalized in weighted mode, ``1/k`` otherwise.
    """
    if isinstance(norm, str):
        norm = norm_from_label(norm)
    if n < 1 or k < 1 or d < 1:
        raise ValueError("n, k and d must be positive")
    if foci_from_demand and k > n:
        raise ValueError(f"cannot draw {k} foci from {n} demand points")
    rng = np.random.default_rng(seed)
    A = rng.random((n, d)) * 100
    if foci_from_demand:
        U = A[rng.choice(n, size=k, replace=False)]
    else:
        U = rng.random((k, d)) * 100
    if weighted:
        w = rng.random(k) + 1e-3
        w = w / w.sum()
    else:
        w = np.full(k, 1.0 / k)
    return Instance(A, U, w, norm)
