"""Instances, solutions and the coverage function of the covering problem.

A demand point ``a`` is covered by the foci ``U`` translated by ``x`` at
radius ``r`` when ``phi(x; a) = sum_u w_u ||a - u - x|| <= r``.  Indices are
0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .norms import NormSpec, norm_eval

__all__ = [
    "Instance",
    "Solution",
    "DualCertificate",
    "phi",
    "phi_all",
    "objective",
    "support_set",
    "translate_invariance_check",
    "SUPPORT_RTOL",
]

SUPPORT_RTOL = 1e-6
_WEIGHT_RTOL = 1e-6


def _as_points(a, name: str) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} must be a non-empty (rows, d) array")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains NaN or infinite coordinates")
    return arr


@dataclass(frozen=True, eq=False)
class Instance:
    """Demand points, foci with weights, and the norm.

    Foci weights are normalized to sum to one; weights whose sum is off by
    more than 1e-6 are rejected.
    """

    demand: np.ndarray
    foci: np.ndarray
    foci_weights: np.ndarray | None = None
    norm: NormSpec = field(default_factory=NormSpec.lp)

    def __post_init__(self):
        A = _as_points(self.demand, "demand")
        U = _as_points(self.foci, "foci")
        if A.shape[1] != U.shape[1]:
            raise ValueError(
                f"demand is {A.shape[1]}-dimensional but foci are "
                f"{U.shape[1]}-dimensional")
        k = U.shape[0]
        if self.foci_weights is None:
            w = np.full(k, 1.0 / k)
        else:
            w = np.array(self.foci_weights, dtype=float).ravel()
            if w.shape != (k,):
                raise ValueError(f"expected {k} foci weights, got {w.size}")
            if not np.isfinite(w).all() or (w <= 0).any():
                raise ValueError("foci weights must be finite and positive")
            s = w.sum()
            if abs(s - 1) > _WEIGHT_RTOL:
                raise ValueError(f"foci weights sum to {s:g}, not 1")
            if abs(s - 1) > 1e-12:
                w = w / s
        if self.norm.dim is not None and self.norm.dim != A.shape[1]:
            raise ValueError("norm dimension does not match the points")
        for arr in (A, U, w):
            arr.setflags(write=False)
        object.__setattr__(self, "demand", A)
        object.__setattr__(self, "foci", U)
        object.__setattr__(self, "foci_weights", w)

    @property
    def n(self) -> int:
        return self.demand.shape[0]

    @property
    def k(self) -> int:
        return self.foci.shape[0]

    @property
    def d(self) -> int:
        return self.demand.shape[1]

    @property
    def foci_mean(self) -> np.ndarray:
        """Weighted centroid of the foci."""
        return self.foci_weights @ self.foci

    def subset(self, indices) -> "Instance":
        """Instance restricted to the demand points ``indices``."""
        return Instance(self.demand[np.asarray(indices, dtype=int)],
                        self.foci, self.foci_weights, self.norm)

    def replace(self, **changes) -> "Instance":
        data = dict(demand=self.demand, foci=self.foci,
                    foci_weights=self.foci_weights, norm=self.norm)
        data.update(changes)
        return Instance(**data)

    def offsets(self) -> np.ndarray:
        """Array ``a - u`` of shape (n, k, d)."""
        return self.demand[:, None, :] - self.foci[None, :, :]


@dataclass(frozen=True)
class Solution:
    x: np.ndarray
    r: float
    support: tuple = ()
    iterations: int = 0
    inner_solves: int = 0
    converged: bool = True
    residual: float = 0.0


@dataclass(frozen=True)
class DualCertificate:
    """Multipliers on the demand simplex and a lower bound on the radius."""

    alpha: np.ndarray
    dual_value: float
    history: tuple = ()


def _check_x(inst: Instance, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (inst.d,):
        raise ValueError(f"translation must have dimension {inst.d}")
    return x


def phi_all(inst: Instance, x) -> np.ndarray:
    """Coverage values ``phi(x; a)`` for every demand point."""
    x = _check_x(inst, x)
    return norm_eval(inst.norm, inst.offsets() - x) @ inst.foci_weights


def phi(inst: Instance, x, a_index: int) -> float:
    """Weighted sum of distances from demand point ``a_index`` to ``U + x``."""
    if not -inst.n <= a_index < inst.n:
        raise IndexError(f"demand index {a_index} out of range")
    x = _check_x(inst, x)
    v = inst.demand[a_index] - inst.foci - x
    return float(norm_eval(inst.norm, v) @ inst.foci_weights)


def objective(inst: Instance, x) -> tuple[float, int]:
    """Largest coverage value at ``x`` and the lowest index attaining it."""
    vals = phi_all(inst, x)
    i = int(np.argmax(vals))
    return float(vals[i]), i


def support_set(inst: Instance, x, r: float | None = None,
                rtol: float = SUPPORT_RTOL) -> tuple:
    """Indices of demand points with ``phi(x; a) >= r (1 - rtol)``."""
    vals = phi_all(inst, x)
    if r is None:
        r = vals.max()
    return tuple(int(i) for i in np.flatnonzero(vals >= r * (1 - rtol)))


def translate_invariance_check(inst: Instance, shift, solver=None,
                               rtol: float = 1e-6) -> bool:
    """Check that shifting the foci by ``shift`` shifts the optimum by -shift.

    The radius must agree within ``rtol``; the translation is compared only
    for strictly convex norms, where the optimum is unique.
    """
    if solver is None:
        from .minimax import SolverConfig, solve_direct

        def solver(i):
            return solve_direct(i, SolverConfig(tol_r=1e-9))

    shift = np.asarray(shift, dtype=float)
    base = solver(inst)
    moved = solver(inst.replace(foci=inst.foci + shift))
    if abs(base.r - moved.r) > rtol * max(1.0, base.r):
        return False
    if inst.norm.strictly_convex:
        scale = max(1.0, float(np.abs(inst.demand).max()))
        return bool(np.allclose(moved.x, base.x - shift, rtol=0,
                                atol=1e-4 * scale))
    return True
