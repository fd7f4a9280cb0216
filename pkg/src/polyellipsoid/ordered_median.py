"""Ordered-median polyellipsoids.

The weighted distances ``c_j = w_j ||a - u_j - x||`` are sorted in
non-increasing order and combined with weights ``lambda``.  The result is
convex in ``x`` exactly when ``lambda`` is non-increasing, which is the
only case accepted here.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .minimax import SolverConfig, solve_direct
from .model import SUPPORT_RTOL, Instance, Solution
from .norms import norm_eval, norm_subgradient

__all__ = ["OrderedSpec", "om_value", "om_values", "om_subgradient",
           "solve_om", "om_rearrangement_check"]


@dataclass(frozen=True, eq=False)
class OrderedSpec:
    """Non-negative, non-increasing weights for the sorted distances."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float).ravel()
        if lam.size == 0 or not np.isfinite(lam).all():
            raise ValueError("lambda must be a non-empty finite vector")
        if (lam < 0).any():
            raise ValueError("lambda must be non-negative")
        if (np.diff(lam) > 0).any():
            raise ValueError("lambda must be non-increasing; otherwise the "
                             "ordered objective is not convex")
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    @classmethod
    def sum(cls, k: int) -> "OrderedSpec":
        return cls(np.ones(k))

    @classmethod
    def center(cls, k: int) -> "OrderedSpec":
        return cls(np.eye(k)[0])


def _check(inst: Instance, spec: OrderedSpec):
    if spec.lam.size != inst.k:
        raise ValueError(f"lambda has {spec.lam.size} entries for {inst.k} foci")


def _weighted_distances(inst: Instance, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(inst.d)
    return norm_eval(inst.norm, inst.offsets() - x) * inst.foci_weights


def _order(c: np.ndarray) -> np.ndarray:
    # non-increasing, ties by focus index
    return np.argsort(-c, axis=-1, kind="stable")


def om_values(inst: Instance, spec: OrderedSpec, x) -> np.ndarray:
    """Ordered-median values for all demand points."""
    _check(inst, spec)
    c = _weighted_distances(inst, x)
    return -np.sort(-c, axis=-1) @ spec.lam


def om_value(inst: Instance, spec: OrderedSpec, x, a_index: int) -> float:
    if not -inst.n <= a_index < inst.n:
        raise IndexError(f"demand index {a_index} out of range")
    return float(om_values(inst, spec, x)[a_index])


def om_subgradient(inst: Instance, spec: OrderedSpec, x, a_index: int) -> np.ndarray:
    """Subgradient in ``x`` of the ordered-median value of one demand point."""
    _check(inst, spec)
    x = np.asarray(x, dtype=float).reshape(inst.d)
    v = inst.demand[a_index] - inst.foci - x
    c = norm_eval(inst.norm, v) * inst.foci_weights
    sigma = _order(c)
    coef = np.empty(inst.k)
    coef[sigma] = spec.lam * inst.foci_weights[sigma]
    return -(coef @ norm_subgradient(inst.norm, v))


def _support(inst, spec, x, r) -> tuple:
    vals = om_values(inst, spec, x)
    return tuple(int(i) for i in np.flatnonzero(vals >= r * (1 - SUPPORT_RTOL)))


def _max_and_subgradient(inst, spec, x):
    vals = om_values(inst, spec, x)
    i = int(np.argmax(vals))
    return float(vals[i]), om_subgradient(inst, spec, x, i)


def solve_om(inst: Instance, spec: OrderedSpec, cfg: SolverConfig | None = None,
             max_iter: int = 20_000) -> Solution:
    """Minimize ``max_a`` of the ordered-median values over translations.

    A central-cut ellipsoid method (bisection when ``d = 1``) with exact
    subgradients.  The start is the plain covering solution.  Since the
    objective dominates ``lambda_1 w_j ||a - u_j - x||`` for every focus
    ``j``, the optimum lies in a ball around ``a_1 - u_j`` whose radius
    follows from the starting value.  Each cut also certifies the lower
    bound ``f(c) - sqrt(g' P g)``; iterations stop once the best value is
    within ``tol_r`` (relative) of it.
    """
    cfg = cfg or SolverConfig()
    _check(inst, spec)
    tol = max(cfg.tol_r, 1e-12)
    x0 = solve_direct(inst, cfg).x
    f0, _ = _max_and_subgradient(inst, spec, x0)
    if spec.lam[0] == 0 or f0 == 0:
        return Solution(x0, f0, _support(inst, spec, x0, f0), 0, 1, True, 0.0)

    j = int(np.argmax(inst.foci_weights))
    c = inst.demand[0] - inst.foci[j]
    R = f0 / (spec.lam[0] * inst.foci_weights[j]) \
        * inst.norm.euclidean_radius(inst.d) * (1 + 1e-9)
    d = inst.d
    best_x, best_f = x0, f0
    lower = 0.0
    converged = False
    it = 0
    if d == 1:
        lo, hi = c[0] - R, c[0] + R
    else:
        P = np.eye(d) * R * R
    for it in range(1, max_iter + 1):
        center = np.array([(lo + hi) / 2]) if d == 1 else c
        f, g = _max_and_subgradient(inst, spec, center)
        if f < best_f:
            best_x, best_f = center.copy(), f
        if d == 1:
            half = (hi - lo) / 2
            lower = max(lower, f - abs(g[0]) * half)
        else:
            Pg = P @ g
            gPg = float(g @ Pg)
            lower = max(lower, f - math.sqrt(max(gPg, 0.0)))
        if best_f - lower <= tol * best_f:
            converged = True
            break
        if not np.any(g):
            lower = best_f = f
            best_x = center.copy()
            converged = True
            break
        if d == 1:
            if g[0] > 0:
                hi = center[0]
            else:
                lo = center[0]
            continue
        if gPg <= 0:
            break  # ellipsoid collapsed below floating point resolution
        step = Pg / math.sqrt(gPg)
        c = c - step / (d + 1)
        P = d * d / (d * d - 1.0) * (P - 2.0 / (d + 1) * np.outer(step, step))
        P = (P + P.T) / 2
    return Solution(best_x, best_f, _support(inst, spec, best_x, best_f), it, 1,
                    converged, best_f - lower)


@functools.lru_cache(maxsize=None)
def _permutations(k: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(k))), dtype=int)


def om_rearrangement_check(c, lam, rtol: float = 1e-12) -> bool:
    """Sorted pairing equals the best pairing over all permutations."""
    c = np.asarray(c, dtype=float).ravel()
    lam = np.asarray(lam, dtype=float).ravel()
    if c.shape != lam.shape:
        raise ValueError("c and lambda must have the same length")
    sorted_value = float(np.sort(c)[::-1] @ lam)
    best = float((c[_permutations(c.size)] @ lam).max())
    return abs(sorted_value - best) <= rtol * max(1.0, abs(best))
