"""Weighted Weber (minisum) problem under an arbitrary NormSpec."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .descent import minimize_continuation
from .norms import NormSpec, norm_eval, smoothed_eval, smoothing_constant

__all__ = ["WeberResult", "weber_solve", "weber_value"]


@dataclass(frozen=True)
class WeberResult:
    x: np.ndarray
    value: float
    converged: bool = True
    iterations: int = 0


def weber_value(points, weights, norm: NormSpec, x) -> float:
    """``sum_i w_i ||x - p_i||``."""
    return float(norm_eval(norm, np.asarray(x) - points) @ weights)


def weber_solve(points, weights, norm: NormSpec, tol: float = 1e-9,
                x0=None, mu0: float | None = None,
                max_iter: int = 10_000) -> WeberResult:
    """Minimize ``sum_i w_i ||x - p_i||`` to absolute accuracy ``tol``.

    The smoothed objective is minimized with smoothing continuation starting
    at ``mu0`` (default: a tenth of the data diameter) and stopping once the
    smoothing bias is below ``tol / 10``.  Starts from the weighted centroid
    unless ``x0`` is given.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    w = np.asarray(weights, dtype=float).ravel()
    if len(w) != len(P):
        raise ValueError("one weight per point is required")
    if (w < 0).any() or not w.sum() > 0:
        raise ValueError("weights must be nonnegative and not all zero")
    if not tol > 0:
        raise ValueError("tol must be positive")
    keep = w > 0
    P, w = P[keep], w[keep]
    W = w.sum()
    if x0 is None:
        x0 = w @ P / W
    x0 = np.asarray(x0, dtype=float)

    span = P.max(axis=0) - P.min(axis=0)
    diam = float(np.linalg.norm(span))
    if len(P) == 1 or diam == 0:
        return WeberResult(P[0].copy(), 0.0, True, 0)

    c = smoothing_constant(norm, P.shape[1]) * W
    mu_min = tol / (10 * c)
    if mu0 is None:
        mu0 = 0.1 * diam
    mu0 = max(mu0, mu_min)

    def fg(x, mu):
        val, grad = smoothed_eval(norm, x - P, mu)
        return val @ w, w @ grad

    res = minimize_continuation(fg, x0, mu0, lambda mu, f: mu <= mu_min, diam,
                                max_iter=max_iter)
    # the candidate set includes the start so warm starts never lose ground
    best = min((res.x, x0), key=lambda z: weber_value(P, w, norm, z))
    return WeberResult(best, weber_value(P, w, norm, best), res.converged,
                       res.iterations)
