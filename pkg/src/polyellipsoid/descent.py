"""Descent with smoothing continuation.

A smoothed objective ``f(x, mu) -> (value, grad)`` is minimized for a
decreasing sequence of smoothing levels ``mu`` (halved at every stage).
Within a stage, quasi-Newton (BFGS) directions are combined with an Armijo
backtracking line search, so the smoothed value never increases inside a
stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

ARMIJO_C = 1e-4
SHRINK = 0.5
MAX_BACKTRACK = 60
_EPS = 4 * np.finfo(float).eps


@dataclass
class ContinuationResult:
    x: np.ndarray
    value: float
    mu: float
    iterations: int
    stages: int
    converged: bool
    # smoothed values per stage, recorded only when requested
    trace: list = field(default_factory=list)


def _stage(fg, x, mu, H, max_iter, stage_tol, radius, record):
    """Minimize ``fg(., mu)`` from ``x``; returns (x, f, H, iters, ok).

    By convexity ``f(x) - min f <= |g| * radius`` when the minimizer lies
    within ``radius`` of ``x``; the stage ends once that bound is below
    ``stage_tol``.
    """
    f, g = fg(x, mu)
    if record is not None:
        record.append(f)
    d = x.size
    for it in range(1, max_iter + 1):
        p = -H @ g
        slope = g @ p
        if slope >= 0:
            # lost positive definiteness, restart from a scaled identity
            H = np.eye(d) * mu
            p = -H @ g
            slope = g @ p
        if np.linalg.norm(g) * radius <= stage_tol:
            return x, f, H, it - 1, True
        if -slope <= _EPS * abs(f):
            return x, f, H, it - 1, True  # below floating point resolution
        t = 1.0
        for _ in range(MAX_BACKTRACK):
            x_new = x + t * p
            f_new, g_new = fg(x_new, mu)
            if f_new < f and f_new <= f + ARMIJO_C * t * slope:
                break
            t *= SHRINK
        else:
            return x, f, H, it, True  # no representable decrease left
        s = x_new - x
        y = g_new - g
        sy = s @ y
        if sy > 1e-300 and sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            if it == 1:
                H = np.eye(d) * (sy / (y @ y))
            rho = 1.0 / sy
            Hy = H @ y
            H = (H - rho * (np.outer(s, Hy) + np.outer(Hy, s))
                 + (rho * rho * (y @ Hy) + rho) * np.outer(s, s))
        x, f, g = x_new, f_new, g_new
        if record is not None:
            record.append(f)
    return x, f, H, max_iter, False


def minimize_continuation(
    fg: Callable[[np.ndarray, float], tuple[float, np.ndarray]],
    x0,
    mu0: float,
    stop: Callable[[float, float], bool],
    radius: float,
    max_iter: int = 10_000,
    rel_stage_tol: float = 1e-2,
    max_stages: int = 200,
    record: bool = False,
) -> ContinuationResult:
    """Run the continuation loop until ``stop(mu, value)`` returns true.

    ``radius`` bounds the distance from any iterate to a minimizer (the data
    diameter will do).  ``rel_stage_tol`` bounds the per-stage optimization
    error relative to ``mu``.
    """
    x = np.array(x0, dtype=float)
    mu = float(mu0)
    H = np.eye(x.size) * mu
    total = 0
    ok = True
    trace = []
    stages = 0
    f = np.inf
    while True:
        stage_rec = [] if record else None
        x, f, H, its, conv = _stage(fg, x, mu, H, max_iter,
                                    rel_stage_tol * mu, radius, stage_rec)
        stages += 1
        total += its
        ok = ok and conv
        if record:
            trace.append(stage_rec)
        if stop(mu, f) or stages >= max_stages:
            break
        mu *= 0.5
        # curvature near kinks scales like 1/mu
        H = H * 0.5
    return ContinuationResult(x, float(f), mu, total, stages, ok, trace)
