"""Active-set decomposition for the covering problem.

A small set ``S`` of demand points is solved exactly; if the farthest point
``a`` at the resulting translation is not covered, it enters ``S``.  In
*strict* mode (strictly convex norms) ``S`` keeps exactly ``d + 1`` points
and one point leaves.  In *growing* mode a point leaves only when that
strictly raises the subproblem radius, otherwise ``S`` grows by ``a``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .minimax import SolverConfig, solve_direct
from .model import Instance, Solution, phi_all, support_set

__all__ = ["TraceRecord", "DecompTrace", "solve_subset", "solve_decomposition",
           "initial_active_set"]

# relative margin for "strictly larger" radius comparisons
_STRICT = 1e-9


@dataclass(frozen=True)
class TraceRecord:
    it: int
    size: int
    r: float
    rho: float
    enter: int | None
    leave: int | None
    active: tuple


@dataclass
class DecompTrace:
    mode: str
    records: list = field(default_factory=list)

    @property
    def active_set(self) -> tuple:
        """Active set of the last iteration."""
        return self.records[-1].active if self.records else ()

    @property
    def max_size(self) -> int:
        return max((rec.size for rec in self.records), default=0)

    def radii(self) -> list:
        return [rec.r for rec in self.records]

    def to_csv(self) -> str:
        """CSV text with columns ``it,size,r,rho,enter,leave``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["it", "size", "r", "rho", "enter", "leave"])
        for rec in self.records:
            w.writerow([rec.it, rec.size, repr(rec.r), repr(rec.rho),
                        "" if rec.enter is None else rec.enter,
                        "" if rec.leave is None else rec.leave])
        return buf.getvalue()


def solve_subset(inst: Instance, S, cfg: SolverConfig | None = None,
                 x0=None) -> Solution:
    """Solve the covering problem for the demand points ``S`` only.

    The returned support holds indices of the full instance.
    """
    S = tuple(int(i) for i in S)
    if not S:
        raise ValueError("subset must be nonempty")
    sol = solve_direct(inst.subset(S), cfg, x0=x0)
    return replace(sol, support=tuple(sorted(S[j] for j in sol.support)))


def _unique_indices(A: np.ndarray) -> np.ndarray:
    _, first = np.unique(A, axis=0, return_index=True)
    return np.sort(first)


def initial_active_set(inst: Instance, candidates=None) -> tuple:
    """Spread-out starting set of ``d + 1`` demand points.

    The extremes along the first coordinate, the point with the largest
    coverage value at their midpoint, then farthest-point insertion at the
    centroid of the chosen points.
    """
    idx = np.arange(inst.n) if candidates is None else np.asarray(candidates)
    target = min(inst.d + 1, len(idx))
    A = inst.demand
    ubar = inst.foci_mean
    first = A[idx, 0]
    S = [int(idx[np.argmin(first)])]
    hi = int(idx[np.argmax(first)])
    if hi not in S:
        S.append(hi)
    while len(S) < target:
        x = A[S].mean(axis=0) - ubar
        vals = phi_all(inst, x)[idx]
        vals[np.isin(idx, S)] = -np.inf
        S.append(int(idx[np.argmax(vals)]))
    return tuple(sorted(S[:target]))


def solve_decomposition(inst: Instance, cfg: SolverConfig | None = None,
                        mode: str | None = None, S0=None, subsolver=None):
    """Solve the covering problem by active-set decomposition.

    Parameters
    ----------
    inst : Instance
    cfg : SolverConfig, optional
        ``tol_r`` is the stopping tolerance ``rho <= r (1 + tol_r)``;
        ``max_outer`` caps the number of iterations.
    mode : {"strict", "growing"}, optional
        Defaults to strict for strictly convex norms and growing otherwise.
    S0 : sequence of int, optional
        Starting active set (indices into the demand points).
    subsolver : callable, optional
        ``subsolver(inst, S, cfg, x0) -> Solution`` for the restricted
        problems; defaults to :func:`solve_subset`.  Useful to pick a
        particular optimum when the restricted optimum is not unique.

    Returns
    -------
    Solution, DecompTrace
        ``Solution.r`` is the largest coverage value over all demand points
        at the returned translation, so it is always a feasible radius.
        ``Solution.iterations`` counts the initial solve plus one per
        farthest-point check; when ``S0`` already holds every distinct
        demand point no check is needed and the count is 1.
    """
    cfg = cfg or SolverConfig()
    if mode is None:
        mode = "strict" if inst.norm.strictly_convex else "growing"
    if mode not in ("strict", "growing"):
        raise ValueError(f"unknown mode {mode!r}")
    sub_cfg = replace(cfg, tol_r=min(cfg.tol_r, 1e-9) / 10)
    keep = _unique_indices(inst.demand)
    S = tuple(sorted(int(i) for i in S0)) if S0 is not None \
        else initial_active_set(inst, keep)

    subsolver = subsolver or solve_subset
    cache = {}

    def solve(T, x0=None):
        if T not in cache:
            cache[T] = subsolver(inst, T, sub_cfg, x0)
        return cache[T]

    trace = DecompTrace(mode)
    seen = set()
    converged = False
    it = 0
    sol = solve(S)
    if set(keep) <= set(S):
        r_full = float(phi_all(inst, sol.x).max())
        trace.records.append(TraceRecord(1, len(S), sol.r, r_full, None, None, S))
        out = Solution(sol.x, r_full, support_set(inst, sol.x, r_full), 1, 1,
                       True, r_full - sol.r)
        return out, trace
    while it < cfg.max_outer:
        it += 1
        seen.add(S)
        vals = phi_all(inst, sol.x)
        masked = np.full(inst.n, -np.inf)
        masked[keep] = vals[keep]
        a = int(np.argmax(masked))
        rho = float(masked[a])
        r = sol.r
        if rho <= r * (1 + cfg.tol_r) or a in S:
            trace.records.append(TraceRecord(it, len(S), r, rho, None, None, S))
            # a farthest point already in S only signals subsolver inaccuracy
            converged = rho <= r * (1 + max(cfg.tol_r, 1e-6))
            break

        best, best_T, leave = None, None, None
        for b in S:
            T = tuple(sorted(set(S) - {b} | {a}))
            cand = solve(T, sol.x)
            if best is None or cand.r > best.r:
                best, best_T, leave = cand, T, b
        grow = tuple(sorted(S + (a,)))
        if mode == "strict" and len(S) == inst.d + 1 and best_T not in seen:
            nxt = best_T
        elif best.r > r * (1 + _STRICT):
            nxt = best_T
        else:
            nxt, leave = grow, None
        trace.records.append(TraceRecord(it, len(S), r, rho, a, leave, S))
        S = nxt
        sol = best if nxt == best_T else solve(grow, sol.x)

    vals = phi_all(inst, sol.x)
    r_full = float(vals.max())
    out = Solution(sol.x, r_full, support_set(inst, sol.x, r_full), it + 1,
                   len(cache), converged, r_full - sol.r)
    return out, trace
