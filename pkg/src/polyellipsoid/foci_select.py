"""Choosing ``k`` foci from a candidate set.

The radius of a fixed foci set is obtained with the decomposition solver.
Selection alternates between a restricted problem (best ``k``-subset of the
candidates for a small active set of demand points), which yields a lower
bound, and a full solve for the chosen foci, which yields an upper bound.

Foci weights ``omega`` are positional: ``omega[i]`` is the weight of the
i-th selected candidate in increasing candidate-index order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .decomp import initial_active_set, solve_decomposition
from .minimax import SolverConfig, solve_direct
from .model import Instance, Solution
from .norms import NormSpec
from .weber import weber_solve

__all__ = ["SelectionState", "solve_restricted", "solve_foci_selection",
           "select_foci_brute_force", "InfeasibleSelection"]

_BOUND_RTOL = 1e-6


class InfeasibleSelection(ValueError):
    """Fewer than ``k`` admissible candidates remain."""


@dataclass
class SelectionState:
    """Bookkeeping of the selection loop.

    ``R`` holds excluded candidate indices (``exclusion="foci"``) or
    excluded k-subsets (``exclusion="sets"``).
    """

    R: set = field(default_factory=set)
    UB: float = math.inf
    LB: float = 0.0
    best_foci: tuple = ()
    it: int = 0
    history: list = field(default_factory=list)


def _weights(omega, k):
    if omega is None:
        return np.full(k, 1.0 / k)
    w = np.asarray(omega, dtype=float).ravel()
    if w.shape != (k,):
        raise ValueError(f"expected {k} foci weights, got {w.size}")
    return w


class _Evaluator:
    """Caches Weber lower bounds and restricted radii per foci subset."""

    def __init__(self, A, B, k, norm, omega, cfg):
        self.A = np.asarray(A, dtype=float)
        if self.A.ndim == 1:
            self.A = self.A[:, None]
        self.B = np.asarray(B, dtype=float)
        if self.B.ndim == 1:
            self.B = self.B[:, None]
        self.k = k
        self.norm = norm
        self.omega = _weights(omega, k)
        self.cfg = cfg
        self._lb = {}
        self._sub = {}
        self.solves = 0

    def instance(self, U, S=None) -> Instance:
        A = self.A if S is None else self.A[list(S)]
        return Instance(A, self.B[list(U)], self.omega, self.norm)

    def weber_bound(self, U) -> float:
        """``min_x sum_u w_u ||a - u - x||`` does not depend on ``a``, and
        bounds every covering radius with these foci from below."""
        if U not in self._lb:
            tol = 1e-9 * max(1.0, float(np.abs(self.B).max()))
            res = weber_solve(self.B[list(U)], self.omega, self.norm, tol=tol)
            self._lb[U] = res.value - tol
        return self._lb[U]

    def restricted_radius(self, S, U) -> float:
        key = (S, U)
        if key not in self._sub:
            self.solves += 1
            self._sub[key] = solve_direct(self.instance(U, S), self.cfg).r
        return self._sub[key]


def _best_subset(ev: _Evaluator, S: tuple, admissible):
    """Exact best-first search over ``admissible`` k-subsets for ``S``."""
    subsets = list(admissible)
    if not subsets:
        raise InfeasibleSelection("no admissible foci subset remains")
    order = sorted(subsets, key=lambda U: (ev.weber_bound(U), U))
    best_U, best_r = None, math.inf
    for U in order:
        tie = 1e-9 * max(1.0, best_r) if best_r < math.inf else 0.0
        if ev.weber_bound(U) > best_r + tie:
            break
        r = ev.restricted_radius(S, U)
        if r < best_r - tie or (abs(r - best_r) <= tie and U < best_U):
            best_U, best_r = U, r
    return best_U, best_r


def solve_restricted(A_subset, B, R, k: int, norm: NormSpec | None = None,
                     omega=None, cfg: SolverConfig | None = None):
    """Best ``k`` candidates (avoiding the indices in ``R``) for ``A_subset``.

    Subsets are visited in increasing order of the Weber lower bound and the
    search stops once that bound exceeds the incumbent radius.  Ties go to
    the lexicographically smallest index tuple.

    Returns
    -------
    foci : tuple of int
        Candidate indices, increasing.
    r : float
    """
    norm = norm or NormSpec.lp(2)
    cfg = cfg or SolverConfig(tol_r=1e-9)
    ev = _Evaluator(A_subset, B, k, norm, omega, cfg)
    avail = [j for j in range(len(ev.B)) if j not in set(R)]
    if len(avail) < k:
        raise InfeasibleSelection(
            f"only {len(avail)} admissible candidates for k={k}")
    S = tuple(range(len(ev.A)))
    return _best_subset(ev, S, itertools.combinations(avail, k))


def solve_foci_selection(A, B, k: int, norm: NormSpec | None = None,
                         omega=None, cfg: SolverConfig | None = None,
                         exclusion: str = "sets"):
    """Select ``k`` foci from ``B`` minimizing the covering radius of ``A``.

    Parameters
    ----------
    exclusion : {"sets", "foci"}
        After a foci set has been fully solved it is excluded from later
        restricted problems.  ``"sets"`` excludes exactly that k-subset,
        which keeps the search exact; ``"foci"`` excludes every candidate
        it contains, a faster heuristic that may stop with a suboptimal set.

    Returns
    -------
    foci : tuple of int
    solution : Solution
        Covering of ``A`` by the selected foci.
    state : SelectionState
        ``LB`` is reported as ``min(LB, UB)``; ``it`` counts full covering
        solves.  The loop stops as soon as a restricted bound reaches the
        incumbent, before solving another full covering.
    """
    if exclusion not in ("sets", "foci"):
        raise ValueError(f"unknown exclusion rule {exclusion!r}")
    norm = norm or NormSpec.lp(2)
    cfg = cfg or SolverConfig(tol_r=1e-9)
    sub_cfg = replace(cfg, tol_r=min(cfg.tol_r, 1e-9))
    ev = _Evaluator(A, B, k, norm, omega, sub_cfg)
    m = len(ev.B)
    if not 1 <= k <= m:
        raise InfeasibleSelection(f"cannot choose {k} foci from {m} candidates")

    state = SelectionState()
    start = ev.instance(tuple(range(k)))
    S = initial_active_set(start)
    best_sol = None

    def admissible():
        for U in itertools.combinations(range(m), k):
            if exclusion == "sets" and U in state.R:
                continue
            if exclusion == "foci" and state.R.intersection(U):
                continue
            yield U

    while state.UB > state.LB * (1 + _BOUND_RTOL):
        try:
            U, r_SR = _best_subset(ev, S, admissible())
        except InfeasibleSelection:
            break
        state.LB = max(state.LB, r_SR)
        if state.UB <= state.LB * (1 + _BOUND_RTOL):
            break  # no admissible set can beat the incumbent
        sol, trace = solve_decomposition(ev.instance(U), cfg)
        if sol.r < state.UB:
            state.UB, state.best_foci, best_sol = sol.r, U, sol
        S = tuple(sorted(trace.active_set))
        if exclusion == "sets":
            state.R.add(U)
        else:
            state.R.update(U)
        state.it += 1
        state.history.append((state.it, min(state.LB, state.UB), state.UB, U))

    state.LB = min(state.LB, state.UB)
    return state.best_foci, best_sol, state


def select_foci_brute_force(A, B, k: int, norm: NormSpec | None = None,
                            omega=None, cfg: SolverConfig | None = None):
    """Solve every k-subset of ``B``; returns ``(foci, Solution)`` of the best
    (lexicographically smallest among radius ties within 1e-9 relative)."""
    norm = norm or NormSpec.lp(2)
    cfg = cfg or SolverConfig(tol_r=1e-9)
    ev = _Evaluator(A, B, k, norm, omega, cfg)
    best = None
    for U in itertools.combinations(range(len(ev.B)), k):
        sol, _ = solve_decomposition(ev.instance(U), cfg)
        if best is None or sol.r < best[1].r * (1 - 1e-9):
            best = (U, sol)
    return best
