"""Exact covering on the real line.

With foci ``U`` and weights ``w`` the function ``f(z) = sum_j w_j |z - u_j|``
is piecewise linear: if exactly ``s`` foci lie at or left of ``z`` then
``f(z) = (2 W_s - 1) z + ubar - 2 M_s`` with ``W_s`` and ``M_s`` the prefix
sums of ``w`` and ``w * u``.  A translate ``x + U`` covers ``A`` at radius
``r`` iff both ``f(a0 - x) <= r`` and ``f(af - x) <= r`` where ``a0, af``
are the extreme demand points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["Interval1D", "polyellipse_interval", "weber_1d", "solve_1d",
           "valid_pairs", "Result1D"]

_SLACK = 1e-12


@dataclass(frozen=True)
class Interval1D:
    """Closed interval ``[lo, hi]``; ``lo > hi`` encodes the empty set."""

    lo: float
    hi: float

    @classmethod
    def empty(cls) -> "Interval1D":
        return cls(math.inf, -math.inf)

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi

    @property
    def length(self) -> float:
        return 0.0 if self.is_empty else self.hi - self.lo

    def __contains__(self, z) -> bool:
        return self.lo <= z <= self.hi

    def contains_interval(self, other: "Interval1D", tol: float = 0.0) -> bool:
        if other.is_empty:
            return True
        return self.lo - tol <= other.lo and other.hi <= self.hi + tol


@dataclass(frozen=True)
class _Foci:
    u: np.ndarray       # sorted
    w: np.ndarray
    W: np.ndarray       # W[s] = w[0] + ... + w[s-1], s = 0..k
    M: np.ndarray       # same for w * u
    ubar: float

    @classmethod
    def build(cls, U, omega=None) -> "_Foci":
        u = np.asarray(U, dtype=float).ravel()
        if u.size == 0:
            raise ValueError("at least one focus is required")
        w = np.full(u.size, 1.0 / u.size) if omega is None \
            else np.asarray(omega, dtype=float).ravel()
        if w.shape != u.shape or (w <= 0).any():
            raise ValueError("one positive weight per focus is required")
        w = w / w.sum()
        order = np.argsort(u, kind="stable")
        u, w = u[order], w[order]
        W = np.concatenate([[0.0], np.cumsum(w)])
        M = np.concatenate([[0.0], np.cumsum(w * u)])
        return cls(u, w, W, M, float(M[-1]))

    @property
    def k(self) -> int:
        return self.u.size

    def slope(self, s: int) -> float:
        return 2 * self.W[s] - 1

    def intercept(self, s: int) -> float:
        return self.ubar - 2 * self.M[s]

    def knot(self, j: int) -> float:
        """``u_j`` with 1-based ``j``; ``u_0 = -inf`` and ``u_{k+1} = inf``."""
        if j <= 0:
            return -math.inf
        if j > self.k:
            return math.inf
        return float(self.u[j - 1])

    def value(self, z) -> float:
        return float(self.w @ np.abs(z - self.u))

    def median(self) -> tuple[float, float, float]:
        """Weighted median interval ``[m0, m1]`` and the Weber value."""
        j = int(np.searchsorted(self.W[1:], 0.5 - _SLACK))
        m0 = float(self.u[j])
        m1 = float(self.u[j + 1]) if abs(self.W[j + 1] - 0.5) <= _SLACK \
            and j + 1 < self.k else m0
        return m0, m1, self.value(m0)


def weber_1d(U, omega=None) -> tuple[float, float, float]:
    """Median interval ``(lo, hi)`` and minimum of ``sum w |z - u|``."""
    return _Foci.build(U, omega).median()


def polyellipse_interval(U, omega, r: float) -> Interval1D:
    """The set ``{z : sum_j w_j |z - u_j| <= r}``.

    Empty below the Weber value, the median interval at it, and otherwise
    bounded by the roots of the linear pieces found by scanning the
    breakpoints from both ends.
    """
    F = _Foci.build(U, omega)
    m0, m1, rstar = F.median()
    scale = max(1.0, abs(rstar), float(np.abs(F.u).max()))
    if r < rstar - _SLACK * scale:
        return Interval1D.empty()
    if r <= rstar + _SLACK * scale:
        return Interval1D(m0, m1)
    lo = hi = None
    for s in range(F.k + 1):
        a = F.slope(s)
        if a >= 0:
            break
        z = (r - F.intercept(s)) / a
        if z <= F.knot(s + 1):
            lo = z
            break
    for s in range(F.k, -1, -1):
        a = F.slope(s)
        if a <= 0:
            break
        z = (r - F.intercept(s)) / a
        if z >= F.knot(s):
            hi = z
            break
    return Interval1D(float(lo), float(hi))


@dataclass(frozen=True)
class Result1D:
    x: float
    r: float
    branch: str
    pair: tuple | None = None

    def __iter__(self):
        return iter((self.x, self.r))


def _pair_solution(F: _Foci, L: float, s0: int, sf: int):
    """Solve ``f(y) = r = f(y + L)`` on the pieces ``s0`` and ``sf``.

    Returns ``(y, r)`` or ``None`` when the pieces do not slope the right
    way or the solution lies outside them.
    """
    a0, af = F.slope(s0), F.slope(sf)
    if not (a0 < 0 < af):
        return None
    c0, cf = F.intercept(s0), F.intercept(sf)
    y = (af * L + cf - c0) / (a0 - af)
    r = a0 * y + c0
    scale = max(1.0, abs(y), L)
    tol = _SLACK * scale
    if not (F.knot(s0) - tol <= y <= F.knot(s0 + 1) + tol):
        return None
    z = y + L
    if not (F.knot(sf) - tol <= z <= F.knot(sf + 1) + tol):
        return None
    return y, r


def _candidate_pairs(F: _Foci, L: float):
    """Pairs with ``u_sf - u_{s0+1} < L < u_{sf+1} - u_s0`` (with slack)."""
    tol = _SLACK * max(1.0, L)
    for s0 in range(F.k + 1):
        if F.slope(s0) >= 0:
            break
        for sf in range(s0, F.k + 1):
            if F.knot(sf) - F.knot(s0 + 1) > L + tol:
                break
            if L < F.knot(sf + 1) - F.knot(s0) + tol:
                yield s0, sf


def valid_pairs(A, U, omega=None) -> list:
    """All piece pairs ``(s0, sf)`` whose linear system yields a consistent
    solution (``s`` counts the foci at or left of the contact point)."""
    a = np.asarray(A, dtype=float).ravel()
    F = _Foci.build(U, omega)
    L = float(a.max() - a.min())
    return [(s0, sf) for s0, sf in _candidate_pairs(F, L)
            if _pair_solution(F, L, s0, sf) is not None]


def solve_1d(A, U, omega=None) -> Result1D:
    """Smallest radius at which a translate of the foci covers ``A``.

    Returns a :class:`Result1D` which unpacks as ``(x, r)``.  When the
    optimal translations form an interval its midpoint is returned.
    """
    a = np.asarray(A, dtype=float).ravel()
    if a.size == 0:
        raise ValueError("at least one demand point is required")
    F = _Foci.build(U, omega)
    lo_a, hi_a = float(a.min()), float(a.max())
    L = hi_a - lo_a
    m0, m1, rstar = F.median()
    # y = lo_a - x is where the left demand extreme sits relative to the foci
    if L <= (m1 - m0) * (1 + _SLACK):
        y = (m0 + m1 - L) / 2
        return Result1D(float(lo_a - y), float(rstar), "median")
    if max(F.u[-1] - F.ubar, F.ubar - F.u[0]) <= L / 2:
        return Result1D(float((lo_a + hi_a) / 2 - F.ubar), L / 2, "explicit")
    for s0, sf in _candidate_pairs(F, L):
        sol = _pair_solution(F, L, s0, sf)
        if sol is not None:
            y, r = sol
            return Result1D(float(lo_a - y), float(r), "pairs", (s0, sf))
    raise RuntimeError("no consistent piece pair found")  # pragma: no cover
