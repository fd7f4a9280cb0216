"""Solvers for the full covering problem ``min_x max_a phi(x; a)``.

Two routes are provided:

* :func:`solve_direct` smooths both the norm and the outer maximum and runs
  descent with smoothing continuation.
* :func:`solve_lagrangean` maximizes the concave dual function
  ``F(alpha) = min_x sum_a alpha_a phi(x; a)`` over the simplex.  Each
  evaluation of ``F`` is a weighted Weber problem over the ``n * k`` points
  ``a - u``, and ``dF/dalpha_a = phi(x_alpha; a)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import linprog

from .descent import minimize_continuation
from .model import DualCertificate, Instance, Solution, phi_all, support_set
from .norms import norm_subgradient, smoothed_eval, smoothing_constant
from .weber import weber_solve

__all__ = [
    "SolverConfig",
    "solve_direct",
    "project_simplex",
    "solve_lagrangean",
    "dual_value",
]


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and iteration caps shared by all solvers.

    ``mu0``/``mu_min`` override the automatic smoothing schedule.
    ``gap_tol`` is the relative primal-dual gap at which the Lagrangean
    solver stops.
    """

    tol_r: float = 1e-7
    mu0: float | None = None
    mu_min: float | None = None
    max_outer: int = 500
    max_inner: int = 10_000
    eta0: float | None = None
    gap_tol: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        if not self.tol_r > 0:
            raise ValueError("tol_r must be positive")
        if self.mu0 is not None and self.mu_min is not None \
                and not self.mu_min < self.mu0:
            raise ValueError("mu_min must be smaller than mu0")


def _diameter(points: np.ndarray) -> float:
    span = points.max(axis=0) - points.min(axis=0)
    return float(np.linalg.norm(span))


def solve_direct(inst: Instance, cfg: SolverConfig | None = None,
                 x0=None) -> Solution:
    """Minimize the smoothed maximum of the smoothed coverage values.

    The outer maximum is replaced by ``mu * log(sum_a exp(phi_mu(x; a)/mu))``.
    Continuation halves ``mu`` until the total smoothing bias is below
    ``tol_r / 10`` of the current value.
    """
    cfg = cfg or SolverConfig()
    D = inst.offsets()
    w = inst.foci_weights
    pts = D.reshape(-1, inst.d)
    diam = _diameter(pts)
    if x0 is None:
        lo, hi = inst.demand.min(axis=0), inst.demand.max(axis=0)
        x0 = (lo + hi) / 2 - inst.foci_mean
    x0 = np.asarray(x0, dtype=float).reshape(inst.d)
    if diam == 0:
        x = pts[0].copy()
        return Solution(x, 0.0, tuple(range(inst.n)), 0, 0, True, 0.0)

    c_total = math.log(inst.n) + smoothing_constant(inst.norm, inst.d)
    mu0 = cfg.mu0 if cfg.mu0 is not None else 0.1 * diam
    mu_floor = 1e-15 * diam

    def fg(x, mu):
        vals, grads = smoothed_eval(inst.norm, D - x, mu)
        ph = vals @ w
        dph = -np.einsum("nkd,k->nd", grads, w)
        m = ph.max()
        e = np.exp((ph - m) / mu)
        s = e.sum()
        return m + mu * math.log(s), (e / s) @ dph

    def stop(mu, f):
        if cfg.mu_min is not None and mu <= cfg.mu_min:
            return True
        return mu * c_total <= 0.1 * cfg.tol_r * f or mu <= mu_floor

    res = minimize_continuation(fg, x0, mu0, stop, diam,
                                max_iter=cfg.max_inner)
    vals = phi_all(inst, res.x)
    r = float(vals.max())
    return Solution(res.x, r, support_set(inst, res.x, r), res.iterations,
                    res.stages, res.converged, res.mu * c_total)


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto ``{a >= 0, sum(a) = 1}`` (sort and threshold)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    j = np.arange(1, len(v) + 1)
    rho = np.flatnonzero(u - css / j > 0)[-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


def dual_value(inst: Instance, alpha, tol: float = 1e-9, x0=None):
    """Lower bound on ``F(alpha)`` and the Weber minimizer ``x_alpha``.

    Returns ``(F_lower, x_alpha, weber_value)``; the Weber solver is accurate
    to ``tol`` so ``weber_value - tol`` bounds ``F(alpha)`` from below.
    """
    alpha = np.asarray(alpha, dtype=float)
    pts = inst.offsets().reshape(-1, inst.d)
    wts = (alpha[:, None] * inst.foci_weights[None, :]).ravel()
    res = weber_solve(pts, wts, inst.norm, tol=tol, x0=x0)
    return res.value - tol, res.x, res.value


def _subgradient_generators(inst: Instance, V, atol: float):
    """Generators of the subdifferential of ``||v||`` for each row of ``V``.

    Strictly convex norms have a single gradient (zero at the origin);
    polyhedral norms use every polar extreme active within ``atol``.
    """
    if inst.norm.strictly_convex:
        return [g[None, :] for g in norm_subgradient(inst.norm, V)]
    E = inst.norm.polar_for(inst.d)
    P = V @ E.T
    return [E[row >= row.max() - atol] for row in P]


def kkt_multipliers(inst: Instance, x, rtol: float = 1e-5):
    """Simplex weights on the nearly tight demand points at ``x`` that make a
    combination of their coverage subgradients as close to zero as possible.

    Each coverage value ``phi(x; a)`` contributes any element of its
    subdifferential, so kinks of polyhedral norms are handled exactly.  The
    weights solve a small linear program minimizing the l1 norm of the
    combined subgradient.  At an optimal ``x`` they are optimal dual
    multipliers.  Returns ``None`` if the linear program fails.
    """
    vals = phi_all(inst, x)
    r = float(vals.max())
    tight = np.flatnonzero(vals >= r * (1 - rtol))
    w = inst.foci_weights
    d, T, k = inst.d, len(tight), inst.k
    V = (inst.demand[tight, None, :] - inst.foci[None, :, :] - x).reshape(-1, d)
    gens = _subgradient_generators(inst, V, atol=1e-6 * max(r, 1e-300))
    # variables: alpha (T), one weight per generator, slacks (2d)
    sizes = [len(G) for G in gens]
    m = T + sum(sizes) + 2 * d
    A_eq = np.zeros((T * k + d + 1, m))
    col = T
    for j, G in enumerate(gens):
        t, u = divmod(j, k)
        A_eq[j, col:col + len(G)] = 1.0
        A_eq[j, t] = -1.0
        # gradient of phi in x is minus the weighted norm subgradients
        A_eq[T * k:T * k + d, col:col + len(G)] = -w[u] * G.T
        col += len(G)
    A_eq[T * k:T * k + d, col:col + d] = np.eye(d)
    A_eq[T * k:T * k + d, col + d:] = -np.eye(d)
    A_eq[-1, :T] = 1.0
    b_eq = np.zeros(len(A_eq))
    b_eq[-1] = 1.0
    c = np.zeros(m)
    c[col:] = 1.0
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        return None
    alpha = np.zeros(inst.n)
    alpha[tight] = np.maximum(res.x[:T], 0.0)
    return alpha / alpha.sum()


# projected-gradient step bounds, relative to 1 / radius scale
_ETA_RANGE = (1e-8, 1e8)
_NONMONOTONE_MEMORY = 8
_MAX_HALVINGS = 40


def solve_lagrangean(inst: Instance, cfg: SolverConfig | None = None):
    """Projected gradient ascent on the Lagrangean dual.

    Steps ``alpha <- P(alpha + eta grad F)`` use Barzilai-Borwein step sizes
    (first step ``eta0 = 1/diameter``) with a nonmonotone backtracking
    safeguard; the best dual iterate is kept.  The primal point is recovered
    from the Weber minimizers ``x_alpha`` and from the covering problem
    restricted to the heaviest multipliers plus the point farthest from
    ``x_alpha``.

    Returns
    -------
    Solution, DualCertificate
        ``certificate.history`` holds ``(iteration, dual_value, primal_r)``
        for every accepted iterate.
    """
    cfg = cfg or SolverConfig()
    n, d = inst.n, inst.d
    pts = inst.offsets().reshape(-1, d)
    diam = _diameter(pts)
    if diam == 0:
        sol = solve_direct(inst, cfg)
        return sol, DualCertificate(np.full(n, 1.0 / n), 0.0, ((0, 0.0, 0.0),))
    eta_lo, eta_hi = (e / diam for e in _ETA_RANGE)
    eta = cfg.eta0 if cfg.eta0 is not None else 1.0 / diam
    support_cap = 2 * (d + 1) + 2
    sub_cfg = replace(cfg, tol_r=min(cfg.tol_r, 1e-9))

    weber_calls = 0
    best_x, best_r = None, math.inf
    tried_supports = set()
    history = []

    def offer_primal(x):
        nonlocal best_x, best_r
        r = float(phi_all(inst, x).max())
        if r < best_r:
            best_x, best_r = np.array(x, dtype=float), r
            return True
        return False

    def offer_dual_from(x):
        # multipliers read off the optimality conditions at a primal point
        nonlocal best_F, best_alpha
        a = kkt_multipliers(inst, x)
        if a is None:
            return
        tol = max(1e-10 * diam, cfg.gap_tol * best_r / 20)
        F_a, _, _ = evaluate(a, x, tol)
        if F_a > best_F:
            best_F, best_alpha = F_a, a

    def inner_tol(F):
        gap = best_r - F if math.isfinite(best_r) and math.isfinite(F) else math.inf
        return max(1e-10 * diam, min(gap / 100, 1e-3 * diam))

    def evaluate(alpha, x_start, tol):
        nonlocal weber_calls
        weber_calls += 1
        F, x, _ = dual_value(inst, alpha, tol=tol, x0=x_start)
        g = phi_all(inst, x)
        return F, x, g

    alpha = np.full(n, 1.0 / n)
    F, x, g = evaluate(alpha, None, 1e-3 * diam)
    best_F, best_alpha = F, alpha
    recent = [F]
    converged = False
    it = 0
    for it in range(1, cfg.max_outer + 1):
        if F > best_F:
            best_F, best_alpha = F, alpha
        improved = offer_primal(x)
        # the heaviest multipliers plus the point farthest from x_alpha
        heavy = np.argsort(-alpha, kind="stable")[:support_cap]
        heavy = heavy[alpha[heavy] > 0]
        supp = tuple(sorted(set(heavy.tolist()) | {int(np.argmax(g))}))
        if supp not in tried_supports:
            tried_supports.add(supp)
            sub = solve_direct(inst.subset(supp), sub_cfg, x0=x)
            improved = offer_primal(sub.x) or improved
        if improved and best_r - best_F > cfg.gap_tol * best_r:
            offer_dual_from(best_x)
        if best_F > best_r * (1 + 1e-12):
            raise RuntimeError(
                f"weak duality violated: dual {best_F!r} > primal {best_r!r}")
        history.append((it, best_F, best_r))
        if best_r - best_F <= cfg.gap_tol * best_r:
            converged = True
            break

        direction = project_simplex(alpha + eta * g) - alpha
        slope = g @ direction
        if slope <= 1e-15 * best_r:
            # stationary up to inner accuracy: sharpen the oracle
            F, x, g = evaluate(alpha, x, inner_tol(best_F) / 10)
            recent.append(F)
            continue
        F_ref = min(recent[-_NONMONOTONE_MEMORY:])
        tol = inner_tol(best_F)
        lam = 1.0
        for _ in range(_MAX_HALVINGS):
            trial = alpha + lam * direction
            trial = np.maximum(trial, 0.0)
            trial /= trial.sum()
            F_t, x_t, g_t = evaluate(trial, x, tol)
            if F_t >= F_ref + 1e-4 * lam * slope:
                break
            lam *= 0.5
        s = trial - alpha
        y = g_t - g
        sy = s @ y
        eta = min(eta_hi, max(eta_lo, -(s @ s) / sy)) if sy < 0 else eta_hi
        alpha, F, x, g = trial, F_t, x_t, g_t
        recent.append(F)

    if F > best_F:
        best_F, best_alpha = F, alpha
    offer_primal(x)
    gap = best_r - best_F
    sol = Solution(best_x, best_r, support_set(inst, best_x, best_r), it,
                   weber_calls, converged, gap)
    return sol, DualCertificate(best_alpha, best_F, tuple(history))
