"""Gauges used as distance measures: lp norms and polyhedral block norms.

All functions broadcast over leading axes: ``v`` may be a single
d-vector or an array of shape ``(..., d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "NormSpec",
    "HEX_BALL",
    "norm_eval",
    "dual_norm_eval",
    "norm_subgradient",
    "smoothed_eval",
    "smoothing_constant",
    "derive_polar_extremes",
    "parse_p",
]

# Unit ball of the hexagonal block norm used in the planar experiments.
HEX_BALL = np.array([[2.0, 0.0], [1.0, 2.0], [-1.0, 2.0],
                     [-2.0, 0.0], [-1.0, -2.0], [1.0, -2.0]])

_POLARITY_TOL = 1e-10


def parse_p(p) -> float:
    """Parse an lp exponent given as number, ``"3/2"`` or ``"inf"``."""
    if isinstance(p, str):
        s = p.strip().lower()
        if s in ("inf", "infinity", "oo"):
            return math.inf
        p = float(Fraction(s))
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"lp exponent must satisfy p >= 1, got {p}")
    return p


def _symmetric_completion(points: np.ndarray) -> np.ndarray:
    pts = np.vstack([points, -points])
    keep = []
    for v in pts:
        if not any(np.allclose(v, w, rtol=0, atol=1e-12) for w in keep):
            keep.append(v)
    return np.array(keep)


def _sort_by_angle(points: np.ndarray) -> np.ndarray:
    ang = np.arctan2(points[:, 1], points[:, 0])
    return points[np.argsort(ang, kind="stable")]


def derive_polar_extremes(ball_extremes) -> np.ndarray:
    """Extreme points of the polar ball of a centrally symmetric polygon.

    Each pair of angularly adjacent ball extremes ``b_i, b_j`` spans an edge
    of the ball; the polar extreme ``e`` for that edge solves
    ``e.b_i = e.b_j = 1``.

    Parameters
    ----------
    ball_extremes : array_like, shape (m, 2)
        Extreme points of the unit ball (symmetric halves may be omitted).

    Returns
    -------
    ndarray, shape (m, 2)
        Polar extremes, ordered by angle.
    """
    B = np.asarray(ball_extremes, dtype=float)
    if B.ndim != 2 or B.shape[1] != 2:
        raise NotImplementedError(
            "polar extremes can only be derived in the plane; "
            "supply them explicitly for d != 2")
    B = _sort_by_angle(_symmetric_completion(B))
    m = len(B)
    if m < 4:
        raise ValueError("a planar unit ball needs at least 4 extreme points")
    polar = []
    for i in range(m):
        M = np.vstack([B[i], B[(i + 1) % m]])
        if abs(np.linalg.det(M)) <= 1e-12 * max(1.0, np.abs(M).max() ** 2):
            raise ValueError(
                f"adjacent extremes {B[i]} and {B[(i + 1) % m]} are collinear "
                "with the origin")
        polar.append(np.linalg.solve(M, np.ones(2)))
    return _sort_by_angle(np.array(polar))


@dataclass(frozen=True, eq=False)
class NormSpec:
    """Description of a norm: ``kind`` is ``"lp"`` or ``"block"``.

    Use the :meth:`lp` and :meth:`block` constructors rather than the
    dataclass initializer.
    """

    kind: str
    p: float = 2.0
    ball_extremes: np.ndarray | None = None
    polar_extremes: np.ndarray | None = None

    @classmethod
    def lp(cls, p=2) -> "NormSpec":
        return cls("lp", parse_p(p))

    @classmethod
    def block(cls, ball_extremes, polar_extremes=None) -> "NormSpec":
        B = np.asarray(ball_extremes, dtype=float)
        if B.ndim != 2:
            raise ValueError("ball extremes must be a 2-d array")
        B = _symmetric_completion(B)
        d = B.shape[1]
        if np.linalg.matrix_rank(B) < d:
            raise ValueError("ball extremes do not span the space")
        if polar_extremes is None:
            if d != 2:
                raise NotImplementedError(
                    "block norms with d != 2 need explicit polar extremes")
            E = derive_polar_extremes(B)
            B = _sort_by_angle(B)
        else:
            E = _symmetric_completion(np.asarray(polar_extremes, dtype=float))
            if E.shape[1] != d:
                raise ValueError("polar extremes have the wrong dimension")
        # Every ball extreme must lie on the unit sphere of the gauge and
        # every polar extreme on the unit sphere of the dual gauge.
        G = E @ B.T
        if (np.abs(G.max(axis=0) - 1) > _POLARITY_TOL).any():
            raise ValueError("ball extremes are not extreme points of the "
                             "ball described by the polar extremes")
        if (np.abs(G.max(axis=1) - 1) > _POLARITY_TOL).any():
            raise ValueError("polar extremes are inconsistent with the ball")
        B.setflags(write=False)
        E.setflags(write=False)
        return cls("block", math.nan, B, E)

    @classmethod
    def hex(cls) -> "NormSpec":
        return cls.block(HEX_BALL[:3])

    @property
    def strictly_convex(self) -> bool:
        return self.kind == "lp" and 1 < self.p < math.inf

    @property
    def dim(self) -> int | None:
        """Fixed dimension of a block norm, ``None`` for lp norms."""
        if self.kind == "block":
            return self.ball_extremes.shape[1]
        return None

    def polar_for(self, d: int) -> np.ndarray:
        """Polar extremes in dimension ``d`` (lp norms with p in {1, inf})."""
        if self.kind == "block":
            return self.polar_extremes
        if self.p == math.inf:
            eye = np.eye(d)
            return np.vstack([eye, -eye])
        if self.p == 1:
            return np.array(np.meshgrid(*[[1.0, -1.0]] * d)).reshape(d, -1).T
        raise ValueError("lp norm with 1 < p < inf is not polyhedral")

    def euclidean_radius(self, d: int) -> float:
        """Largest Euclidean norm of a point of the unit ball."""
        if self.kind == "block":
            return float(np.linalg.norm(self.ball_extremes, axis=1).max())
        if self.p >= 2:
            return 1.0
        return d ** (0.5 - 1.0 / self.p)

    def to_dict(self) -> dict:
        if self.kind == "lp":
            if self.p == math.inf:
                return {"lp": "inf"}
            return {"lp": int(self.p) if self.p.is_integer() else self.p}
        return {"block": self.ball_extremes.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "NormSpec":
        if "lp" in data:
            return cls.lp(data["lp"])
        if "block" in data:
            return cls.block(data["block"], data.get("polar"))
        raise ValueError("norm must have an 'lp' or 'block' entry")

    def __repr__(self):
        if self.kind == "lp":
            return f"NormSpec.lp({self.p:g})"
        return f"NormSpec.block({self.ball_extremes.tolist()})"


def _check_dim(spec: NormSpec, v: np.ndarray):
    if spec.kind == "block" and v.shape[-1] != spec.dim:
        raise ValueError(
            f"vector of dimension {v.shape[-1]} for a block norm in R^{spec.dim}")


def norm_eval(spec: NormSpec, v):
    """Value of the norm ``||v||``."""
    v = np.asarray(v, dtype=float)
    _check_dim(spec, v)
    if spec.kind == "block":
        return np.max(v @ spec.polar_extremes.T, axis=-1)
    p = spec.p
    a = np.abs(v)
    if p == 1:
        return a.sum(axis=-1)
    if p == 2:
        return np.sqrt((v * v).sum(axis=-1))
    if p == math.inf:
        return a.max(axis=-1)
    # scale by the largest coordinate to avoid overflow in a**p
    m = a.max(axis=-1, keepdims=True)
    m = np.where(m > 0, m, 1.0)
    return m[..., 0] * ((a / m) ** p).sum(axis=-1) ** (1 / p)


def dual_norm_eval(spec: NormSpec, g):
    """Value of the dual norm ``max{g.v : ||v|| <= 1}``."""
    g = np.asarray(g, dtype=float)
    _check_dim(spec, g)
    if spec.kind == "block":
        return np.max(g @ spec.ball_extremes.T, axis=-1)
    p = spec.p
    q = math.inf if p == 1 else (1.0 if p == math.inf else p / (p - 1))
    return norm_eval(NormSpec("lp", q), g)


def norm_subgradient(spec: NormSpec, v):
    """A subgradient of the norm at ``v`` (zero at ``v = 0``).

    At kinks the selection is deterministic: zero for vanishing coordinates
    of the l1 norm, and the lowest-index maximizer for max-type norms.
    """
    v = np.asarray(v, dtype=float)
    _check_dim(spec, v)
    zero = ~np.any(v != 0, axis=-1, keepdims=True)
    if spec.kind == "block" or spec.p == math.inf:
        E = spec.polar_for(v.shape[-1])
        if spec.kind == "lp":
            # one signed unit vector per coordinate, lowest index first
            idx = np.argmax(np.abs(v), axis=-1)
            g = np.zeros_like(v)
            np.put_along_axis(g, idx[..., None],
                              np.sign(np.take_along_axis(v, idx[..., None], -1)), -1)
            return np.where(zero, 0.0, g)
        idx = np.argmax(v @ E.T, axis=-1)
        return np.where(zero, 0.0, E[idx])
    p = spec.p
    if p == 1:
        return np.sign(v)
    nv = norm_eval(spec, v)[..., None]
    nv = np.where(zero, 1.0, nv)
    if p == 2:
        return np.where(zero, 0.0, v / nv)
    return np.where(zero, 0.0, np.sign(v) * (np.abs(v) / nv) ** (p - 1))


def smoothing_constant(spec: NormSpec, d: int) -> float:
    """Constant ``c`` with ``0 <= smoothed - ||v|| <= c * mu``."""
    if spec.kind == "block" or spec.p == math.inf:
        return math.log(len(spec.polar_for(d)))
    return d ** (1.0 / spec.p)


def smoothed_eval(spec: NormSpec, v, mu: float):
    """Differentiable upper approximation of the norm and its gradient.

    For lp norms with finite p each coordinate is replaced by
    ``sqrt(v_j**2 + mu**2)`` before the p-composition; max-type norms use
    ``mu * log(sum_e exp(e.v / mu))`` over the polar extremes.

    Returns
    -------
    value : ndarray, shape (...)
    grad : ndarray, shape (..., d)
    """
    if not mu > 0:
        raise ValueError(f"smoothing parameter must be positive, got {mu}")
    v = np.asarray(v, dtype=float)
    _check_dim(spec, v)
    if spec.kind == "block" or spec.p == math.inf:
        E = spec.polar_for(v.shape[-1])
        z = (v @ E.T) / mu
        zmax = z.max(axis=-1, keepdims=True)
        w = np.exp(z - zmax)
        s = w.sum(axis=-1, keepdims=True)
        value = mu * (zmax[..., 0] + np.log(s[..., 0]))
        return value, (w / s) @ E
    p = spec.p
    s = np.sqrt(v * v + mu * mu)
    if p == 1:
        return s.sum(axis=-1), v / s
    if p == 2:
        value = np.sqrt((s * s).sum(axis=-1))
        return value, v / value[..., None]
    m = s.max(axis=-1, keepdims=True)
    t = s / m
    value = m * (t ** p).sum(axis=-1, keepdims=True) ** (1 / p)
    grad = (s / value) ** (p - 1) * (v / s)
    return value[..., 0], grad
