"""SVG drawings of planar polyellipses and their demand points."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from skimage.measure import find_contours

from .model import Instance
from .norms import norm_eval

__all__ = ["level_contours", "plot_levelset"]

_SIZE = 1000.0
_MARGIN = 0.05


def _frame(inst: Instance, x, r):
    # the level set lies in the r-ball (in the norm) around x + ubar
    reach = r * inst.norm.euclidean_radius(2)
    centre = np.asarray(x, dtype=float) + inst.foci_mean
    pts = np.vstack([inst.demand, inst.foci + x, centre - reach, centre + reach])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    side = float((hi - lo).max()) or 1.0
    mid = (lo + hi) / 2
    half = side * (0.5 + _MARGIN)
    return mid - half, 2 * half


def level_contours(inst: Instance, x, r: float, resolution: int = 200,
                   frame=None):
    """Polylines approximating ``{z : sum_u w_u ||z - u - x|| = r}``.

    Returns a list of ``(m, 2)`` arrays in data coordinates and the grid
    cell size.
    """
    if inst.d != 2:
        raise NotImplementedError("level sets can only be drawn for d = 2")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    x = np.asarray(x, dtype=float)
    origin, side = frame if frame is not None else _frame(inst, x, r)
    t = np.linspace(0.0, side, resolution)
    gx, gy = np.meshgrid(origin[0] + t, origin[1] + t, indexing="ij")
    Z = np.stack([gx, gy], axis=-1)
    F = norm_eval(inst.norm, Z[:, :, None, :] - inst.foci - x) @ inst.foci_weights
    cell = side / (resolution - 1)
    lines = [origin + c * cell for c in find_contours(F, r)]
    return lines, cell


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def plot_levelset(inst: Instance, x, r: float, out_path=None,
                  resolution: int = 200) -> str:
    """SVG of the demand points, the translated foci and the level set.

    Coordinates are mapped onto a fixed 1000 x 1000 view box (y pointing
    up) and printed with three decimals, so equal inputs give equal bytes.
    """
    x = np.asarray(x, dtype=float)
    frame = _frame(inst, x, r)
    lines, _ = level_contours(inst, x, r, resolution, frame)
    origin, side = frame

    def to_svg(p):
        q = (np.asarray(p) - origin) / side * _SIZE
        return q[..., 0], _SIZE - q[..., 1]

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           '<svg xmlns="http://www.w3.org/2000/svg" width="1000" height="1000" '
           'viewBox="0 0 1000 1000">',
           '<rect x="0" y="0" width="1000" height="1000" fill="white"/>',
           f'<!-- radius {r!r} -->']
    for line in lines:
        sx, sy = to_svg(line)
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(sx, sy))
        out.append(f'<polyline class="level" fill="none" stroke="steelblue" '
                   f'stroke-width="2" points="{pts}"/>')
    for a in inst.demand:
        sx, sy = to_svg(a)
        out.append(f'<circle class="demand" cx="{_fmt(sx)}" cy="{_fmt(sy)}" '
                   'r="4" fill="black"/>')
    for u in inst.foci + x:
        sx, sy = to_svg(u)
        out.append(f'<rect class="focus" x="{_fmt(sx - 5)}" y="{_fmt(sy - 5)}" '
                   'width="10" height="10" fill="crimson"/>')
    out.append("</svg>")
    text = "\n".join(out) + "\n"
    if out_path is not None:
        Path(out_path).write_text(text)
    return text
