"""Benchmark grid over random instances, written as CSV."""

from __future__ import annotations

import csv
import io
import itertools
import time
from concurrent.futures import ProcessPoolExecutor

from .decomp import solve_decomposition
from .instances import generate_instance, norm_label
from .minimax import SolverConfig, solve_direct, solve_lagrangean

__all__ = ["BENCH_COLUMNS", "METHODS", "run_bench", "bench_csv"]

BENCH_COLUMNS = ["n", "k", "d", "norm", "weighted", "method", "seed", "r",
                 "time_ms", "iters", "smax", "agree"]
METHODS = ("direct", "lagrangean", "decomp")
AGREE_RTOL = 1e-4


def _run_method(inst, method, cfg):
    if method == "direct":
        return solve_direct(inst, cfg), ""
    if method == "lagrangean":
        return solve_lagrangean(inst, cfg)[0], ""
    if method == "decomp":
        sol, trace = solve_decomposition(inst, cfg)
        return sol, trace.max_size
    raise ValueError(f"unknown method {method!r}")


def _cell(args):
    n, k, d, norm, weighted, seed, methods, tol, timing = args
    inst = generate_instance(n, k, d, norm, seed, weighted)
    cfg = SolverConfig(tol_r=tol)
    rows = []
    for method in methods:
        row = {"n": n, "k": k, "d": d, "norm": norm_label(inst.norm),
               "weighted": int(weighted), "method": method, "seed": seed,
               "r": "", "time_ms": "", "iters": "", "smax": "", "agree": ""}
        t0 = time.perf_counter()
        try:
            sol, smax = _run_method(inst, method, cfg)
        except Exception as exc:  # recorded, never aborts the grid
            row["agree"] = f"error:{type(exc).__name__}"
            rows.append(row)
            continue
        if timing:
            row["time_ms"] = f"{(time.perf_counter() - t0) * 1e3:.1f}"
        row.update(r=repr(float(sol.r)), iters=sol.iterations, smax=smax)
        rows.append(row)
    radii = [float(row["r"]) for row in rows if row["r"] != ""]
    if radii:
        ref = min(radii)
        for row in rows:
            if row["r"] != "":
                ok = abs(float(row["r"]) - ref) <= AGREE_RTOL * max(ref, 1e-300)
                row["agree"] = "true" if ok else "false"
    return rows


def run_bench(ns=(), ks=(), norms=(), seeds=(0,), methods=("direct", "decomp"),
              d: int = 2, weighted=(False,), tol: float = 1e-7,
              timing: bool = False, jobs: int = 1) -> list:
    """Solve every grid cell with every method.

    Each row records the radius, iteration count, largest active set
    (decomposition only) and whether the radius agrees with the smallest
    radius of that instance within 1e-4 relative.  Wall time is recorded
    only with ``timing=True`` so that reports are reproducible byte for
    byte.  Rows come back sorted by grid position, then method order.
    """
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    cells = [(n, k, d, norm, w, seed, tuple(methods), tol, timing)
             for n, k, norm, w, seed in itertools.product(ns, ks, norms, weighted, seeds)
             if k <= n]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_cell, cells))
    else:
        results = [_cell(c) for c in cells]
    return [row for rows in results for row in rows]


def bench_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
