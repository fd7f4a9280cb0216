"""Command line front end.

Exit codes: 0 success, 2 input error, 3 non-convergence, 4 infeasible
foci selection.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import METHODS, bench_csv, run_bench
from .decomp import solve_decomposition
from .foci_select import InfeasibleSelection, solve_foci_selection
from .instances import (InstanceError, dump_instance, generate_instance,
                        load_points, norm_from_label, parse_instance)
from .minimax import SolverConfig, solve_direct, solve_lagrangean
from .onedim import solve_1d
from .ordered_median import OrderedSpec, solve_om
from .plot import plot_levelset

EXIT_OK, EXIT_INPUT, EXIT_NOCONV, EXIT_INFEASIBLE = 0, 2, 3, 4


def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InstanceError(f"expected a comma-separated number list: {text!r}") from exc


def _ints(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InstanceError(f"expected a comma-separated integer list: {text!r}") from exc


def _emit(doc: dict):
    sys.stdout.write(json.dumps(doc, indent=1) + "\n")


def _solution_doc(sol, **extra) -> dict:
    doc = {"x": [float(v) for v in np.atleast_1d(sol.x)], "r": float(sol.r),
           "support": list(sol.support), "iterations": int(sol.iterations),
           "converged": bool(sol.converged)}
    doc.update(extra)
    return doc


def _load(args):
    data = parse_instance(args.instance)
    inst = data.instance
    if inst is not None and getattr(args, "norm", None):
        inst = inst.replace(norm=norm_from_label(args.norm))
    return data, inst


def cmd_solve(args) -> int:
    data, inst = _load(args)
    if inst is None:
        raise InstanceError("foci: missing")
    cfg = SolverConfig(tol_r=args.tol)
    extra = {"method": args.method}
    if args.method == "direct":
        sol = solve_direct(inst, cfg)
    elif args.method == "lagrangean":
        sol, cert = solve_lagrangean(inst, cfg)
        extra["dual_value"] = float(cert.dual_value)
    else:
        sol, trace = solve_decomposition(inst, cfg, mode=args.mode)
        extra["max_active"] = trace.max_size
        if args.trace:
            Path(args.trace).write_text(trace.to_csv())
    if args.plot:
        plot_levelset(inst, sol.x, sol.r, args.plot, args.resolution)
    _emit(_solution_doc(sol, **extra))
    return EXIT_OK if sol.converged else EXIT_NOCONV


def cmd_solve1d(args) -> int:
    if args.instance:
        data, inst = _load(args)
        if inst is None:
            raise InstanceError("foci: missing")
        if inst.d != 1:
            raise InstanceError(f"dim: solve1d needs d = 1, got {inst.d}")
        A, U, w = inst.demand[:, 0], inst.foci[:, 0], inst.foci_weights
    else:
        if not (args.demand and args.foci):
            raise InstanceError("give an instance file or --demand and --foci")
        A, U = _floats(args.demand), _floats(args.foci)
        w = _floats(args.weights) if args.weights else None
    res = solve_1d(A, U, w)
    _emit({"x": [res.x], "r": res.r, "branch": res.branch})
    return EXIT_OK


def cmd_select(args) -> int:
    data, inst = _load(args)
    B = data.candidates
    if args.candidates:
        path = Path(args.candidates)
        if not path.exists():
            raise InstanceError(f"candidates: file {path} not found")
        if path.suffix == ".json":
            B = np.array(json.loads(path.read_text()), dtype=float)
        else:
            B = load_points(path, data.demand.shape[1])
    if B is None:
        raise InstanceError("candidates: missing")
    omega = None
    if inst is not None and inst.k == args.k:
        omega = inst.foci_weights
    norm = norm_from_label(args.norm) if args.norm else data.norm
    try:
        foci, sol, state = solve_foci_selection(
            data.demand, B, args.k, norm, omega, SolverConfig(tol_r=args.tol),
            exclusion=args.exclusion)
    except InfeasibleSelection as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE
    _emit(_solution_doc(sol, foci=list(foci), lower_bound=float(state.LB),
                        upper_bound=float(state.UB), outer_iterations=state.it))
    return EXIT_OK


def cmd_om(args) -> int:
    data, inst = _load(args)
    if inst is None:
        raise InstanceError("foci: missing")
    if args.lam:
        try:
            spec = OrderedSpec(_floats(args.lam))
        except ValueError as exc:
            raise InstanceError(f"lambda: {exc}") from exc
    elif data.ordered is not None:
        spec = data.ordered
    else:
        raise InstanceError("lambda: missing")
    if spec.lam.size != inst.k:
        raise InstanceError(f"lambda: {spec.lam.size} entries for {inst.k} foci")
    sol = solve_om(inst, spec, SolverConfig(tol_r=args.tol))
    _emit(_solution_doc(sol, **{"lambda": spec.lam.tolist()}))
    return EXIT_OK if sol.converged else EXIT_NOCONV


def cmd_generate(args) -> int:
    inst = generate_instance(args.n, args.k, args.d, args.norm or "l2",
                             args.seed, args.weighted)
    text = dump_instance(inst, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    weighted = {"no": (False,), "yes": (True,), "both": (False, True)}[args.weighted]
    norms = [t.strip() for t in (args.norm or "l2").split(",") if t.strip()]
    for label in norms:
        norm_from_label(label)
    rows = run_bench(_ints(args.n), _ints(args.k), norms, _ints(args.seeds),
                     [m.strip() for m in args.methods.split(",") if m.strip()],
                     args.d, weighted, args.tol, args.timing, args.jobs)
    text = bench_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polyellipsoid",
                                description="Minimum-radius covering polyellipsoids.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance=True):
        if instance:
            sp.add_argument("instance", help="instance JSON file")
        sp.add_argument("--tol", type=float, default=1e-7,
                        help="relative radius tolerance")
        sp.add_argument("--norm", help="override the norm (l2, l3/2, linf, hex, ...)")

    sp = sub.add_parser("solve", help="cover the demand with given foci")
    common(sp)
    sp.add_argument("--method", choices=["direct", "lagrangean", "decomp"],
                    default="direct")
    sp.add_argument("--mode", choices=["strict", "growing"],
                    help="decomposition mode (default from the norm)")
    sp.add_argument("--plot", help="write an SVG of the solution (d = 2)")
    sp.add_argument("--resolution", type=int, default=200)
    sp.add_argument("--trace", help="write the decomposition trace CSV")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("solve1d", help="exact solver on the line")
    sp.add_argument("instance", nargs="?")
    sp.add_argument("--demand", help="comma-separated demand points")
    sp.add_argument("--foci", help="comma-separated foci")
    sp.add_argument("--weights", help="comma-separated foci weights")
    sp.add_argument("--norm", help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_solve1d)

    sp = sub.add_parser("select-foci", help="choose k foci among candidates")
    common(sp)
    sp.add_argument("--candidates", help="CSV or JSON file of candidate points")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--exclusion", choices=["sets", "foci"], default="sets")
    sp.set_defaults(func=cmd_select)

    sp = sub.add_parser("om", help="ordered-median covering")
    common(sp)
    sp.add_argument("--lambda", dest="lam", help="comma-separated lambda weights")
    sp.set_defaults(func=cmd_om)

    sp = sub.add_parser("generate", help="write a random instance")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--norm", default="l2")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--weighted", action="store_true")
    sp.add_argument("--out", help="output path (default: stdout)")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("bench", help="benchmark grid to CSV")
    sp.add_argument("--n", default="50")
    sp.add_argument("--k", default="1,5")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--norm", default="l2", help="comma-separated norm labels")
    sp.add_argument("--seeds", "--seed", dest="seeds", default="0")
    sp.add_argument("--methods", default="direct,decomp",
                    help=f"comma-separated subset of {','.join(METHODS)}")
    sp.add_argument("--weighted", choices=["no", "yes", "both"], default="no")
    sp.add_argument("--tol", type=float, default=1e-7)
    sp.add_argument("--timing", action="store_true",
                    help="record wall time (output is then not reproducible)")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", help="output CSV (default: stdout)")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, ValueError, NotImplementedError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
