"""End-to-end acceptance checks.  Each test prints one PASS/FAIL line,
repeated in the terminal summary."""

import itertools
import time

import numpy as np
import pytest

import properties
from oracles import min_enclosing_circle
from polyellipsoid import Instance, SolverConfig, solve_direct, solve_lagrangean
from polyellipsoid.cli import main
from polyellipsoid.decomp import solve_decomposition, solve_subset
from polyellipsoid.foci_select import select_foci_brute_force, solve_foci_selection
from polyellipsoid.instances import generate_instance
from polyellipsoid.onedim import solve_1d
from polyellipsoid.ordered_median import OrderedSpec, om_rearrangement_check, solve_om

SUITE_COMBOS = list(itertools.product([2, 3], [10, 50, 500], [1, 5, 10], ["l3/2", "l2", "l3"]))


@pytest.fixture(scope="module")
def suite():
    """100 seeded instances solved by all three methods."""
    t0 = time.perf_counter()
    runs = []
    for i in range(100):
        d, n, k, norm = SUITE_COMBOS[i % len(SUITE_COMBOS)]
        inst = generate_instance(n, k, d, norm, seed=1000 + i)
        cfg = SolverConfig()
        direct = solve_direct(inst, cfg)
        lag, cert = solve_lagrangean(inst, cfg)
        dec, trace = solve_decomposition(inst, cfg)
        runs.append(dict(inst=inst, direct=direct, lag=lag, cert=cert, dec=dec,
                         trace=trace))
    return runs, time.perf_counter() - t0


def test_criterion_1_cross_solver_agreement(suite, report):
    runs, elapsed = suite
    worst = max((max(r) - min(r)) / min(r) for r in
                ([run["direct"].r, run["lag"].r, run["dec"].r] for run in runs))
    ok = worst <= 1e-4 and elapsed < 600 and len(runs) == 100
    report("criterion 1 cross-solver agreement", ok,
           f"100 instances, worst relative spread {worst:.2e}, {elapsed:.1f} s")
    assert ok


def test_criterion_2_duality_gap(suite, report):
    runs, _ = suite
    worst_gap, violations = 0.0, 0
    for run in runs:
        r_star = min(run["direct"].r, run["lag"].r, run["dec"].r)
        worst_gap = max(worst_gap, (run["lag"].r - run["cert"].dual_value) / r_star)
        for _, F, r in run["cert"].history:
            violations += F > r or F > r_star * (1 + 1e-12)
    ok = worst_gap <= 1e-4 and violations == 0
    report("criterion 2 duality gap", ok,
           f"worst gap {worst_gap:.2e} r*, {violations} weak-duality violations")
    assert ok


def test_criterion_3_one_center(report):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(50):
        P = rng.uniform(0, 100, (int(rng.integers(2, 31)), 2))
        _, r_mec = min_enclosing_circle(P)
        inst = Instance(P, [rng.uniform(0, 100, 2)])
        cfg = SolverConfig(tol_r=1e-9)
        for sol in (solve_direct(inst, cfg), solve_decomposition(inst, cfg)[0]):
            worst = max(worst, abs(sol.r - r_mec))
    ok = worst <= 1e-6
    report("criterion 3 one-center reduction", ok,
           f"50 instances, worst absolute error {worst:.2e}")
    assert ok


def test_criterion_4_iteration_counts(report):
    counts, cell_means, smax = [], [], 0
    cells = itertools.product([50, 5000], [1, 5, 10, 25], ["l2", "l1", "hex"], [False, True])
    for n, k, norm, weighted in cells:
        its = []
        for seed in range(5):
            inst = generate_instance(n, k, 2, norm, seed=seed, weighted=weighted)
            sol, trace = solve_decomposition(inst, SolverConfig())
            its.append(sol.iterations)
            if trace.mode == "growing":
                smax = max(smax, trace.max_size)
        counts += its
        cell_means.append(np.mean(its))
    ok = (2 <= min(counts) and max(counts) <= 12 and 2 <= min(cell_means)
          and max(cell_means) <= 7 and smax <= 8)
    report("criterion 4 iteration counts", ok,
           f"{len(cell_means)} cells x 5 seeds, iterations in [{min(counts)}, {max(counts)}], "
           f"cell means in [{min(cell_means):.1f}, {max(cell_means):.1f}], max |S| {smax}")
    assert ok


def test_criterion_5_helly_support(suite, report):
    runs, _ = suite
    worst, oversize = 0.0, 0
    for run in runs:
        inst, dec, S = run["inst"], run["dec"], run["trace"].active_set
        oversize += len(S) > inst.d + 1
        r_S = solve_subset(inst, S, SolverConfig(tol_r=1e-10)).r
        worst = max(worst, abs(r_S - dec.r) / dec.r)
    ok = worst <= 1e-6 and oversize == 0
    report("criterion 5 Helly support", ok,
           f"{len(runs)} runs, worst relative error {worst:.2e}, {oversize} oversized sets")
    assert ok


def test_criterion_6_one_dimensional(report):
    rng = np.random.default_rng(6)
    cfg = SolverConfig(tol_r=1e-9)
    worst, branches = 0.0, {}
    t_exact = t_total = 0.0
    t0 = time.perf_counter()
    for _ in range(500):
        n, k = int(rng.integers(1, 51)), int(rng.integers(1, 21))
        A = rng.uniform(0, 100, n) * rng.uniform(0.05, 1)
        U = rng.uniform(0, 100, k) * rng.uniform(0.05, 1)
        w = rng.uniform(0.1, 1, k)
        w /= w.sum()
        t = time.perf_counter()
        res = solve_1d(A, U, w)
        t_exact += time.perf_counter() - t
        branches[res.branch] = branches.get(res.branch, 0) + 1
        r = solve_direct(Instance(A[:, None], U[:, None], w), cfg).r
        worst = max(worst, abs(res.r - r) / max(1.0, r))
    t_total = time.perf_counter() - t0
    ok = (worst <= 1e-7 and t_total < 30 and branches.get("explicit", 0) > 0
          and branches.get("pairs", 0) > 0)
    report("criterion 6 1D exactness", ok,
           f"500 instances, worst error {worst:.2e}, branches {dict(sorted(branches.items()))}, "
           f"exact solver {t_exact:.2f} s, total {t_total:.1f} s")
    assert ok


def test_criterion_7_foci_selection(report):
    rng = np.random.default_rng(7)
    worst = 0.0
    for i in range(10):
        n, m, k = int(rng.integers(5, 21)), int(rng.integers(3, 9)), 1 + i % 3
        A, B = rng.uniform(0, 100, (n, 2)), rng.uniform(0, 100, (m, 2))
        _, sol, _ = solve_foci_selection(A, B, k)
        _, best = select_foci_brute_force(A, B, k)
        worst = max(worst, abs(sol.r - best.r) / best.r)
    ok = worst <= 1e-5
    report("criterion 7 foci selection exactness", ok,
           f"10 instances, worst relative error {worst:.2e}")
    assert ok


def test_criterion_8_ordered_median(report):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20):
        n, k, d = int(rng.integers(2, 30)), int(rng.integers(1, 6)), int(rng.integers(2, 4))
        w = rng.uniform(0.1, 1, k)
        inst = Instance(rng.uniform(0, 100, (n, d)), rng.uniform(0, 100, (k, d)), w / w.sum())
        r_om = solve_om(inst, OrderedSpec.sum(k)).r
        r_dir = solve_direct(inst, SolverConfig(tol_r=1e-9)).r
        worst = max(worst, abs(r_om - r_dir) / r_dir)
    failures = 0
    for k in range(1, 8):
        for _ in range(1000):
            c = rng.exponential(1, k)
            lam = np.sort(rng.uniform(0, 1, k))[::-1]
            failures += not om_rearrangement_check(c, lam)
    ok = worst <= 1e-5 and failures == 0
    report("criterion 8 ordered-median reductions", ok,
           f"20 instances, worst relative error {worst:.2e}; "
           f"rearrangement failures {failures}/7000")
    assert ok


def test_criterion_9_property_suites(report):
    results = {name: check() for name, check in properties.ALL.items()}
    failed = [name for name, (ok, _) in results.items() if not ok]
    detail = "; ".join(f"{name}: {msg}" for name, (_, msg) in results.items())
    ok = not failed
    report("criterion 9 property suites", ok,
           detail if ok else f"failed {failed}; {detail}")
    assert ok


def test_criterion_10_determinism(tmp_path, capsys, report):
    def run_twice(argv, out_name):
        outputs = []
        for rep in range(2):
            path = tmp_path / f"{rep}-{out_name}"
            code = main([*argv, str(path)] if out_name else argv)
            stdout = capsys.readouterr().out
            assert code == 0
            outputs.append(path.read_bytes() if out_name else stdout.encode())
        return outputs[0] == outputs[1]

    inst_path = tmp_path / "inst.json"
    assert main(["generate", "--n", "60", "--k", "4", "--seed", "3", "--weighted",
                 "--out", str(inst_path)]) == 0
    checks = {
        "generate": run_twice(["generate", "--n", "60", "--k", "4", "--seed", "3",
                               "--out"], "g.json"),
        "bench csv": run_twice(["bench", "--n", "30,60", "--k", "1,3", "--norm", "l2,hex",
                                "--seeds", "0,1", "--methods", "direct,lagrangean,decomp",
                                "--weighted", "both", "--out"], "b.csv"),
        "bench csv parallel": run_twice(["bench", "--n", "30", "--k", "1,3", "--jobs", "2",
                                         "--out"], "bp.csv"),
        "svg": run_twice(["solve", str(inst_path), "--plot"], "p.svg"),
        "trace csv": run_twice(["solve", str(inst_path), "--method", "decomp",
                                "--trace"], "t.csv"),
        "solve json": run_twice(["solve", str(inst_path), "--method", "lagrangean"], None),
    }
    ok = all(checks.values())
    report("criterion 10 determinism", ok,
           ", ".join(f"{k} {'identical' if v else 'DIFFERENT'}" for k, v in checks.items()))
    assert ok
