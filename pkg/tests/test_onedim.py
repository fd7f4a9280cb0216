import numpy as np
import pytest

import properties
from oracles import pl_sum, radius_1d
from polyellipsoid import Instance, SolverConfig, solve_direct
from polyellipsoid.onedim import (Interval1D, polyellipse_interval, solve_1d,
                                  valid_pairs, weber_1d)


def covers(A, U, w, x, r, tol=1e-9):
    A, U = np.asarray(A, float), np.asarray(U, float)
    return (pl_sum(A - x, U, np.asarray(w, float)) <= r + tol * max(1, r)).all()


def test_interval_examples():
    I = polyellipse_interval([0, 10], [0.5, 0.5], 5)
    assert (I.lo, I.hi) == pytest.approx((0, 10))
    I = polyellipse_interval([0, 10], [0.5, 0.5], 6)
    assert (I.lo, I.hi) == pytest.approx((-1, 11))
    I = polyellipse_interval([0], [1], 3)
    assert (I.lo, I.hi) == pytest.approx((-3, 3))
    assert polyellipse_interval([0, 10], [0.5, 0.5], 4.9).is_empty


def test_interval_type():
    I = Interval1D(1, 3)
    assert 2 in I and 4 not in I and I.length == 2
    assert Interval1D.empty().is_empty and Interval1D.empty().length == 0
    assert I.contains_interval(Interval1D(1.5, 2.5))
    assert I.contains_interval(Interval1D.empty())


def test_solve_examples():
    x, r = solve_1d([0, 10], [0], [1])
    assert (x, r) == pytest.approx((5, 5))
    res = solve_1d([0, 10], [0, 1], [0.5, 0.5])
    assert (res.x, res.r) == pytest.approx((4.5, 5))
    assert res.branch == "explicit"
    res = solve_1d([0, 1], [0, 10], [0.5, 0.5])
    assert res.r == pytest.approx(5)
    assert -9 <= res.x <= 0
    assert covers([0, 1], [0, 10], [0.5, 0.5], res.x, res.r)


def test_single_demand_point():
    res = solve_1d([3.0], [0, 1, 5], [0.2, 0.5, 0.3])
    assert res.r == pytest.approx(weber_1d([0, 1, 5], [0.2, 0.5, 0.3])[2])
    assert covers([3.0], [0, 1, 5], [0.2, 0.5, 0.3], res.x, res.r)


def test_foci_range_inside_demand_range_is_not_enough():
    # range(U) <= range(A) here, yet the half-range formula (r = 5) fails
    U, w, A = [0, 1, 10], np.full(3, 1 / 3), [0, 10]
    res = solve_1d(A, U, w)
    assert res.r == pytest.approx(17 / 3)
    assert radius_1d(A, U, w)[1] == pytest.approx(17 / 3)
    assert res.branch == "pairs"


def test_unsorted_input():
    a = solve_1d([5, 0, 3], [2, -1], [0.3, 0.7])
    b = solve_1d([0, 3, 5], [-1, 2], [0.7, 0.3])
    assert a.r == pytest.approx(b.r)


@pytest.mark.parametrize("seed", range(5))
def test_against_breakpoint_oracle(seed):
    rng = np.random.default_rng(seed)
    for _ in range(40):
        n, k = int(rng.integers(1, 20)), int(rng.integers(1, 10))
        A = rng.uniform(-50, 50, n) * rng.uniform(0.01, 1)
        U = rng.uniform(-50, 50, k)
        w = rng.uniform(0.1, 1, k)
        w /= w.sum()
        res = solve_1d(A, U, w)
        assert res.r == pytest.approx(radius_1d(A, U, w)[1], rel=1e-10, abs=1e-10)
        assert covers(A, U, w, res.x, res.r)


def test_against_direct_solver():
    rng = np.random.default_rng(20)
    for _ in range(20):
        A = rng.uniform(0, 100, (int(rng.integers(1, 30)), 1))
        U = rng.uniform(0, 100, (int(rng.integers(1, 8)), 1))
        inst = Instance(A, U)
        r = solve_direct(inst, SolverConfig(tol_r=1e-9)).r
        assert solve_1d(A, U).r == pytest.approx(r, rel=1e-7)


def test_unique_valid_pair():
    rng = np.random.default_rng(21)
    seen = 0
    for _ in range(300):
        k = int(rng.integers(2, 12))
        U = rng.uniform(0, 100, k)
        w = rng.uniform(0.1, 1, k)
        w /= w.sum()
        A = [0.0, rng.uniform(1, 100)]
        res = solve_1d(A, U, w)
        if res.branch == "pairs":
            seen += 1
            assert valid_pairs(A, U, w) == [res.pair]
    assert seen > 20


def test_weber_1d():
    m0, m1, r = weber_1d([0, 10], [0.5, 0.5])
    assert (m0, m1, r) == pytest.approx((0, 10, 5))
    m0, m1, r = weber_1d([0, 1, 5], [0.2, 0.5, 0.3])
    assert m0 == m1 == 1 and r == pytest.approx(0.2 + 1.2)


def test_interval_properties():
    ok, detail = properties.interval_nesting()
    assert ok, detail
