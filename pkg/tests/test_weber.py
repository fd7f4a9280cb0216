import math

import numpy as np
import pytest

from oracles import weber_grid
from polyellipsoid import NormSpec, norm_eval, weber_solve

L2 = NormSpec.lp(2)


def test_two_point_median():
    res = weber_solve([[0, 0], [2, 0]], [0.5, 0.5], L2, tol=1e-9)
    assert res.value == pytest.approx(1, abs=1e-8)


def test_equilateral_triangle():
    P = np.array([[0, 0], [2, 0], [1, math.sqrt(3)]])
    res = weber_solve(P, np.full(3, 1 / 3), L2, tol=1e-10)
    assert res.value == pytest.approx(2 / math.sqrt(3), abs=1e-9)
    np.testing.assert_allclose(res.x, P.mean(axis=0), atol=1e-5)


@pytest.mark.parametrize("spec", [L2, NormSpec.lp(1), NormSpec.hex(), NormSpec.lp(3)],
                         ids=["l2", "l1", "hex", "l3"])
def test_grid_oracle(spec):
    rng = np.random.default_rng(11)
    P = rng.uniform(0, 10, (5, 2))
    w = np.ones(5)
    res = weber_solve(P, w, spec, tol=1e-9)
    _, best = weber_grid(P, w, lambda z: norm_eval(spec, z))
    assert res.value <= best + 1e-9
    if spec is L2:
        assert best - res.value <= 1e-3
    else:
        # the grid minimum is off by at most one half cell in each coordinate
        cell = (P.max(axis=0) - P.min(axis=0)) / 2000
        assert best - res.value <= w.sum() * norm_eval(spec, cell / 2) + 1e-9


def test_translation_equivariance():
    rng = np.random.default_rng(12)
    P, w = rng.uniform(0, 10, (7, 2)), rng.uniform(0.1, 1, 7)
    c = np.array([123.0, -45.0])
    a = weber_solve(P, w, L2, tol=1e-10)
    b = weber_solve(P + c, w, L2, tol=1e-10)
    assert abs(a.value - b.value) <= 1e-9


def test_zero_weights_dropped():
    res = weber_solve([[0, 0], [2, 0], [100, 100]], [0.5, 0.5, 0.0], L2, tol=1e-9)
    assert res.value == pytest.approx(1, abs=1e-8)


def test_inside_bounding_box():
    rng = np.random.default_rng(13)
    for _ in range(20):
        P = rng.uniform(0, 10, (6, 2))
        res = weber_solve(P, rng.uniform(0.1, 1, 6), L2, tol=1e-8)
        assert (res.x >= P.min(axis=0) - 1e-6).all()
        assert (res.x <= P.max(axis=0) + 1e-6).all()


def test_errors():
    with pytest.raises(ValueError):
        weber_solve([[0, 0]], [0.0], L2)
    with pytest.raises(ValueError):
        weber_solve([[0, 0]], [1.0], L2, tol=0)
    with pytest.raises(ValueError):
        weber_solve([[0, 0], [1, 1]], [1.0], L2)


def test_single_point():
    res = weber_solve([[3, 4]], [2.0], L2)
    assert res.value == 0 and res.converged
    np.testing.assert_array_equal(res.x, [3, 4])
