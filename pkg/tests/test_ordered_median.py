import numpy as np
import pytest

from oracles import grid_min
from polyellipsoid import Instance, NormSpec, SolverConfig, norm_eval, phi_all, solve_direct
from polyellipsoid.ordered_median import (OrderedSpec, om_rearrangement_check,
                                          om_subgradient, om_value, om_values,
                                          solve_om)

THREE_FOCI = np.array([[-1, 5], [2, 3], [-5, 0]])


def three_distances():
    # a - u - x gives distances (3, 1, 2) along the first axis
    return Instance([[0, 0]], [[-3, 0], [-1, 0], [-2, 0]], np.full(3, 1 / 3))


def test_value_examples():
    inst = three_distances()
    # unit weights: rescale the normalized ones
    for lam, expected in (((1, 1, 1), 6), ((1, 0, 0), 3), ((1, 0.5, 0), 4)):
        assert 3 * om_value(inst, OrderedSpec(lam), [0, 0], 0) == pytest.approx(expected)


def test_value_index_error():
    with pytest.raises(IndexError):
        om_value(three_distances(), OrderedSpec.sum(3), [0, 0], 1)


def test_spec_validation():
    with pytest.raises(ValueError):
        OrderedSpec([0, 1])
    with pytest.raises(ValueError):
        OrderedSpec([1, -0.5])
    with pytest.raises(ValueError):
        OrderedSpec([])
    with pytest.raises(ValueError):
        om_values(three_distances(), OrderedSpec([1, 1]), [0, 0])


def random_instance(rng, n=6, k=3, norm=None):
    w = rng.uniform(0.1, 1, k)
    return Instance(rng.uniform(0, 10, (n, 2)), rng.uniform(0, 10, (k, 2)),
                    w / w.sum(), norm or NormSpec.lp(2))


def random_lambda(rng, k):
    return OrderedSpec(np.sort(rng.uniform(0, 1, k))[::-1])


def test_reductions():
    rng = np.random.default_rng(0)
    for _ in range(50):
        inst = random_instance(rng)
        x = rng.normal(size=2) * 5
        np.testing.assert_allclose(om_values(inst, OrderedSpec.sum(3), x), phi_all(inst, x))
        c = norm_eval(inst.norm, inst.offsets() - x) * inst.foci_weights
        np.testing.assert_allclose(om_values(inst, OrderedSpec.center(3), x), c.max(axis=1))


def test_sum_subgradient_matches_phi():
    rng = np.random.default_rng(1)
    inst = random_instance(rng)
    x = rng.normal(size=2)
    g = om_subgradient(inst, OrderedSpec.sum(3), x, 2)
    v = inst.demand[2] - inst.foci - x
    expected = -(inst.foci_weights @ (v / np.linalg.norm(v, axis=1)[:, None]))
    np.testing.assert_allclose(g, expected)


def test_single_focus_subgradient():
    inst = Instance([[3, 4]], [[0, 0]])
    g = om_subgradient(inst, OrderedSpec([2.0]), [0, 0], 0)
    np.testing.assert_allclose(g, [-1.2, -1.6])


def test_subgradient_inequality_and_convexity():
    rng = np.random.default_rng(2)
    worst_sub, worst_cvx = -np.inf, -np.inf
    for i in range(1000):
        inst = random_instance(rng, n=1, k=4,
                               norm=[NormSpec.lp(2), NormSpec.lp(1), NormSpec.hex()][i % 3])
        spec = random_lambda(rng, 4)
        x, y = rng.uniform(-10, 20, (2, 2))
        fx, fy = om_value(inst, spec, x, 0), om_value(inst, spec, y, 0)
        g = om_subgradient(inst, spec, x, 0)
        worst_sub = max(worst_sub, fx + g @ (y - x) - fy)
        t = rng.uniform()
        worst_cvx = max(worst_cvx, om_value(inst, spec, t * x + (1 - t) * y, 0)
                        - t * fx - (1 - t) * fy)
    assert worst_sub <= 1e-9 and worst_cvx <= 1e-9


def test_lambda_monotonicity():
    rng = np.random.default_rng(3)
    for _ in range(200):
        inst = random_instance(rng, k=4)
        lam = np.sort(rng.uniform(0, 1, 4))[::-1]
        bigger = np.sort(lam + rng.uniform(0, 1, 4))[::-1]
        bigger = np.maximum(bigger, lam)
        x = rng.normal(size=2)
        assert (om_values(inst, OrderedSpec(lam), x)
                <= om_values(inst, OrderedSpec(bigger), x) + 1e-12).all()


def test_rearrangement_examples():
    assert om_rearrangement_check([3, 1, 2], [1, 0.5, 0])
    assert om_rearrangement_check([4.0], [0.3])
    assert om_rearrangement_check([2, 2, 2, 2], [1, 0.7, 0.2, 0])
    with pytest.raises(ValueError):
        om_rearrangement_check([1, 2], [1])


def test_solve_sum_matches_direct():
    rng = np.random.default_rng(4)
    for _ in range(3):
        inst = random_instance(rng, n=10)
        ref = solve_direct(inst, SolverConfig(tol_r=1e-9)).r
        sol = solve_om(inst, OrderedSpec.sum(3))
        assert sol.r == pytest.approx(ref, rel=1e-5)


def test_solve_center_single_point():
    # lambda = e1 and one demand point: weighted 1-centre of the reflected foci
    inst = Instance([[3, 4]], THREE_FOCI, [0.5, 0.3, 0.2])
    sol = solve_om(inst, OrderedSpec.center(3))
    f = lambda z: (np.linalg.norm(inst.demand[0] - inst.foci - z[..., None, :], axis=-1)
                   * inst.foci_weights).max(axis=-1)
    z, best = grid_min(f, [0, -5], [10, 5], 2000)
    _, best = grid_min(f, z - 0.01, z + 0.01, 400)
    assert sol.r == pytest.approx(best, rel=1e-4)
    assert sol.r <= best * (1 + 1e-7)


def test_sum_and_max_radii_differ():
    rng = np.random.default_rng(5)
    inst = Instance(rng.uniform(-5, 5, (8, 2)), THREE_FOCI)
    r_sum = solve_om(inst, OrderedSpec.sum(3)).r
    r_max = solve_om(inst, OrderedSpec.center(3)).r
    # the max of three weighted distances is at most their sum
    assert r_max < r_sum
    ref = solve_direct(inst, SolverConfig(tol_r=1e-9)).r
    assert r_sum == pytest.approx(ref, rel=1e-5)


def test_max_value_single_point():
    # frozen from a dense grid search of max_i ||a - u_i - x|| / 3
    inst = Instance([[3, 4]], THREE_FOCI)
    sol = solve_om(inst, OrderedSpec.center(3))
    assert sol.r == pytest.approx(1.26929552, rel=1e-6)


def test_solve_om_one_dimensional():
    inst = Instance([[0.0], [4.0], [9.0]], [[0.0], [2.0]])
    sol = solve_om(inst, OrderedSpec([1.0, 0.5]))
    xs = np.linspace(-20, 20, 400001)
    vals = np.max([np.sort(np.abs(a - inst.foci[:, 0] - xs[:, None]) / 2, axis=1)[:, ::-1]
                   @ [1.0, 0.5] for a in inst.demand[:, 0]], axis=0)
    assert sol.r == pytest.approx(vals.min(), rel=1e-6)
