import math

import numpy as np
import pytest

from ccopt import (
    L2,
    LINF,
    BoxIndicator,
    CompositeProblem,
    L1Norm,
    ScalarIdentity,
    SmoothMap,
    SubproblemSpec,
    SubproblemStatus,
    Zero,
    brute_force_subproblem,
    linearize,
    solve_subproblem,
    stationarity_measure,
)
from ccopt.problems import get_entry, load_catalog
from ccopt.subproblem import InfeasibleGrid, spectral_norm

from .conftest import G_KINDS, H_KINDS, random_problem


def one_dim_l1():
    return linearize(CompositeProblem(SmoothMap.linear([[1.0]]), L1Norm(), Zero()), [1.0])


def test_spec_validation():
    m = one_dim_l1()
    with pytest.raises(ValueError):
        SubproblemSpec(m, radius=0.0)
    with pytest.raises(ValueError):
        SubproblemSpec(m, beta_fraction=1.0)
    with pytest.raises(ValueError):
        SubproblemSpec(m, max_inner_iters=0)


def test_stationary_at_rosenbrock_minimizer():
    m = linearize(get_entry("rosenbrock_l1").problem, [1.0, 1.0])
    res = solve_subproblem(SubproblemSpec(m, 1.0))
    assert res.status is SubproblemStatus.STATIONARY_DETECTED
    assert res.lower_bound >= -1e-8
    assert np.linalg.norm(res.d) <= 1e-8


@pytest.mark.parametrize("radius, optimum", [(2.0, -1.0), (0.5, -0.5)])
def test_one_dimensional_examples(radius, optimum):
    res = solve_subproblem(SubproblemSpec(one_dim_l1(), radius, beta_fraction=0.5))
    assert res.status is SubproblemStatus.SANDWICH_SATISFIED
    assert res.value <= 0.5 * res.lower_bound
    assert res.value <= 0.5 * optimum
    assert res.lower_bound <= optimum + 1e-12


def test_brute_force_examples():
    m = one_dim_l1()
    d, val = brute_force_subproblem(SubproblemSpec(m, 2.0), 4001)
    assert val == pytest.approx(-1.0, abs=1e-3)
    # d = 0 is always on the grid
    mq = linearize(CompositeProblem(SmoothMap.linear([[1.0]]), L1Norm(), Zero()), [0.0])
    assert brute_force_subproblem(SubproblemSpec(mq, 1.0), 4)[1] <= 0.0
    with pytest.raises(ValueError):
        brute_force_subproblem(SubproblemSpec(linearize(_four_dim(), np.zeros(4)), 1.0), 3)


def _four_dim():
    return CompositeProblem(SmoothMap.linear(np.eye(4)), L1Norm(), Zero())


def test_brute_force_infeasible_grid():
    # x on the box edge; a 2-point grid {-r, r} plus 0 -- drop 0 by using a
    # regularizer whose domain excludes x + grid points only
    class Only(BoxIndicator):
        def batch(self, X):
            return np.full(len(X), math.inf)

    p = CompositeProblem(SmoothMap.linear([[1.0]]), L1Norm(), Only([0.0], [1.0]))
    m = linearize(p, [0.5])
    with pytest.raises(InfeasibleGrid):
        brute_force_subproblem(SubproblemSpec(m, 1.0), 5)


def test_stationarity_measure_examples():
    sq = CompositeProblem(
        SmoothMap(2, 1, lambda x: np.array([0.5 * x @ x]), lambda x: x.reshape(1, -1)), ScalarIdentity(), Zero()
    )
    assert stationarity_measure(sq, [0.0, 0.0]) <= 1e-8
    assert stationarity_measure(sq, [1.0, 0.0]) == pytest.approx(1.0, rel=1e-6)
    assert stationarity_measure(get_entry("rosenbrock_l1").problem, [1.0, 1.0]) <= 1e-6


def test_stationarity_measure_small_iff_stationary():
    sq = CompositeProblem(
        SmoothMap(1, 1, lambda x: np.array([0.5 * x @ x]), lambda x: x.reshape(1, -1)), ScalarIdentity(), Zero()
    )
    tol = 1e-6
    for x in (0.0, 1e-8, 5e-7, 2e-6, 1e-3):
        res = solve_subproblem(SubproblemSpec(linearize(sq, [x]), 1.0, beta_fraction=0.5, stationarity_tol=tol))
        meas = stationarity_measure(sq, [x], tol)
        assert (meas <= tol) == (res.status is SubproblemStatus.STATIONARY_DETECTED)


def test_spectral_norm_matches_svd(rng):
    for _ in range(20):
        J = rng.normal(size=(rng.integers(1, 6), rng.integers(1, 6)))
        assert spectral_norm(J) == pytest.approx(np.linalg.norm(J, 2), rel=1e-6)
    assert spectral_norm(np.zeros((2, 2))) == 0.0


def _battery(rng, count, h_kinds=H_KINDS, g_kinds=G_KINDS):
    out = []
    for i in range(count):
        problem, x = random_problem(rng, h_kinds[i % len(h_kinds)], g_kinds[(i // len(h_kinds)) % len(g_kinds)])
        out.append((linearize(problem, x), rng.uniform(0.2, 2.0)))
    return out


@pytest.mark.parametrize("norm", [L2, LINF], ids=["l2", "linf"])
def test_certificates_and_feasibility_on_battery(norm, rng):
    for m, radius in _battery(rng, 50):
        spec = SubproblemSpec(m, radius, norm, beta_fraction=0.5)
        res = solve_subproblem(spec)
        assert norm(res.d) <= radius + 1e-12
        assert math.isfinite(res.value) and res.value <= 0.0
        assert res.value == m.delta(res.d)
        hist = res.certificate.history
        assert all(a <= b for a, b in zip(hist, hist[1:]))
        assert res.lower_bound == hist[-1]
        assert res.lower_bound <= res.value
        if res.status is SubproblemStatus.SANDWICH_SATISFIED:
            assert res.value <= spec.beta_fraction * res.lower_bound
        elif res.status is SubproblemStatus.STATIONARY_DETECTED:
            assert res.lower_bound >= -spec.stationarity_tol
        _, grid = brute_force_subproblem(spec, 81)
        lip = m.problem.h.lipschitz_for(m.cx.size) * np.linalg.norm(m.Jx, 2) + np.sum(
            np.abs(getattr(m.problem.g, "weights", 0.0))
        )
        grid_err = lip * (2 * radius / 80) * math.sqrt(2)
        assert res.lower_bound <= grid + grid_err


def test_line_search_mode_uses_large_ball():
    p = get_entry("unbounded_linear").problem
    m = linearize(p, [0.0])
    res = solve_subproblem(SubproblemSpec(m))
    assert res.radius == pytest.approx(1e6)
    assert res.ball_active
    assert res.value == pytest.approx(-1e6)


def test_catalog_lower_bounds_below_grid():
    for entry in load_catalog():
        if entry.problem.n > 2:
            continue
        m = linearize(entry.problem, entry.x0)
        spec = SubproblemSpec(m, 1.0)
        res = solve_subproblem(spec)
        _, grid = brute_force_subproblem(spec, 201)
        assert res.lower_bound <= grid + 1e-12
