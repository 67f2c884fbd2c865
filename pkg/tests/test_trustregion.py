import math

import numpy as np
import pytest

from ccopt import (
    L2,
    LINF,
    CompositeProblem,
    HessianModel,
    LipschitzData,
    ScalarIdentity,
    SmoothMap,
    Stopping,
    SubproblemOptions,
    SufficientDecreaseParams,
    TerminationReason,
    TRConfig,
    Zero,
    cauchy_step,
    linearize,
    lipschitz_delta_bound,
    radius_update,
    run_trust_region,
    stationarity_measure,
    sufficient_decrease_holds,
    tr_ratio,
)
from ccopt.problems import get_entry, load_catalog
from ccopt.trustregion import RadiusCollapse, StationaryPointError, cauchy_t_hat


def half_square():
    return CompositeProblem(
        SmoothMap(1, 1, lambda x: np.array([0.5 * x[0] ** 2]), lambda x: np.array([[x[0]]])), ScalarIdentity(), Zero()
    )


# -- configuration ----------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(gamma1=0.6, gamma2=0.5),
        dict(gamma2=1.0),
        dict(gamma3=0.9),
        dict(beta1=0.3, beta2=0.25),
        dict(beta2=0.75, beta3=0.75),
        dict(delta0=0.0),
    ],
)
def test_trconfig_validation(kwargs):
    with pytest.raises(ValueError):
        TRConfig(**kwargs)


def test_hessian_model_validation():
    with pytest.raises(ValueError):
        HessianModel("callback", np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        HessianModel.scaled_identity(2, -1.0)
    assert HessianModel.zero(3).is_zero
    assert HessianModel.scaled_identity(2, 3.0).norm2 == 3.0


def test_sufficient_decrease_params_validation():
    with pytest.raises(ValueError):
        SufficientDecreaseParams(0.0, 1.0)


# -- Cauchy step ------------------------------------------------------------


def test_cauchy_t_hat_examples():
    assert cauchy_t_hat(-1.0, 0.0, 0.3) == 0.3
    assert cauchy_t_hat(-1.0, 0.0, 5.0) == 1.0
    assert cauchy_t_hat(-1.0, 4.0, 2.0) == 0.25
    assert cauchy_t_hat(-1.0, 4.0, 0.1) == 0.1


def test_cauchy_step_with_zero_hessian():
    m = linearize(get_entry("rosenbrock_l1").problem, [-1.2, 1.0])
    step = cauchy_step(m, 0.5, HessianModel.zero(2), L2)
    assert step.t_hat == 0.5
    assert step.model_decrease == pytest.approx(m.delta(step.d))


def test_cauchy_step_at_stationary_point():
    m = linearize(get_entry("rosenbrock_l1").problem, [1.0, 1.0])
    with pytest.raises(StationaryPointError):
        cauchy_step(m, 1.0, HessianModel.zero(2), L2)


@pytest.mark.parametrize("norm", [L2, LINF], ids=["l2", "linf"])
def test_cauchy_step_satisfies_sufficient_decrease(norm, rng):
    sub = SubproblemOptions(norm=norm, beta_fraction=0.5)
    for entry in load_catalog():
        if entry.name == "unbounded_linear":
            continue
        m = linearize(entry.problem, entry.x0)
        n = m.x.size
        for H in (HessianModel.zero(n), HessianModel.scaled_identity(n, rng.uniform(0.5, 5.0))):
            delta = rng.uniform(0.05, 2.0)
            step = cauchy_step(m, delta, H, norm, sub)
            assert norm(step.d) <= delta * (1 + 1e-12)
            alpha = abs(step.model_decrease / step.t_hat) if step.t_hat else 0
            dc1 = -stationarity_measure(entry.problem, m.x, norm=norm)
            curv = norm.sigma(n) ** 2 * H.norm2
            kappa2 = min(1.0, abs(dc1) / curv) if curv else 1.0
            params = SufficientDecreaseParams(0.5 * abs(dc1) * 0.99, kappa2)
            assert alpha > 0
            assert sufficient_decrease_holds(step.d, m, H, delta, params), entry.name


def test_sufficient_decrease_examples():
    m = linearize(half_square(), [1.0])
    H = HessianModel.zero(1)
    assert not sufficient_decrease_holds(np.zeros(1), m, H, 1.0, SufficientDecreaseParams(0.1, 1.0))
    assert not sufficient_decrease_holds(np.array([-1.0]), m, H, 1.0, SufficientDecreaseParams(1e9, 1.0))
    assert sufficient_decrease_holds(np.array([-1.0]), m, H, 1.0, SufficientDecreaseParams(0.5, 1.0))


# -- ratio and radius -------------------------------------------------------


def test_ratio_examples():
    m = linearize(half_square(), [1.0])
    H = HessianModel.zero(1)
    assert tr_ratio(m, [-1.0], H, 0.0) == 0.5
    lin = linearize(CompositeProblem(SmoothMap.linear([[2.0]]), ScalarIdentity(), Zero()), [1.0])
    assert tr_ratio(lin, [-0.5], H, lin.problem.f([0.5])) == 1.0
    assert tr_ratio(m, [-1.0], H, math.inf) == -math.inf
    with pytest.raises(ValueError):
        tr_ratio(m, [1.0], H, 2.0)


def test_radius_update_examples():
    cfg = TRConfig()
    assert radius_update(0.9, 1.0, cfg) == 2.0
    assert radius_update(0.5, 1.0, cfg) == 1.0
    assert radius_update(0.01, 1.0, cfg) == 0.25
    assert radius_update(0.75, 1.0, cfg) == 1.0
    assert radius_update(0.25, 1.0, cfg) == 1.0
    with pytest.raises(RadiusCollapse):
        radius_update(-1.0, 2e-14, cfg)
    with pytest.raises(ValueError):
        radius_update(0.5, 0.0, cfg)


def test_lipschitz_delta_bound_examples():
    assert lipschitz_delta_bound(LipschitzData(), 3.0) == 0.0
    assert lipschitz_delta_bound(LipschitzData(2.0, 3.0, 1.0, 4.0), 1.0) == 15.0
    assert lipschitz_delta_bound(LipschitzData(2.0, 3.0, 1.0, 4.0), 0.0) == 12.0
    with pytest.raises(ValueError):
        LipschitzData(L_c=-1.0)


def test_lipschitz_diagnostic_on_sincos(rng):
    entry = get_entry("sincos_l1")
    L = lipschitz_delta_bound(entry.lipschitz, 1.0)
    for _ in range(10):
        x, y = rng.uniform(-2, 2, 2), rng.uniform(-2, 2, 2)
        sx = stationarity_measure(entry.problem, x)
        sy = stationarity_measure(entry.problem, y)
        assert abs(sx - sy) <= L * np.linalg.norm(x - y) + 1e-6


def test_ratio_at_least_beta2_for_small_steps():
    # f = 0.5|x|^2 via h = identity: f(x+d) - f(x) = <x,d> + |d|^2/2, so the
    # ratio is 1 - |d|^2 / (2 |<x,d>|) -> 1 as the step shrinks
    p = get_entry("smooth_quadratic").problem
    m = linearize(p, [1.0, 0.0])
    H = HessianModel.zero(2)
    for delta in (0.5, 0.1, 0.01):
        d = np.array([-delta, 0.0])
        assert tr_ratio(m, d, H, p.f(m.x + d)) >= TRConfig().beta2


# -- driver -----------------------------------------------------------------


def test_driver_rosenbrock():
    entry = get_entry("rosenbrock_l1")
    trace, reason = run_trust_region(entry.problem, entry.x0)
    assert reason is TerminationReason.STATIONARY
    assert trace.final.f <= 1e-6


def test_driver_starts_at_minimizer():
    trace, reason = run_trust_region(get_entry("rosenbrock_l1").problem, [1.0, 1.0])
    assert reason is TerminationReason.STATIONARY and trace.final.k == 0


def test_driver_unbounded():
    trace, reason = run_trust_region(get_entry("unbounded_linear").problem, [0.0])
    assert reason is TerminationReason.OBJECTIVE_DIVERGING


def test_driver_max_iters_with_identity_hessian():
    entry = get_entry("rosenbrock_l1")
    H = HessianModel.scaled_identity(2, 1.0)
    trace, reason = run_trust_region(entry.problem, entry.x0, H_policy=H, stopping=Stopping(max_iters=5))
    assert reason is TerminationReason.MAX_ITERS and trace.final.k == 5


def _check_discipline(entry, H, cfg=TRConfig(), stopping=None):
    seen = []

    def monitor(k, x, Hk):
        seen.append((x.tobytes(), Hk.current.tobytes(), Hk))

    trace, reason = run_trust_region(entry.problem, entry.x0, cfg, H, stopping=stopping, monitor=monitor)
    recs = trace.records
    f = [r.f for r in recs]
    assert all(b <= a for a, b in zip(f, f[1:]))
    for prev, nxt, s_prev, s_next in zip(recs, recs[1:], seen, seen[1:]):
        r, delta, new = prev.ratio, prev.step_or_radius, nxt.step_or_radius
        if not prev.accepted:
            assert r < cfg.beta1
            assert s_prev[0] == s_next[0] and s_prev[1] == s_next[1] and s_prev[2] is s_next[2]
        else:
            assert nxt.f < prev.f
        if r > cfg.beta3:
            assert delta <= new <= cfg.gamma3 * delta
        elif r >= cfg.beta2:
            assert new == delta
        else:
            assert cfg.gamma1 * delta <= new <= cfg.gamma2 * delta
    return trace, reason


def test_driver_discipline_on_catalog():
    for entry in load_catalog():
        if entry.name == "unbounded_linear":
            continue
        n = entry.problem.n
        _check_discipline(entry, HessianModel.zero(n))
        # pure Cauchy steps converge slowly; 60 iterations exercise both branches
        _check_discipline(entry, HessianModel.scaled_identity(n, 2.0), stopping=Stopping(max_iters=60))


def test_callback_hessian_only_changes_on_acceptance():
    entry = get_entry("rosenbrock_l1")
    calls = []

    def cb(x):
        calls.append(x.copy())
        return np.diag([1.0 + x[0] ** 2, 1.0])

    trace, _ = _check_discipline(entry, HessianModel.from_callback(cb, entry.x0), TRConfig(delta0=5.0))
    accepted = sum(r.accepted for r in trace.records)
    assert len(calls) == accepted + 1
    assert any(not r.accepted for r in trace.records)
