"""Random composite instances shared across the test modules."""

import math
import sys

import numpy as np
import pytest

from ccopt import (
    BallIndicator,
    BoxIndicator,
    CompositeProblem,
    L1Norm,
    L2Norm,
    LInfNorm,
    MaxCoordinate,
    ScalarIdentity,
    SmoothMap,
    WeightedL1,
    Zero,
)

H_KINDS = ("l1", "l2", "linf", "max", "identity")
G_KINDS = ("zero", "weighted_l1", "box", "ball_l2", "ball_linf")


def make_h(kind, scale=1.0):
    return {
        "l1": L1Norm,
        "l2": L2Norm,
        "linf": LInfNorm,
        "max": MaxCoordinate,
        "identity": ScalarIdentity,
    }[kind](scale)


def make_g(kind, n, rng):
    if kind == "zero":
        return Zero()
    if kind == "weighted_l1":
        return WeightedL1(rng.uniform(0.0, 1.0, n))
    if kind == "box":
        lo = -rng.uniform(0.2, 1.5, n)
        return BoxIndicator(lo, lo + rng.uniform(0.5, 3.0, n))
    if kind == "ball_l2":
        return BallIndicator(rng.normal(0, 0.3, n), rng.uniform(0.5, 2.0), "l2")
    if kind == "ball_linf":
        return BallIndicator(rng.normal(0, 0.3, n), rng.uniform(0.5, 2.0), "linf")
    raise ValueError(kind)


def point_in_domain(g, n, rng):
    """A random point of dom g (rejection from a shrinking cloud)."""
    center = getattr(g, "center", None)
    if center is None and isinstance(g, BoxIndicator):
        center = 0.5 * (g.lower + g.upper)
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    spread = 1.0
    while True:
        x = center + rng.uniform(-spread, spread, n)
        if math.isfinite(g(x)):
            return x
        spread *= 0.7


def random_smooth_map(n, m, rng, nonlinear=0.5):
    """``c(x) = A x + b + nonlinear * sin(B x)`` with its exact Jacobian."""
    A = rng.normal(size=(m, n))
    b = rng.normal(size=m)
    B = rng.normal(size=(m, n))

    def ev(x):
        return A @ x + b + nonlinear * np.sin(B @ x)

    def jac(x):
        return A + nonlinear * np.cos(B @ x)[:, None] * B

    return SmoothMap(n, m, ev, jac)


def random_problem(rng, h_kind, g_kind, n=2, m=3, scale=None):
    if h_kind == "identity":
        m = 1
    scale = rng.uniform(0.5, 2.0) if scale is None else scale
    h = make_h(h_kind, scale)
    g = make_g(g_kind, n, rng)
    problem = CompositeProblem(random_smooth_map(n, m, rng), h, g, f"{h_kind}+{g_kind}")
    return problem, point_in_domain(g, n, rng)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        verdict, title = results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {title}")
