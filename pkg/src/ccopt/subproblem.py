"""Approximate solution of the trust-constrained Gauss-Newton subproblem.

The subproblem at a model point ``x`` is::

    minimize   Δf(x; d) = h(c + J d) + g(x + d) - h(c) - g(x)
    subject to ||d|| <= radius

It is solved with an adaptive primal-dual hybrid gradient iteration on the
saddle form ``min_d max_y <y, c + J d> - h*(y) + g(x + d)``. Every dual point
``y`` in ``dom h*`` gives the certified lower bound::

    <y, c> - h*(y) + inf_{||d|| <= radius} [<J^T y, d> + g(x + d)] - h(c) - g(x)

The solver stops as soon as either the best bound certifies stationarity
(``bound >= -eps``) or the best primal value satisfies the sandwich test
``value <= beta * bound``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import CompositeProblem, ModelState, linearize
from .norms import L2, LINF, NormChoice

__all__ = [
    "L2",
    "LINF",
    "NormChoice",
    "SubproblemStatus",
    "SubproblemSpec",
    "DualCertificate",
    "SubproblemResult",
    "InfeasibleGrid",
    "solve_subproblem",
    "brute_force_subproblem",
    "stationarity_measure",
    "spectral_norm",
]

LINESEARCH_RADIUS_FACTOR = 1e6


class SubproblemStatus(enum.Enum):
    SANDWICH_SATISFIED = "SandwichSatisfied"
    STATIONARY_DETECTED = "StationaryDetected"
    INNER_ITER_LIMIT = "InnerIterLimit"


class InfeasibleGrid(ValueError):
    """No grid point lies in the trust ball intersected with ``dom g``."""


@dataclass(frozen=True)
class SubproblemSpec:
    model: ModelState
    radius: float = math.inf
    norm: NormChoice = L2
    beta_fraction: float = 0.1
    stationarity_tol: float = 1e-8
    max_inner_iters: int = 5000
    check_every: int = 10

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("trust radius must be positive")
        if not 0 < self.beta_fraction < 1:
            raise ValueError("beta_fraction must lie in (0, 1)")
        if self.stationarity_tol < 0:
            raise ValueError("stationarity tolerance must be nonnegative")
        if self.max_inner_iters < 1:
            raise ValueError("max_inner_iters must be positive")

    @property
    def effective_radius(self) -> float:
        """Finite radius actually imposed (large artificial ball when ``radius`` is inf)."""
        if math.isfinite(self.radius):
            return float(self.radius)
        return LINESEARCH_RADIUS_FACTOR * (1.0 + float(np.linalg.norm(self.model.x)))

    def at(self, model: ModelState, radius: float | None = None) -> SubproblemSpec:
        """Same settings at another model point (and optionally radius)."""
        return replace(self, model=model, radius=self.radius if radius is None else radius)


@dataclass(frozen=True)
class DualCertificate:
    lower_bound: float
    dual_point: np.ndarray
    inner_iters: int
    history: tuple = field(default=(), repr=False)


@dataclass(frozen=True)
class SubproblemResult:
    d: np.ndarray
    value: float
    certificate: DualCertificate
    status: SubproblemStatus
    radius: float
    ball_active: bool = False

    @property
    def lower_bound(self) -> float:
        return self.certificate.lower_bound


def spectral_norm(J, iters: int = 50, tol: float = 1e-8) -> float:
    """Largest singular value of ``J`` by power iteration on ``J^T J``."""
    J = np.asarray(J, dtype=float)
    if J.size == 0 or not np.any(J):
        return 0.0
    v = np.ones(J.shape[1]) / math.sqrt(J.shape[1])
    est = 0.0
    for _ in range(iters):
        w = J.T @ (J @ v)
        nrm = np.linalg.norm(w)
        if nrm == 0:
            # start vector in the null space; fall back to a coordinate vector
            v = np.zeros_like(v)
            v[int(np.argmax(np.linalg.norm(J, axis=0)))] = 1.0
            continue
        v = w / nrm
        new = math.sqrt(nrm)
        if abs(new - est) <= tol * new:
            est = new
            break
        est = new
    # the Rayleigh quotient underestimates slightly before convergence
    return max(est, float(np.linalg.norm(J @ v)))


class _Certifier:
    """Evaluates the dual lower bound and the companion primal point."""

    def __init__(self, spec: SubproblemSpec, radius: float):
        m = spec.model
        self.model = m
        self.problem = m.problem
        self.radius = radius
        self.norm = spec.norm
        self.null_proj = None
        self.balance = False
        h = self.problem.h
        J = np.asarray(m.Jx)
        if getattr(h, "contains_zero", False) and hasattr(h, "gauge"):
            self.null_proj = np.eye(J.shape[0]) - J @ np.linalg.pinv(J)
        if J.size and hasattr(h, "face_structure"):
            self.balance = self.problem.g.nearest_subgradient(m.x, np.zeros(J.shape[1])) is not None

    def bound(self, y):
        m = self.model
        hstar = self.problem.h.conjugate(y)
        if not math.isfinite(hstar):
            return -math.inf, None
        lm, d = self.problem.g.restricted_linear_min(m.x, m.Jx.T @ y, self.radius, self.norm)
        yc = float(y @ m.cx)
        # a few ulps of slack keep the bound valid after rounding
        slack = 8 * np.finfo(float).eps * (abs(yc) + abs(hstar) + abs(lm) + abs(m.hx))
        return yc - hstar + lm - m.hx - slack, d

    def candidates(self, y, d):
        yield y
        if self.null_proj is not None:
            yc = self.null_proj @ y
            gauge = self.problem.h.gauge(yc)
            if gauge > 1:
                yc = yc / gauge
            yield yc
        if self.balance:
            yield self._balance(y, d)

    def _balance(self, y, d, sweeps=30):
        # Alternate between {J^T y in -∂g(x + d)} and the face of C exposed by
        # c + J d, taking the affine step inside the face's hull. At an optimal
        # d the two meet in a KKT multiplier; any point of C yields a valid
        # bound, so a wrong face guess only loosens it.
        m, h, g = self.model, self.problem.h, self.problem.g
        J = np.asarray(m.Jx)
        z = m.cx + J @ d
        tol = 1e-9 * (1.0 + float(np.max(np.abs(z), initial=0.0)))
        free, row = h.face_structure(z, tol)
        y = h.project_face(z, y, tol)
        if not np.any(free):
            return y
        A = J[free].T
        if row is not None:
            A = np.vstack([A, row])
        step = np.linalg.pinv(A)
        xd = m.x + d
        for _ in range(sweeps):
            u = J.T @ y
            r = u + g.nearest_subgradient(xd, -u)
            if not np.all(np.isfinite(r)) or np.linalg.norm(r) <= 1e-15 * (1.0 + np.linalg.norm(u)):
                break
            rhs = r if row is None else np.append(r, 0.0)
            y = y.copy()
            y[free] -= step @ rhs
            y = h.project_face(z, y, tol)
        return y


def solve_subproblem(spec: SubproblemSpec) -> SubproblemResult:
    """Solve the trust-constrained linearized subproblem to a certified accuracy.

    Returns the best primal direction found, its model value, the best dual
    lower bound, and a status explaining termination. ``InnerIterLimit`` is
    reported when neither certificate was reached within the iteration cap.
    """
    model = spec.model
    problem = model.problem
    h, g = problem.h, problem.g
    x, cx, J = model.x, model.cx, np.asarray(model.Jx)
    radius = spec.effective_radius
    norm = spec.norm
    beta, eps = spec.beta_fraction, spec.stationarity_tol
    cert = _Certifier(spec, radius)

    best_d = np.zeros_like(x)
    best_val = 0.0
    best_lb = -math.inf
    best_y = h.support_point(cx)
    history = []

    def offer_primal(d):
        nonlocal best_d, best_val
        if norm(d) > radius * (1 + 1e-12):
            return
        val = model.delta(d)
        if val < best_val:
            best_d, best_val = d, val

    def offer_dual(y):
        nonlocal best_lb, best_y
        for yc in cert.candidates(y, best_d):
            lb, d_lin = cert.bound(yc)
            if d_lin is not None:
                offer_primal(d_lin)
            if lb > best_lb:
                best_lb, best_y = lb, yc
        history.append(best_lb)

    def verdict():
        if best_lb >= -eps:
            return SubproblemStatus.STATIONARY_DETECTED
        if best_val <= beta * best_lb:
            return SubproblemStatus.SANDWICH_SATISFIED
        return None

    y = h.support_point(cx)
    offer_dual(y)
    if getattr(h, "contains_zero", False):
        offer_dual(np.zeros_like(cx))
    status = verdict()

    # Gauss-Newton least-squares step: warm start and primal scale estimate
    d_ls = -np.linalg.lstsq(J, cx, rcond=None)[0] if J.size else np.zeros_like(x)
    d = np.zeros_like(x)
    if np.all(np.isfinite(d_ls)) and np.any(d_ls):
        d = g.restricted_prox(x, d_ls, 1e-12 * (1.0 + norm(d_ls)), radius, norm)
        offer_primal(d)
    primal_scale = norm(d_ls) if np.any(d_ls) else min(radius, 1.0 + norm(x))
    primal_scale = min(max(primal_scale, 1e-12), radius)
    dual_scale = max(float(np.linalg.norm(y)), getattr(h, "scale", 1.0))
    ratio = primal_scale / dual_scale

    L = max(spectral_norm(J), 1e-12)
    eta = 0.99 / L
    # primal weight omega: tau = eta / omega, sigma = eta * omega
    omega = 1.0 / ratio
    d_anchor, y_anchor = d.copy(), y.copy()
    res_anchor = None
    res_prev = math.inf
    d_bar = d
    it = since = 0
    while status is None and it < spec.max_inner_iters:
        it += 1
        since += 1
        tau, sigma = eta / omega, eta * omega
        y_new = h.prox_conjugate(y + sigma * (J @ d_bar + cx), sigma)
        d_new = g.restricted_prox(x, d - tau * (J.T @ y_new), tau, radius, norm)
        offer_primal(d_new)
        dd, dy = d_new - d, y_new - y
        # fixed-point residual in the omega-weighted norm
        res = math.sqrt(omega * float(dd @ dd) + float(dy @ dy) / omega)
        if res_anchor is None:
            res_anchor = res
        d_bar = 2 * d_new - d
        d, y = d_new, y_new
        if since > 1 and (
            res <= 0.2 * res_anchor
            or (res <= 0.8 * res_anchor and res > res_prev)
            or since >= 0.36 * it
        ):
            dx_n = float(np.linalg.norm(d - d_anchor))
            dy_n = float(np.linalg.norm(y - y_anchor))
            if dx_n > 1e-300 and dy_n > 1e-300:
                omega = math.exp(0.5 * math.log(dy_n / dx_n) + 0.5 * math.log(omega))
            d_anchor, y_anchor = d.copy(), y.copy()
            d_bar = d
            res_anchor, since = None, 0
        res_prev = res
        if it % spec.check_every == 0 or it == spec.max_inner_iters:
            offer_dual(y)
            status = verdict()

    if status is None:
        status = SubproblemStatus.INNER_ITER_LIMIT
    ball_active = (not math.isfinite(spec.radius)) and norm(best_d) >= 0.999 * radius
    return SubproblemResult(
        d=best_d,
        value=best_val,
        certificate=DualCertificate(best_lb, best_y, it, tuple(history)),
        status=status,
        radius=radius,
        ball_active=ball_active,
    )


def brute_force_subproblem(spec: SubproblemSpec, grid_per_axis: int):
    """Exhaustive grid minimum of ``Δf`` over the trust ball intersected with ``dom g``.

    The grid is the tensor product of ``grid_per_axis`` equispaced points on
    ``[-radius, radius]`` per axis; ``d = 0`` is always included. Intended as a
    test oracle for ``n <= 3``.
    """
    model = spec.model
    n = model.x.size
    if n > 3:
        raise ValueError("brute-force oracle supports n <= 3 only")
    if grid_per_axis < 1:
        raise ValueError("grid_per_axis must be positive")
    if not math.isfinite(spec.radius):
        raise ValueError("brute-force oracle needs a finite radius")
    r = float(spec.radius)
    axis = np.linspace(-r, r, grid_per_axis)
    D = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1).reshape(-1, n)
    D = np.vstack([np.zeros((1, n)), D])
    if spec.norm.kind == "l2":
        D = D[np.linalg.norm(D, axis=1) <= r * (1 + 1e-12)]
    problem = model.problem
    gvals = problem.g.batch(model.x + D)
    ok = np.isfinite(gvals)
    if not np.any(ok):
        raise InfeasibleGrid("no grid point lies in dom g")
    D, gvals = D[ok], gvals[ok]
    vals = problem.h.batch(model.cx + D @ np.asarray(model.Jx).T) + gvals - model.hx - model.gx
    i = int(np.argmin(vals))
    return D[i].copy(), float(vals[i])


def stationarity_measure(
    problem: CompositeProblem,
    x,
    tol: float = 1e-8,
    *,
    norm: NormChoice = L2,
    beta_fraction: float = 0.5,
    max_inner_iters: int = 5000,
) -> float:
    """Estimate ``|inf_{||d|| <= 1} Δf(x; d)|``.

    Returns the magnitude of the midpoint of the certified bracket
    ``[lower bound, value]`` of the unit-ball subproblem. When stationarity is
    certified the result is at most ``tol / 2``.
    """
    model = linearize(problem, x)
    res = solve_subproblem(
        SubproblemSpec(model, 1.0, norm, beta_fraction, tol, max_inner_iters)
    )
    return abs(0.5 * (res.lower_bound + res.value))
