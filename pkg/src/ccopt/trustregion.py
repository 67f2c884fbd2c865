"""Trust-region method driven by Cauchy steps of the unit-ball subproblem.

Steps are compared through the model ``Δf(x; d) + 0.5 d^T H d``; the
quadratic term stays outside the convex subproblem.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .config import Stopping, SubproblemOptions, TRConfig
from .core import CompositeProblem, ModelState, linearize
from .norms import NormChoice
from .subproblem import SubproblemResult, SubproblemStatus, solve_subproblem
from .trace import IterationRecord, IterationTrace, TerminationReason

__all__ = [
    "HessianModel",
    "SufficientDecreaseParams",
    "LipschitzData",
    "CauchyStep",
    "RadiusCollapse",
    "StationaryPointError",
    "cauchy_t_hat",
    "cauchy_step",
    "sufficient_decrease_holds",
    "tr_ratio",
    "radius_update",
    "run_trust_region",
    "lipschitz_delta_bound",
]

log = logging.getLogger(__name__)


class RadiusCollapse(RuntimeError):
    def __init__(self, radius):
        super().__init__(f"trust radius {radius:.3e} fell below the floor")
        self.radius = radius


class StationaryPointError(ValueError):
    """The unit-ball subproblem certified stationarity; no Cauchy step exists."""


@dataclass(frozen=True)
class HessianModel:
    """Policy for the quadratic term ``H_k``.

    ``policy`` is ``"zero"``, ``"identity"`` (``scale * I``) or ``"callback"``
    (``callback(x)`` returns a symmetric matrix).
    """

    policy: str
    current: np.ndarray
    scale: float = 0.0
    callback: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        H = np.asarray(self.current, dtype=float)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError("H must be a square matrix")
        if not np.allclose(H, H.T, rtol=0, atol=1e-12 * (1 + np.abs(H).max(initial=0))):
            raise ValueError("H must be symmetric")
        if not np.all(np.isfinite(H)):
            raise ValueError("H must be finite")

    @classmethod
    def zero(cls, n):
        return cls("zero", np.zeros((n, n)))

    @classmethod
    def scaled_identity(cls, n, scale):
        if scale < 0:
            raise ValueError("scaled-identity Hessian needs scale >= 0")
        return cls("identity", scale * np.eye(n), float(scale))

    @classmethod
    def from_callback(cls, callback, x0):
        return cls("callback", np.asarray(callback(np.asarray(x0, dtype=float)), dtype=float), callback=callback)

    @property
    def is_zero(self) -> bool:
        return not np.any(self.current)

    @property
    def norm2(self) -> float:
        return float(np.linalg.norm(self.current, 2)) if self.current.size else 0.0

    def quad(self, d) -> float:
        return 0.5 * float(d @ self.current @ d)

    def next(self, x) -> HessianModel:
        """``H_{k+1}`` after an accepted step to ``x``."""
        if self.policy != "callback":
            return self
        return HessianModel("callback", np.asarray(self.callback(np.asarray(x)), dtype=float), callback=self.callback)


@dataclass(frozen=True)
class SufficientDecreaseParams:
    kappa1: float
    kappa2: float

    def __post_init__(self):
        if not (self.kappa1 > 0 and self.kappa2 > 0):
            raise ValueError("kappa1 and kappa2 must be positive")


@dataclass(frozen=True)
class LipschitzData:
    L_c: float = 0.0
    L_cprime: float = 0.0
    L_h: float = 0.0
    L_g: float = 0.0

    def __post_init__(self):
        if min(self.L_c, self.L_cprime, self.L_h, self.L_g) < 0:
            raise ValueError("Lipschitz constants must be nonnegative")

    def L_Delta(self, delta: float) -> float:
        return self.L_h * (2 * self.L_c + delta * self.L_cprime) + 2 * self.L_g


def lipschitz_delta_bound(data: LipschitzData, delta: float) -> float:
    """Lipschitz constant of ``x -> inf_{||d|| <= delta} Δf(x; d)``."""
    return data.L_Delta(delta)


class CauchyStep(NamedTuple):
    d: np.ndarray
    t_hat: float
    model_decrease: float


def _as_hessian(H, n) -> HessianModel:
    if isinstance(H, HessianModel):
        return H
    if H is None:
        return HessianModel.zero(n)
    return HessianModel("callback", np.asarray(H, dtype=float))


def cauchy_t_hat(alpha: float, curvature: float, delta: float) -> float:
    """``min(1, delta, -alpha / curvature)`` with ``-alpha / 0 = +inf``."""
    cap = -alpha / curvature if curvature > 0 else math.inf
    return min(1.0, delta, cap)


def cauchy_step(
    model: ModelState,
    delta: float,
    H,
    norm: NormChoice,
    sub_spec: SubproblemOptions | None = None,
    unit: SubproblemResult | None = None,
) -> CauchyStep:
    """Scaled unit-ball subproblem step ``t_hat * d_hat``.

    ``unit`` may carry an already solved unit-ball subproblem at ``model``;
    otherwise one is solved with the ``sub_spec`` settings.
    """
    n = model.x.size
    H = _as_hessian(H, n)
    if unit is None:
        sub_spec = sub_spec or SubproblemOptions(norm=norm)
        unit = solve_subproblem(sub_spec.spec(model, 1.0))
    if unit.status is SubproblemStatus.STATIONARY_DETECTED or not unit.value < 0:
        raise StationaryPointError("unit-ball subproblem certifies stationarity")
    curvature = norm.sigma(n) ** 2 * H.norm2
    t_hat = cauchy_t_hat(unit.value, curvature, delta)
    d = t_hat * unit.d
    return CauchyStep(d, t_hat, model.delta(d) + H.quad(d))


def sufficient_decrease_holds(d, model: ModelState, H, delta: float, params: SufficientDecreaseParams) -> bool:
    d = np.asarray(d, dtype=float)
    H = _as_hessian(H, d.size)
    return model.delta(d) + H.quad(d) < -params.kappa1 * min(params.kappa2, delta)


def tr_ratio(model: ModelState, d, H, f_new) -> float:
    """Actual over predicted change; ``-inf`` when the step leaves ``dom g``."""
    d = np.asarray(d, dtype=float)
    H = _as_hessian(H, d.size)
    pred = model.delta(d) + H.quad(d)
    if not pred < 0:
        raise ValueError(f"predicted change must be negative, got {pred}")
    f_new = float(f_new)
    if math.isinf(f_new):
        return -math.inf
    return (f_new - model.fx) / pred


def radius_update(r: float, delta: float, cfg: TRConfig) -> float:
    if not delta > 0:
        raise ValueError("radius must be positive")
    if r > cfg.beta3:
        new = cfg.gamma3 * delta
    elif r >= cfg.beta2:
        new = delta
    else:
        new = cfg.gamma1 * delta
    if new < cfg.radius_floor:
        raise RadiusCollapse(new)
    return new


def run_trust_region(
    problem: CompositeProblem,
    x0,
    cfg: TRConfig | None = None,
    H_policy: HessianModel | None = None,
    sub: SubproblemOptions | None = None,
    stopping: Stopping | None = None,
    monitor: Callable | None = None,
):
    """Global trust-region method; returns ``(trace, reason)``.

    With a zero quadratic term the radius-``delta`` subproblem solution and the
    Cauchy step compete and the better model value wins; otherwise the Cauchy
    step is taken. Stationarity is judged by the unit-ball subproblem, which is
    solved once per distinct iterate. ``monitor(k, x, H)``, when given, is
    called at the start of every iteration with the current iterate and
    Hessian model.
    """
    cfg = cfg or TRConfig()
    stopping = stopping or Stopping(max_iters=cfg.max_iters)
    sub = sub or SubproblemOptions(norm=cfg.norm)
    if sub.norm != cfg.norm:
        sub = SubproblemOptions(cfg.norm, sub.beta_fraction, sub.stationarity_tol, sub.max_inner_iters)
    model = linearize(problem, x0)
    H = H_policy or HessianModel.zero(model.x.size)
    delta = cfg.delta0
    trace = IterationTrace("trust-region")
    start = time.perf_counter()
    unit = None
    k = 0
    while True:
        rec = IterationRecord(k=k, x=np.array(model.x), f=model.fx, step_or_radius=delta)
        if monitor is not None:
            monitor(k, model.x, H)

        def finish(why, rec=rec):
            if unit is not None:
                rec.stationarity = abs(0.5 * (unit.lower_bound + unit.value))
            rec.wall_time = time.perf_counter() - start
            trace.append(rec)
            return why

        if model.fx < stopping.f_floor:
            reason = finish(TerminationReason.OBJECTIVE_DIVERGING)
            break
        if unit is None:
            unit = solve_subproblem(sub.spec(model, 1.0))
            rec.subproblem_iters += unit.certificate.inner_iters
        if unit.status is SubproblemStatus.STATIONARY_DETECTED:
            rec.delta_f = unit.value
            reason = finish(TerminationReason.STATIONARY)
            break
        if not unit.value < 0:
            reason = finish(TerminationReason.ITER_LIMIT)
            break
        if k >= stopping.max_iters:
            reason = finish(TerminationReason.MAX_ITERS)
            break

        cands = [cauchy_step(model, delta, H, cfg.norm, unit=unit).d]
        if H.is_zero:
            trial = unit if delta == 1.0 else solve_subproblem(sub.spec(model, delta))
            if trial is not unit:
                rec.subproblem_iters += trial.certificate.inner_iters
            cands.append(trial.d)
        preds = [model.delta(c) + H.quad(c) for c in cands]
        j = int(np.argmin(preds))
        d, pred = cands[j], preds[j]
        if not pred < 0:
            reason = finish(TerminationReason.NO_DESCENT_DIRECTION)
            break

        f_new = problem.f(model.x + d)
        r = tr_ratio(model, d, H, f_new)
        rec.delta_f = model.delta(d)
        rec.step_norm = float(np.linalg.norm(d))
        rec.ratio = r
        if stopping.stat_every and k % stopping.stat_every == 0:
            rec.stationarity = abs(0.5 * (unit.lower_bound + unit.value))
        try:
            new_delta = radius_update(r, delta, cfg)
        except RadiusCollapse:
            reason = finish(TerminationReason.RADIUS_COLLAPSE)
            break
        rec.accepted = r >= cfg.beta1
        rec.wall_time = time.perf_counter() - start
        trace.append(rec)
        log.debug("k=%d f=%.17g r=%.3g delta=%.3g accepted=%s", k, model.fx, r, delta, rec.accepted)
        if rec.accepted:
            model = linearize(problem, model.x + d)
            H = H.next(model.x)
            unit = None
        delta = new_delta
        k += 1
    log.info("trust-region finished: %s after %d iterations, f=%.17g", reason.value, k, model.fx)
    return trace, reason
