"""Line searches on the Δf surrogate and the two global line-search drivers.

Sufficient decrease (WWI)::

    f(x + t d) <= f(x) + sigma1 * t * Δf(x; d)

Surrogate curvature (WWII)::

    sigma2 * Δf(x; d) <= Δf(x + t d; mu d) / mu

where the right-hand side is formed from a fresh linearization at ``x + t d``.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .config import BacktrackConfig, Stopping, SubproblemOptions, WolfeConfig
from .core import CompositeProblem, ModelState, linearize
from .subproblem import SubproblemStatus, solve_subproblem, stationarity_measure
from .trace import IterationRecord, IterationTrace, TerminationReason

__all__ = [
    "DescentRequired",
    "SearchStatus",
    "LineSearchOutcome",
    "armijo_holds",
    "curvature_holds",
    "backtrack",
    "wolfe_bisect",
    "run_backtracking",
    "run_weak_wolfe",
]

log = logging.getLogger(__name__)


class DescentRequired(ValueError):
    """The search direction does not satisfy ``Δf(x; d) < 0``."""


class SearchStatus(enum.Enum):
    ACCEPTED = "Accepted"
    UNBOUNDED_BELOW = "UnboundedBelow"
    ITER_LIMIT = "IterLimit"


@dataclass(frozen=True)
class LineSearchOutcome:
    status: SearchStatus
    t: float | None
    evaluations: int
    # (alpha, t, beta) at every trial of the weak Wolfe search
    history: tuple = field(default=(), repr=False)

    @property
    def accepted(self) -> bool:
        return self.status is SearchStatus.ACCEPTED


def _slope(model: ModelState, d, slope):
    s = model.delta(d) if slope is None else float(slope)
    if not s < 0:
        raise DescentRequired(f"need Δf(x; d) < 0, got {s}")
    return s


def armijo_holds(model: ModelState, d, t: float, sigma1: float, slope: float | None = None) -> bool:
    """WWI at step ``t``; false whenever ``x + t d`` leaves ``dom g``."""
    s = model.delta(d) if slope is None else slope
    f_new = model.problem.f(model.x + t * np.asarray(d, dtype=float))
    return f_new <= model.fx + sigma1 * t * s


def curvature_holds(
    problem: CompositeProblem, x_new, d, mu: float, sigma2: float, delta_f_at_x: float
) -> bool:
    """WWII at ``x_new = x + t d``; true when ``x_new + mu d`` leaves ``dom g``."""
    return _curvature(linearize(problem, x_new), d, mu, sigma2, delta_f_at_x)[0]


def _curvature(m_new: ModelState, d, mu, sigma2, s):
    """WWII verdict and whether it is resolvable above rounding noise.

    Far along a ray ``Δf(x + t d; mu d)`` is a difference of two huge,
    nearly equal numbers; once the test margin drops below their rounding
    error the verdict carries no information.
    """
    rhs = m_new.delta(mu * np.asarray(d, dtype=float)) / mu
    noise = 8 * np.finfo(float).eps * (abs(m_new.hx) + abs(m_new.gx)) / mu
    return sigma2 * s <= rhs, sigma2 * abs(s) > noise


def backtrack(model: ModelState, d, cfg: BacktrackConfig, slope: float | None = None) -> LineSearchOutcome:
    """Return the first ``t = theta**j`` (``j <= max_halvings``) satisfying WWI."""
    s = _slope(model, d, slope)
    t = 1.0
    for j in range(cfg.max_halvings + 1):
        if armijo_holds(model, d, t, cfg.sigma1, s):
            return LineSearchOutcome(SearchStatus.ACCEPTED, t, j + 1)
        t *= cfg.theta
    return LineSearchOutcome(SearchStatus.ITER_LIMIT, None, cfg.max_halvings + 1)


def wolfe_bisect(model: ModelState, d, cfg: WolfeConfig, slope: float | None = None) -> LineSearchOutcome:
    """Doubling/bisection search for a step satisfying WWI and WWII.

    Starting from ``t = 1``: a WWI failure sets the upper bracket ``beta = t``;
    otherwise a WWII failure sets the lower bracket ``alpha = t``. The step
    doubles while ``beta`` is infinite and bisects ``[alpha, beta]`` after.

    ``slope`` replaces ``Δf(x; d)`` in both conditions when given; it must be
    negative. A WWII verdict drowned in rounding noise counts as a failure,
    so a ray along which ``f`` decreases without bound ends in
    ``UnboundedBelow`` rather than a spurious acceptance.
    """
    s = _slope(model, d, slope)
    d = np.asarray(d, dtype=float)
    problem = model.problem
    alpha, beta, t = 0.0, math.inf, 1.0
    doublings = bisections = evals = 0
    history = []
    while True:
        history.append((alpha, t, beta))
        evals += 1
        if not armijo_holds(model, d, t, cfg.sigma1, s):
            beta = t
        else:
            holds, resolvable = _curvature(linearize(problem, model.x + t * d), d, cfg.mu, cfg.sigma2, s)
            if holds and resolvable:
                return LineSearchOutcome(SearchStatus.ACCEPTED, t, evals, tuple(history))
            alpha = t
        if beta == math.inf:
            if doublings >= cfg.max_doublings:
                return LineSearchOutcome(SearchStatus.UNBOUNDED_BELOW, None, evals, tuple(history))
            t *= 2.0
            doublings += 1
        else:
            if bisections >= cfg.max_bisections:
                return LineSearchOutcome(SearchStatus.ITER_LIMIT, None, evals, tuple(history))
            t = 0.5 * (alpha + beta)
            bisections += 1


def _verify(problem, x, d, t, slope, sigma1, wolfe: WolfeConfig | None):
    # recompute everything from scratch: guards against stale model caches
    model = linearize(problem, x)
    ok = armijo_holds(model, d, t, sigma1, slope)
    if ok and wolfe is not None:
        ok = curvature_holds(problem, x + t * d, d, wolfe.mu, wolfe.sigma2, slope)
    if not ok:
        raise RuntimeError(f"accepted step t={t} fails its conditions on re-evaluation")


def _line_search_driver(problem, x0, search, sub: SubproblemOptions, stopping: Stopping, method, direction):
    trace = IterationTrace(method)
    model = linearize(problem, x0)
    start = time.perf_counter()
    reason = TerminationReason.MAX_ITERS
    k = 0
    while True:
        rec = IterationRecord(k=k, x=np.array(model.x), f=model.fx)
        stat_due = stopping.stat_every and k % stopping.stat_every == 0

        def finish(why, rec=rec):
            rec.stationarity = stationarity_measure(
                problem, model.x, sub.stationarity_tol, norm=sub.norm, max_inner_iters=sub.max_inner_iters
            )
            rec.wall_time = time.perf_counter() - start
            trace.append(rec)
            return why

        if model.fx < stopping.f_floor:
            reason = finish(TerminationReason.OBJECTIVE_DIVERGING)
            break
        res = solve_subproblem(sub.spec(model))
        rec.subproblem_iters = res.certificate.inner_iters
        rec.delta_f = res.value
        if res.ball_active:
            log.info("k=%d: artificial line-search ball is active (radius %.3g)", k, res.radius)
            # the huge ball inflates Δf on nearly linear models; certify on the unit ball instead
            if res.status is not SubproblemStatus.STATIONARY_DETECTED:
                unit = solve_subproblem(sub.spec(model, 1.0))
                rec.subproblem_iters += unit.certificate.inner_iters
                if unit.status is SubproblemStatus.STATIONARY_DETECTED:
                    res = unit
        if res.status is SubproblemStatus.STATIONARY_DETECTED:
            reason = finish(TerminationReason.STATIONARY)
            break
        d = res.d if direction is None else np.asarray(direction(model, res), dtype=float)
        slope = model.delta(d)
        rec.delta_f = slope
        rec.step_norm = float(np.linalg.norm(d))
        if not slope < 0:
            reason = finish(
                TerminationReason.ITER_LIMIT
                if res.status is SubproblemStatus.INNER_ITER_LIMIT
                else TerminationReason.SURROGATE_VANISHED
            )
            break
        if abs(slope) < stopping.surrogate_tol:
            reason = finish(TerminationReason.SURROGATE_VANISHED)
            break
        if k >= stopping.max_iters:
            reason = finish(TerminationReason.MAX_ITERS)
            break
        out = search(model, d, slope)
        if out.status is SearchStatus.UNBOUNDED_BELOW:
            reason = finish(TerminationReason.UNBOUNDED_BELOW)
            break
        if out.status is SearchStatus.ITER_LIMIT:
            reason = finish(TerminationReason.ITER_LIMIT)
            break
        rec.step_or_radius = out.t
        rec.accepted = True
        if stat_due:
            rec.stationarity = stationarity_measure(
                problem, model.x, sub.stationarity_tol, norm=sub.norm, max_inner_iters=sub.max_inner_iters
            )
        rec.wall_time = time.perf_counter() - start
        trace.append(rec)
        log.debug("k=%d f=%.17g Δf=%.3e t=%.3g", k, model.fx, slope, out.t)
        model = linearize(problem, model.x + out.t * d)
        k += 1
    log.info("%s finished: %s after %d iterations, f=%.17g", method, reason.value, k, model.fx)
    return trace, reason


def run_backtracking(
    problem: CompositeProblem,
    x0,
    cfg: BacktrackConfig | None = None,
    sub: SubproblemOptions | None = None,
    stopping: Stopping | None = None,
    direction=None,
):
    """Global backtracking method.

    Directions come from :func:`solve_subproblem` in line-search mode (no
    trust radius) unless ``direction(model, result)`` is supplied. Returns
    ``(trace, reason)``.
    """
    cfg = cfg or BacktrackConfig()

    def search(model, d, slope):
        out = backtrack(model, d, cfg, slope)
        if out.accepted:
            _verify(problem, model.x, d, out.t, slope, cfg.sigma1, None)
        return out

    return _line_search_driver(
        problem, x0, search, sub or SubproblemOptions(), stopping or Stopping(), "backtracking", direction
    )


def run_weak_wolfe(
    problem: CompositeProblem,
    x0,
    cfg: WolfeConfig | None = None,
    sub: SubproblemOptions | None = None,
    stopping: Stopping | None = None,
    direction=None,
):
    """Global weak Wolfe method; see :func:`run_backtracking` for the arguments."""
    cfg = cfg or WolfeConfig()

    def search(model, d, slope):
        out = wolfe_bisect(model, d, cfg, slope)
        if out.accepted:
            _verify(problem, model.x, d, out.t, slope, cfg.sigma1, cfg)
        return out

    return _line_search_driver(
        problem, x0, search, sub or SubproblemOptions(), stopping or Stopping(), "wolfe", direction
    )
