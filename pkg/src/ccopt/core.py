"""Composite objective ``f(x) = h(c(x)) + g(x)`` and its linearized model.

The model difference ``Δf(x; d) = h(c(x) + ∇c(x) d) + g(x + d) - h(c(x)) - g(x)``
is convex in ``d``, vanishes at ``d = 0`` and upper-bounds the directional
derivative ``f'(x; d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .extended import ExtendedReal
from .functions import OuterFunction, Regularizer

__all__ = [
    "SmoothMap",
    "CompositeProblem",
    "ModelState",
    "InvalidIterate",
    "eval_f",
    "linearize",
    "delta_f",
    "directional_derivative_estimate",
    "check_jacobian_fd",
]


class InvalidIterate(ValueError):
    """Raised when a point lies outside ``dom g``."""


def _as_point(x, n) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or x.size != n:
        raise ValueError(f"expected a point of dimension {n}, got shape {np.shape(x)}")
    return x


@dataclass(frozen=True)
class SmoothMap:
    """A C¹ map ``c: R^n -> R^m`` with its Jacobian callback."""

    n: int
    m: int
    eval: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x) -> np.ndarray:
        x = _as_point(x, self.n)
        cx = np.atleast_1d(np.asarray(self.eval(x), dtype=float))
        if cx.shape != (self.m,):
            raise ValueError(f"map returned shape {cx.shape}, expected ({self.m},)")
        if np.any(np.isnan(cx)):
            raise ValueError("map evaluation returned NaN")
        return cx

    def jac(self, x) -> np.ndarray:
        x = _as_point(x, self.n)
        J = np.asarray(self.jacobian(x), dtype=float).reshape(self.m, self.n)
        if np.any(np.isnan(J)):
            raise ValueError("Jacobian evaluation returned NaN")
        return J

    @classmethod
    def linear(cls, A, b=None) -> SmoothMap:
        """``c(x) = A x + b``."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.zeros(A.shape[0]) if b is None else np.asarray(b, dtype=float)
        return cls(A.shape[1], A.shape[0], lambda x: A @ x + b, lambda x: A)


@dataclass(frozen=True)
class CompositeProblem:
    c: SmoothMap
    h: OuterFunction
    g: Regularizer
    name: str = "problem"

    def __post_init__(self):
        if self.h.m is not None and self.h.m != self.c.m:
            raise ValueError(f"outer function consumes R^{self.h.m}, map produces R^{self.c.m}")

    @property
    def n(self) -> int:
        return self.c.n

    def f(self, x) -> float:
        """Float view of ``eval_f`` (``math.inf`` outside ``dom g``)."""
        x = _as_point(x, self.n)
        gx = self.g(x)
        if not math.isfinite(gx):
            return math.inf
        val = self.h(self.c(x)) + gx
        if math.isnan(val):
            raise ValueError("objective evaluation returned NaN")
        return val


@dataclass(frozen=True)
class ModelState:
    """Linearization of the problem at ``x`` with cached ``c(x)``, ``∇c(x)``."""

    problem: CompositeProblem = field(repr=False)
    x: np.ndarray
    cx: np.ndarray
    Jx: np.ndarray
    hx: float
    gx: float

    @property
    def fx(self) -> float:
        return self.hx + self.gx

    def delta(self, d) -> float:
        """Float view of ``Δf(x; d)``."""
        d = _as_point(d, self.x.size)
        gnew = self.problem.g(self.x + d)
        if not math.isfinite(gnew):
            return math.inf
        # grouped so that d = 0 gives exactly 0
        return (self.problem.h(self.cx + self.Jx @ d) - self.hx) + (gnew - self.gx)


def eval_f(problem: CompositeProblem, x) -> ExtendedReal:
    """``h(c(x)) + g(x)``; ``+inf`` exactly when ``x`` is outside ``dom g``."""
    return ExtendedReal(problem.f(x))


def linearize(problem: CompositeProblem, x) -> ModelState:
    x = _as_point(x, problem.n).copy()
    gx = problem.g(x)
    if not math.isfinite(gx):
        raise InvalidIterate(f"point {x} lies outside dom g")
    cx = problem.c(x)
    Jx = problem.c.jac(x)
    x.setflags(write=False)
    cx.setflags(write=False)
    Jx = Jx.copy()
    Jx.setflags(write=False)
    return ModelState(problem, x, cx, Jx, problem.h(cx), gx)


def delta_f(model: ModelState, d) -> ExtendedReal:
    return ExtendedReal(model.delta(d))


def directional_derivative_estimate(model: ModelState, d, t_grid) -> float:
    """Estimate ``f'(x; d)`` by ``min_t Δf(x; t d) / t`` over a decreasing grid.

    The quotients are nondecreasing in ``t``, so over a decreasing grid they
    must be nonincreasing; a violation beyond rounding raises ``ArithmeticError``.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0 or np.any(t_grid <= 0) or np.any(np.diff(t_grid) >= 0):
        raise ValueError("t_grid must be a nonempty strictly decreasing list of positive reals")
    d = _as_point(d, model.x.size)
    quotients = [model.delta(t * d) / t for t in t_grid]
    if all(math.isinf(q) for q in quotients):
        raise ValueError("direction leaves dom g for every grid step")
    finite = [q for q in quotients if math.isfinite(q)]
    for a, b in zip(finite, finite[1:]):
        if b > a + 1e-10 * (1 + abs(a) + abs(b)):
            raise ArithmeticError("difference quotients are not monotone; Δf is not convex in d")
    return min(finite)


def check_jacobian_fd(cmap: SmoothMap, x, step: float = 1e-5) -> float:
    """Max elementwise relative error between central differences and ``cmap.jac``.

    The relative error of an entry is ``|fd - J| / max(1, |J|)``.
    """
    if not step > 0:
        raise ValueError("finite-difference step must be positive")
    x = _as_point(x, cmap.n)
    J = cmap.jac(x)
    fd = np.empty_like(J)
    for j in range(cmap.n):
        e = np.zeros(cmap.n)
        e[j] = step
        fd[:, j] = (cmap(x + e) - cmap(x - e)) / (2 * step)
    return float(np.max(np.abs(fd - J) / np.maximum(1.0, np.abs(J)), initial=0.0))
