"""Solver parameters.

:class:`SolverConfig` collects every tunable of the three drivers and hands
out the per-component configs used by the line searches, the trust-region
method and the subproblem solver.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from .norms import NormChoice
from .subproblem import SubproblemSpec

__all__ = [
    "BacktrackConfig",
    "WolfeConfig",
    "TRConfig",
    "SubproblemOptions",
    "Stopping",
    "SolverConfig",
]


@dataclass(frozen=True)
class BacktrackConfig:
    sigma1: float = 1e-4
    theta: float = 0.5
    max_halvings: int = 60

    def __post_init__(self):
        if not 0 < self.sigma1 < 1:
            raise ValueError("sigma1 must lie in (0, 1)")
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if self.max_halvings < 1:
            raise ValueError("max_halvings must be positive")


@dataclass(frozen=True)
class WolfeConfig:
    sigma1: float = 1e-4
    sigma2: float = 0.9
    mu: float = 0.5
    max_doublings: int = 60
    max_bisections: int = 100

    def __post_init__(self):
        if not 0 < self.sigma1 < self.sigma2 < 1:
            raise ValueError("need 0 < sigma1 < sigma2 < 1")
        if not 0 < self.mu < 1:
            raise ValueError("mu must lie in (0, 1)")
        if self.max_doublings < 1 or self.max_bisections < 1:
            raise ValueError("doubling and bisection caps must be positive")


@dataclass(frozen=True)
class TRConfig:
    gamma1: float = 0.25
    gamma2: float = 0.5
    gamma3: float = 2.0
    beta1: float = 0.01
    beta2: float = 0.25
    beta3: float = 0.75
    delta0: float = 1.0
    norm: NormChoice = NormChoice("l2")
    radius_floor: float = 1e-14
    max_iters: int = 500

    def __post_init__(self):
        if not 0 < self.gamma1 <= self.gamma2 < 1 <= self.gamma3:
            raise ValueError("need 0 < gamma1 <= gamma2 < 1 <= gamma3")
        if not 0 < self.beta1 <= self.beta2 < self.beta3 < 1:
            raise ValueError("need 0 < beta1 <= beta2 < beta3 < 1")
        if not self.delta0 > 0:
            raise ValueError("delta0 must be positive")
        if not 0 <= self.radius_floor < self.delta0:
            raise ValueError("radius_floor must lie in [0, delta0)")


@dataclass(frozen=True)
class SubproblemOptions:
    """Template for the subproblems a driver solves at each iterate."""

    norm: NormChoice = NormChoice("l2")
    beta_fraction: float = 0.1
    stationarity_tol: float = 1e-8
    max_inner_iters: int = 5000

    def spec(self, model, radius=math.inf) -> SubproblemSpec:
        return SubproblemSpec(
            model, radius, self.norm, self.beta_fraction, self.stationarity_tol, self.max_inner_iters
        )


@dataclass(frozen=True)
class Stopping:
    max_iters: int = 500
    surrogate_tol: float = 1e-12
    f_floor: float = -1e12
    stat_every: int | None = None


@dataclass(frozen=True)
class SolverConfig:
    sigma1: float = 1e-4
    sigma2: float = 0.9
    mu: float = 0.5
    theta: float = 0.5
    beta: float = 0.1
    gamma1: float = 0.25
    gamma2: float = 0.5
    gamma3: float = 2.0
    beta1: float = 0.01
    beta2: float = 0.25
    beta3: float = 0.75
    delta0: float = 1.0
    radius_floor: float = 1e-14
    eps: float = 1e-8
    surrogate_tol: float = 1e-12
    f_floor: float = -1e12
    max_iters: int = 500
    max_halvings: int = 60
    max_doublings: int = 60
    max_bisections: int = 100
    max_inner_iters: int = 5000
    norm: str = "l2"
    hessian: str = "zero"
    hessian_scale: float = 1.0
    stat_every: int | None = 10

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def as_dict(self):
        return asdict(self)

    def backtrack(self) -> BacktrackConfig:
        return BacktrackConfig(self.sigma1, self.theta, self.max_halvings)

    def wolfe(self) -> WolfeConfig:
        return WolfeConfig(self.sigma1, self.sigma2, self.mu, self.max_doublings, self.max_bisections)

    def trust_region(self) -> TRConfig:
        return TRConfig(
            self.gamma1, self.gamma2, self.gamma3, self.beta1, self.beta2, self.beta3,
            self.delta0, NormChoice(self.norm), self.radius_floor, self.max_iters,
        )

    def subproblem(self) -> SubproblemOptions:
        if not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        return SubproblemOptions(NormChoice(self.norm), self.beta, self.eps, self.max_inner_iters)

    def stopping(self) -> Stopping:
        return Stopping(self.max_iters, self.surrogate_tol, self.f_floor, self.stat_every)

    def validate(self, method: str):
        """Build the configs ``method`` needs, raising ``ValueError`` on violations."""
        self.subproblem()
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if method == "backtracking":
            self.backtrack()
        elif method == "wolfe":
            if not self.sigma2 > self.sigma1:
                raise ValueError("--sigma2 must exceed --sigma1")
            self.wolfe()
        elif method == "trust-region":
            self.trust_region()
            if self.hessian not in ("zero", "identity"):
                raise ValueError("hessian policy must be 'zero' or 'identity'")
            if self.hessian_scale < 0:
                raise ValueError("hessian scale must be nonnegative")
        else:
            raise ValueError(f"unknown method {method!r}")
