"""Trust-region norms and small projection helpers shared by the catalog."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["NormChoice", "L2", "LINF", "project_l1_ball", "project_simplex"]


@dataclass(frozen=True)
class NormChoice:
    """A norm on R^n used for trust balls.

    ``sigma(n)`` is the equivalence constant with ``||d||_2 <= sigma * ||d||``.
    """

    kind: str = "l2"

    def __post_init__(self):
        if self.kind not in ("l2", "linf"):
            raise ValueError(f"unsupported trust norm {self.kind!r}; use 'l2' or 'linf'")

    def sigma(self, n: int) -> float:
        return 1.0 if self.kind == "l2" else math.sqrt(n)

    def __call__(self, d) -> float:
        d = np.asarray(d, dtype=float)
        if d.size == 0:
            return 0.0
        if self.kind == "l2":
            return float(np.linalg.norm(d))
        return float(np.max(np.abs(d)))

    def dual(self, w) -> float:
        w = np.asarray(w, dtype=float)
        if self.kind == "l2":
            return float(np.linalg.norm(w))
        return float(np.sum(np.abs(w)))

    def project(self, d, radius: float) -> np.ndarray:
        d = np.asarray(d, dtype=float)
        if self.kind == "linf":
            return np.clip(d, -radius, radius)
        nrm = np.linalg.norm(d)
        return d if nrm <= radius else d * (radius / nrm)


L2 = NormChoice("l2")
LINF = NormChoice("linf")


def project_simplex(v, radius: float = 1.0) -> np.ndarray:
    """Euclidean projection onto ``{y >= 0, sum(y) = radius}``."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - radius
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def project_l1_ball(v, radius: float = 1.0) -> np.ndarray:
    """Euclidean projection onto the l1 ball of the given radius."""
    v = np.asarray(v, dtype=float)
    if np.sum(np.abs(v)) <= radius:
        return v.copy()
    return np.sign(v) * project_simplex(np.abs(v), radius)
