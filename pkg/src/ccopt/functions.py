"""Catalog of outer convex functions ``h`` and regularizers ``g``.

Every outer function in the catalog is sublinear, ``h(z) = sup_{y in C} <y, z>``
for a compact convex dual set ``C``; its conjugate is the indicator of ``C``.
Regularizers are closed, proper and convex and may take the value ``+inf``.

Besides evaluation, prox and conjugate, each regularizer exposes two
operations restricted to a trust ball ``||d|| <= radius`` around a base point
``x``:

* ``restricted_prox``: prox of ``d -> g(x + d) + indicator(||d|| <= radius)``;
* ``restricted_linear_min``: a certified lower bound on
  ``inf_{||d|| <= radius} <w, d> + g(x + d) - g(x)`` together with a feasible
  point.

User-defined regularizers subclass :class:`Regularizer` and implement
``__call__``, ``prox`` and ``conjugate``. The generic trust-restricted
operations then work for the Euclidean trust norm (they only need an exact
prox); the ``linf`` trust norm needs an override.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod

import numpy as np

from .norms import NormChoice, project_l1_ball, project_simplex

__all__ = [
    "OuterFunction",
    "L1Norm",
    "L2Norm",
    "LInfNorm",
    "MaxCoordinate",
    "ScalarIdentity",
    "Regularizer",
    "SeparableRegularizer",
    "Zero",
    "WeightedL1",
    "BoxIndicator",
    "BallIndicator",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _soft(v, thresh):
    return np.sign(v) * np.maximum(np.abs(v) - thresh, 0.0)


def smallest_multiplier(excess, lo=0.0, max_iter=200):
    """Smallest ``nu >= lo`` with ``excess(nu) <= 0`` for nonincreasing ``excess``.

    Returns the feasible end of the final bracket.
    """
    if excess(lo) <= 0:
        return lo
    hi = max(1.0, 2.0 * lo)
    while excess(hi) > 0:
        hi *= 10.0
        if hi > 1e300:
            return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if excess(mid) <= 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-15 * hi:
            break
    return hi


def maximize_concave(q, center, decades=12.0, iters=90):
    """Golden-section search of a concave ``q`` over ``nu > 0`` in log scale.

    ``q`` returns ``(value, payload)``. Any evaluated ``nu`` gives a valid
    point, so the best evaluated one is returned.
    """
    a, b = math.log(center) - decades * math.log(10), math.log(center) + decades * math.log(10)
    best = (-math.inf, None)

    def ev(s):
        nonlocal best
        val = q(math.exp(s))
        if val[0] > best[0] or best[1] is None:
            best = val
        return val[0]

    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fd = ev(c), ev(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = ev(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = ev(d)
    return best


def maximize_concave_grid(q_batch, center, decades=12.0, points=49, rounds=6):
    """Vectorized log-grid refinement of a concave ``q`` over ``nu > 0``.

    ``q_batch(nus)`` returns ``(values, payloads)`` for an array of ``nu``.
    Each round zooms onto the two cells around the best grid point.
    """
    lo, hi = math.log(center) - decades * math.log(10), math.log(center) + decades * math.log(10)
    best_val, best_pay = -math.inf, None
    for _ in range(rounds):
        s = np.linspace(lo, hi, points)
        vals, pays = q_batch(np.exp(s))
        i = int(np.argmax(vals))
        if vals[i] > best_val or best_pay is None:
            best_val, best_pay = float(vals[i]), pays[i]
        lo, hi = s[max(i - 1, 0)], s[min(i + 1, points - 1)]
    return best_val, best_pay


# ---------------------------------------------------------------------------
# outer functions


class OuterFunction(ABC):
    """Finite convex ``h: R^m -> R``.

    Subclasses provide ``__call__``, ``prox`` and ``conjugate``; the catalog
    kinds also give an exact ``prox_conjugate``.
    """

    kind = "custom"
    scale = 1.0
    m = None

    @abstractmethod
    def __call__(self, z) -> float: ...

    @abstractmethod
    def prox(self, z, step: float) -> np.ndarray: ...

    @abstractmethod
    def conjugate(self, y) -> float: ...

    def prox_conjugate(self, v, step: float) -> np.ndarray:
        """Prox of ``step * h*`` via the Moreau identity."""
        v = np.asarray(v, dtype=float)
        return v - step * self.prox(v / step, 1.0 / step)

    def support_point(self, z) -> np.ndarray:
        """A subgradient of ``h`` at ``z`` (an element of the dual set)."""
        return self.prox_conjugate(np.asarray(z, dtype=float) * 1e8, 1e8)

    def batch(self, Z) -> np.ndarray:
        """Evaluate on each row of ``Z``."""
        return np.array([self(z) for z in Z])

    contains_zero = False

    def __repr__(self):
        return f"{type(self).__name__}(scale={self.scale})"


class _SublinearOuter(OuterFunction):
    dual_tol = 1e-9

    def __init__(self, scale: float = 1.0):
        if not scale > 0:
            raise ValueError("outer function scale must be positive")
        self.scale = float(scale)

    @abstractmethod
    def project_dual(self, y) -> np.ndarray:
        """Euclidean projection onto the dual set ``C``."""

    @abstractmethod
    def dual_gap(self, y) -> float:
        """Distance-like violation of ``y in C`` (0 inside)."""

    def conjugate(self, y) -> float:
        return 0.0 if self.dual_gap(y) <= self.dual_tol * (1.0 + self.scale) else math.inf

    def prox_conjugate(self, v, step: float) -> np.ndarray:
        return self.project_dual(v)

    def prox(self, z, step: float) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return z - step * self.project_dual(z / step)

    def project_face(self, z, y, tol: float) -> np.ndarray:
        """Projection of ``y`` onto ``∂h(z)``, treating entries within ``tol`` as ties.

        The result always lies in ``C``; the default projects onto all of it.
        """
        return self.project_dual(y)

    def face_structure(self, z, tol: float):
        """Affine hull of ``∂h(z)`` as ``(free, row)``.

        ``free`` marks the coordinates that vary over the face; ``row``, when
        not ``None``, is a vector whose inner product with the free part is
        constant on the face.
        """
        return np.ones(np.shape(z), dtype=bool), None

    @property
    def contains_zero(self) -> bool:
        return True


class L1Norm(_SublinearOuter):
    kind = "l1"

    def __call__(self, z):
        return self.scale * float(np.sum(np.abs(z)))

    def project_dual(self, y):
        return np.clip(np.asarray(y, dtype=float), -self.scale, self.scale)

    def dual_gap(self, y):
        return max(0.0, float(np.max(np.abs(y), initial=0.0)) - self.scale)

    def support_point(self, z):
        return self.scale * np.sign(np.asarray(z, dtype=float))

    def project_face(self, z, y, tol):
        z = np.asarray(z, dtype=float)
        y = self.project_dual(y)
        return np.where(np.abs(z) > tol, self.scale * np.sign(z), y)

    def face_structure(self, z, tol):
        return np.abs(np.asarray(z, dtype=float)) <= tol, None

    def lipschitz_for(self, m):
        return self.scale * math.sqrt(m)

    def gauge(self, y):
        return float(np.max(np.abs(y), initial=0.0)) / self.scale

    def batch(self, Z):
        return self.scale * np.sum(np.abs(Z), axis=1)


class L2Norm(_SublinearOuter):
    kind = "l2"

    def __call__(self, z):
        return self.scale * float(np.linalg.norm(z))

    def project_dual(self, y):
        y = np.asarray(y, dtype=float)
        nrm = np.linalg.norm(y)
        return y if nrm <= self.scale else y * (self.scale / nrm)

    def dual_gap(self, y):
        return max(0.0, float(np.linalg.norm(y)) - self.scale)

    def support_point(self, z):
        z = np.asarray(z, dtype=float)
        nrm = np.linalg.norm(z)
        return np.zeros_like(z) if nrm == 0 else self.scale * z / nrm

    def project_face(self, z, y, tol):
        z = np.asarray(z, dtype=float)
        nrm = float(np.linalg.norm(z))
        return self.scale * z / nrm if nrm > tol else self.project_dual(y)

    def face_structure(self, z, tol):
        z = np.asarray(z, dtype=float)
        return np.full(z.shape, float(np.linalg.norm(z)) <= tol), None

    def lipschitz_for(self, m):
        return self.scale

    def gauge(self, y):
        return float(np.linalg.norm(y)) / self.scale

    def batch(self, Z):
        return self.scale * np.linalg.norm(Z, axis=1)


class LInfNorm(_SublinearOuter):
    kind = "linf"

    def __call__(self, z):
        return self.scale * float(np.max(np.abs(z), initial=0.0))

    def project_dual(self, y):
        return project_l1_ball(y, self.scale)

    def dual_gap(self, y):
        return max(0.0, float(np.sum(np.abs(y))) - self.scale)

    def support_point(self, z):
        z = np.asarray(z, dtype=float)
        y = np.zeros_like(z)
        if z.size and np.any(z != 0):
            i = int(np.argmax(np.abs(z)))
            y[i] = self.scale * np.sign(z[i])
        return y

    def project_face(self, z, y, tol):
        z = np.asarray(z, dtype=float)
        top = float(np.max(np.abs(z), initial=0.0))
        if top <= tol:
            return self.project_dual(y)
        active = np.abs(z) >= top - tol
        sgn = np.sign(z[active])
        out = np.zeros_like(z)
        out[active] = sgn * project_simplex(sgn * np.asarray(y, dtype=float)[active], self.scale)
        return out

    def face_structure(self, z, tol):
        z = np.asarray(z, dtype=float)
        top = float(np.max(np.abs(z), initial=0.0))
        if top <= tol:
            return np.ones(z.shape, dtype=bool), None
        active = np.abs(z) >= top - tol
        return active, np.sign(z[active])

    def lipschitz_for(self, m):
        return self.scale

    def gauge(self, y):
        return float(np.sum(np.abs(y))) / self.scale

    def batch(self, Z):
        return self.scale * np.max(np.abs(Z), axis=1)


class MaxCoordinate(_SublinearOuter):
    """``h(z) = scale * max_i z_i``; dual set is the scaled simplex."""

    kind = "max"

    def __call__(self, z):
        return self.scale * float(np.max(z))

    def project_dual(self, y):
        return project_simplex(y, self.scale)

    def dual_gap(self, y):
        y = np.asarray(y, dtype=float)
        return max(float(np.max(-y, initial=0.0)), abs(float(np.sum(y)) - self.scale))

    def support_point(self, z):
        z = np.asarray(z, dtype=float)
        y = np.zeros_like(z)
        y[int(np.argmax(z))] = self.scale
        return y

    def project_face(self, z, y, tol):
        z = np.asarray(z, dtype=float)
        active = z >= float(np.max(z)) - tol
        out = np.zeros_like(z)
        out[active] = project_simplex(np.asarray(y, dtype=float)[active], self.scale)
        return out

    def face_structure(self, z, tol):
        z = np.asarray(z, dtype=float)
        active = z >= float(np.max(z)) - tol
        return active, np.ones(int(active.sum()))

    def batch(self, Z):
        return self.scale * np.max(Z, axis=1)

    @property
    def contains_zero(self):
        return False

    def lipschitz_for(self, m):
        return self.scale


class ScalarIdentity(_SublinearOuter):
    """``h(z) = scale * z`` on R^1."""

    kind = "identity"
    m = 1

    def __call__(self, z):
        z = np.asarray(z, dtype=float).reshape(-1)
        if z.size != 1:
            raise ValueError("ScalarIdentity consumes a single coordinate")
        return self.scale * float(z[0])

    def project_dual(self, y):
        return np.full(np.shape(np.atleast_1d(y)), self.scale)

    def dual_gap(self, y):
        return float(np.max(np.abs(np.atleast_1d(y) - self.scale)))

    def support_point(self, z):
        return np.full(np.shape(np.atleast_1d(z)), self.scale)

    def face_structure(self, z, tol):
        return np.zeros(np.shape(np.atleast_1d(z)), dtype=bool), None

    def batch(self, Z):
        return self.scale * Z[:, 0]

    @property
    def contains_zero(self):
        return False

    def lipschitz_for(self, m):
        return self.scale


# ---------------------------------------------------------------------------
# regularizers


class Regularizer(ABC):
    """Closed proper convex ``g: R^n -> R ∪ {+inf}``."""

    kind = "custom"

    @abstractmethod
    def __call__(self, x) -> float: ...

    @abstractmethod
    def prox(self, v, step: float) -> np.ndarray: ...

    @abstractmethod
    def conjugate(self, w) -> float: ...

    def in_domain(self, x) -> bool:
        return math.isfinite(self(x))

    def batch(self, X) -> np.ndarray:
        """Evaluate on each row of ``X``."""
        return np.array([self(x) for x in X])

    def nearest_subgradient(self, x, v):
        """Point of ``∂g(x)`` closest to ``v``, or ``None`` when unavailable."""
        return None

    # -- trust-restricted operations ---------------------------------------

    def restricted_prox(self, x, v, step, radius, norm: NormChoice) -> np.ndarray:
        """``argmin_d g(x+d) + |d - v|^2 / (2 step)`` subject to ``||d|| <= radius``."""
        if norm.kind != "l2":
            raise NotImplementedError(
                f"{type(self).__name__} has no linf-restricted prox; override restricted_prox"
            )
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)

        def at(nu):
            s = 1.0 / (1.0 / step + nu)
            return self.prox(x + v / (1.0 + step * nu), s) - x

        nu = smallest_multiplier(lambda nu: np.linalg.norm(at(nu)) - radius)
        return _shrink_into_ball(at(nu), radius, norm)

    def restricted_linear_min(self, x, w, radius, norm: NormChoice):
        """Lower bound and feasible point for ``inf <w,d> + g(x+d) - g(x)`` on the ball."""
        if norm.kind != "l2":
            raise NotImplementedError(
                f"{type(self).__name__} has no linf-restricted linear minimization"
            )
        x = np.asarray(x, dtype=float)
        w = np.asarray(w, dtype=float)
        gx = self(x)

        def q(nu):
            d = self.prox(x - w / nu, 1.0 / nu) - x
            val = float(w @ d) + self(x + d) + 0.5 * nu * (float(d @ d) - radius**2) - gx
            return val, d

        center = max(float(np.linalg.norm(w)), 1e-12) / radius
        val, d = maximize_concave(q, center)
        return val, _shrink_into_ball(d, radius, norm)


def _shrink_into_ball(d, radius, norm):
    nrm = norm(d)
    if nrm > radius:
        # 0 is feasible and dom g is convex, so shrinking stays in dom g(x + .)
        d = d * (radius / nrm)
    return d


class SeparableRegularizer(Regularizer):
    """``g(x) = sum_i w_i |x_i| + indicator(lower <= x <= upper)``.

    Covers the zero function, weighted l1 and box indicators.
    """

    kind = "separable"
    feas_tol = 1e-12

    def __init__(self, weights=0.0, lower=-math.inf, upper=math.inf):
        self.weights = np.asarray(weights, dtype=float)
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if np.any(self.weights < 0):
            raise ValueError("l1 weights must be nonnegative")
        if np.any(self.lower > self.upper):
            raise ValueError("empty box: lower bound exceeds upper bound")
        if np.any(np.isnan(self.lower)) or np.any(np.isnan(self.upper)):
            raise ValueError("box bounds cannot be NaN")

    @property
    def _bounded(self):
        return bool(np.any(np.isfinite(self.lower)) or np.any(np.isfinite(self.upper)))

    @property
    def _weighted(self):
        return bool(np.any(self.weights > 0))

    def _outside(self, X):
        # relative slack absorbs the rounding of x + (bound - x)
        lo = self.lower - self.feas_tol * (1.0 + np.abs(self.lower))
        hi = self.upper + self.feas_tol * (1.0 + np.abs(self.upper))
        return (X < lo) | (X > hi)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(self._outside(x)):
            return math.inf
        if not self._weighted:
            return 0.0
        return float(np.sum(self.weights * np.abs(x)))

    def batch(self, X):
        X = np.asarray(X, dtype=float)
        out = np.sum(self.weights * np.abs(X), axis=1) if self._weighted else np.zeros(len(X))
        bad = np.any(self._outside(X), axis=1)
        out[bad] = math.inf
        return out

    def prox(self, v, step):
        return np.clip(_soft(np.asarray(v, dtype=float), step * self.weights), self.lower, self.upper)

    def conjugate(self, w):
        w = np.asarray(w, dtype=float)
        lam = np.broadcast_to(self.weights, w.shape)
        lo = np.broadcast_to(self.lower, w.shape)
        hi = np.broadcast_to(self.upper, w.shape)
        total = 0.0
        for wi, li, lo_i, hi_i in zip(w, lam, lo, hi):
            if (hi_i == math.inf and wi - li > 0) or (lo_i == -math.inf and wi + li < 0):
                return math.inf
            cands = [min(max(0.0, lo_i), hi_i)]
            cands += [z for z in (lo_i, hi_i) if math.isfinite(z)]
            total += max(wi * z - li * abs(z) for z in cands)
        return total

    def nearest_subgradient(self, x, v):
        x = np.asarray(x, dtype=float)
        lam = np.broadcast_to(self.weights, x.shape)
        lo = np.where(x > 0, lam, -lam)
        hi = np.where(x < 0, -lam, lam)
        tol = self.feas_tol * (1.0 + np.abs(x))
        # the normal cone of the box opens the interval at an active bound
        lo = np.where(x <= self.lower + tol, -math.inf, lo)
        hi = np.where(x >= self.upper - tol, math.inf, hi)
        return np.clip(np.asarray(v, dtype=float), lo, hi)

    def _interval(self, x, radius, norm):
        lo = self.lower - x
        hi = self.upper - x
        if norm.kind == "linf":
            lo = np.maximum(lo, -radius)
            hi = np.minimum(hi, radius)
        return np.broadcast_to(lo, x.shape), np.broadcast_to(hi, x.shape)

    def restricted_prox(self, x, v, step, radius, norm):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if norm.kind == "linf":
            lo, hi = self._interval(x, radius, norm)
            z = _soft(x + v, step * self.weights)
            return np.clip(z - x, lo, hi)
        if not self._weighted and not self._bounded:
            return norm.project(v, radius)
        return super().restricted_prox(x, v, step, radius, norm)

    def _linear_coordinate_min(self, x, w, lo, hi):
        # minimize w_i d + lam_i |x_i + d| over [lo_i, hi_i]; may be -inf
        lam = np.broadcast_to(self.weights, x.shape)
        d = np.zeros_like(x)
        total = 0.0
        for i in range(x.size):
            if (hi[i] == math.inf and w[i] + lam[i] < 0) or (lo[i] == -math.inf and w[i] - lam[i] > 0):
                return -math.inf, None
            cands = [min(max(-x[i], lo[i]), hi[i])]
            cands += [c for c in (lo[i], hi[i]) if math.isfinite(c)]
            vals = [w[i] * c + lam[i] * abs(x[i] + c) for c in cands]
            j = int(np.argmin(vals))
            d[i] = cands[j]
            total += vals[j]
        return total, d

    def _ball_dual_min(self, x, w, gx, radius, norm):
        # Lagrangian dual over the l2 ball, evaluated for many multipliers at once
        lam = np.broadcast_to(self.weights, x.shape)

        def q_batch(nus):
            inv = (1.0 / nus)[:, None]
            z = np.clip(_soft(x - w * inv, lam * inv), self.lower, self.upper)
            d = z - x
            vals = d @ w + np.abs(z) @ lam + 0.5 * nus * (np.einsum("ij,ij->i", d, d) - radius**2) - gx
            return vals, d

        center = max(float(np.linalg.norm(w)), 1e-12) / radius
        val, d = maximize_concave_grid(q_batch, center)
        return val, _shrink_into_ball(d, radius, norm)

    def restricted_linear_min(self, x, w, radius, norm):
        x = np.asarray(x, dtype=float)
        w = np.asarray(w, dtype=float)
        gx = self(x)
        if norm.kind == "linf":
            lo, hi = self._interval(x, radius, norm)
            val, d = self._linear_coordinate_min(x, w, lo, hi)
            return val - gx, d
        if not self._weighted and not self._bounded:
            nrm = float(np.linalg.norm(w))
            d = np.zeros_like(x) if nrm == 0 else -radius * w / nrm
            return -radius * nrm, d
        best = self._ball_dual_min(x, w, gx, radius, norm)
        lo, hi = self._interval(x, radius, norm)
        val0, d0 = self._linear_coordinate_min(x, w, lo, hi)
        if d0 is not None and float(np.linalg.norm(d0)) <= radius and val0 - gx > best[0]:
            return val0 - gx, d0
        return best

    def __repr__(self):
        return f"{type(self).__name__}(kind={self.kind!r})"


class Zero(SeparableRegularizer):
    kind = "zero"

    def __init__(self):
        super().__init__()


class WeightedL1(SeparableRegularizer):
    """``g(x) = sum_i w_i |x_i|`` (scalar weight broadcasts)."""

    kind = "weighted_l1"

    def __init__(self, weights):
        super().__init__(weights=weights)


class BoxIndicator(SeparableRegularizer):
    """Indicator of ``lower <= x <= upper`` (infinite bounds allowed)."""

    kind = "box"

    def __init__(self, lower, upper):
        super().__init__(lower=lower, upper=upper)


class BallIndicator(Regularizer):
    """Indicator of ``||x - center|| <= radius`` in the l2 or linf norm."""

    kind = "ball"
    feas_tol = 1e-12

    def __init__(self, center, radius, norm="l2"):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.norm = NormChoice(norm)
        if not self.radius >= 0:
            raise ValueError("ball radius must be nonnegative")
        self._box = None
        if self.norm.kind == "linf":
            self._box = BoxIndicator(self.center - self.radius, self.center + self.radius)

    def __call__(self, x):
        if self._box is not None:
            return self._box(x)
        dist = float(np.linalg.norm(np.asarray(x, dtype=float) - self.center))
        return 0.0 if dist <= self.radius * (1 + self.feas_tol) + self.feas_tol else math.inf

    def batch(self, X):
        if self._box is not None:
            return self._box.batch(X)
        dist = np.linalg.norm(np.asarray(X, dtype=float) - self.center, axis=1)
        return np.where(dist <= self.radius * (1 + self.feas_tol) + self.feas_tol, 0.0, math.inf)

    def _project(self, v, center):
        u = v - center
        nrm = np.linalg.norm(u)
        return v if nrm <= self.radius else center + u * (self.radius / nrm)

    def prox(self, v, step):
        if self._box is not None:
            return self._box.prox(v, step)
        return self._project(np.asarray(v, dtype=float), self.center)

    def conjugate(self, w):
        w = np.asarray(w, dtype=float)
        return float(self.center @ w) + self.radius * self.norm.dual(w)

    def restricted_prox(self, x, v, step, radius, norm):
        if self._box is not None:
            return self._box.restricted_prox(x, v, step, radius, norm)
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if norm.kind == "l2":
            return super().restricted_prox(x, v, step, radius, norm)
        p = self.center - x

        def at(rho):
            return np.clip((v + step * rho * p) / (1.0 + step * rho), -radius, radius)

        rho = smallest_multiplier(lambda r: np.linalg.norm(at(r) - p) - self.radius)
        return self._pull_inside(x, at(rho))

    def _pull_inside(self, x, d):
        # largest s in [0, 1] with x + s d inside the ball
        u = x - self.center
        if np.linalg.norm(u + d) <= self.radius:
            return d
        a, b, c = float(d @ d), 2.0 * float(u @ d), float(u @ u) - self.radius**2
        s = (-b + math.sqrt(max(b * b - 4 * a * c, 0.0))) / (2 * a)
        return d * min(max(s, 0.0), 1.0)

    def restricted_linear_min(self, x, w, radius, norm):
        if self._box is not None:
            return self._box.restricted_linear_min(x, w, radius, norm)
        x = np.asarray(x, dtype=float)
        w = np.asarray(w, dtype=float)
        nrm_w = float(np.linalg.norm(w))
        if nrm_w == 0:
            return 0.0, np.zeros_like(x)
        p = self.center - x
        if norm.kind == "l2":
            # dualize the trust ball: d(nu) projects x - w / nu onto this ball
            def q_trust(nus):
                u = p[None, :] + (w[None, :] / nus[:, None])
                lens = np.linalg.norm(u, axis=1)
                shrink = np.minimum(1.0, self.radius / np.maximum(lens, 1e-300))
                d = p[None, :] - u * shrink[:, None]
                vals = d @ w + 0.5 * nus * (np.einsum("ij,ij->i", d, d) - radius**2)
                return vals, d

            val, d = maximize_concave_grid(q_trust, nrm_w / radius)
            best = val, _shrink_into_ball(d, radius, norm)
            d0 = p - self.radius * w / nrm_w
            if np.linalg.norm(d0) <= radius and float(w @ d0) > best[0]:
                return float(w @ d0), d0
            return best

        def q(rhos):
            d = np.clip(p[None, :] - w[None, :] / rhos[:, None], -radius, radius)
            e = d - p[None, :]
            vals = d @ w + 0.5 * rhos * (np.einsum("ij,ij->i", e, e) - self.radius**2)
            return vals, d

        val, d = maximize_concave_grid(q, nrm_w / max(self.radius, 1e-12))
        d0 = -radius * np.sign(w)
        if np.linalg.norm(d0 - p) <= self.radius and float(w @ d0) > val:
            return float(w @ d0), d0
        return val, self._pull_inside(x, d)

    def __repr__(self):
        return f"BallIndicator(radius={self.radius}, norm={self.norm.kind!r})"
