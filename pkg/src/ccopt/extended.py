"""Extended-real numbers: finite floats plus a saturating ``+inf``.

Minus infinity and NaN are never representable; constructing either raises
``ValueError``. Arithmetic saturates at ``+inf`` and refuses ``inf - inf``.
"""

from __future__ import annotations

import functools
import math
from numbers import Real

__all__ = ["ExtendedReal", "INF"]


@functools.total_ordering
class ExtendedReal:
    """A value in ``R ∪ {+inf}``.

    The finite part and the infinity flag are stored separately so that
    comparisons and sums never pass through IEEE NaN.

    >>> ExtendedReal(2.0) + ExtendedReal.inf()
    ExtendedReal(inf)
    >>> ExtendedReal(1.5) < math.inf
    True
    """

    __slots__ = ("_value", "_infinite")

    def __init__(self, value=0.0):
        if isinstance(value, ExtendedReal):
            self._value, self._infinite = value._value, value._infinite
            return
        v = float(value)
        if math.isnan(v):
            raise ValueError("extended real cannot be NaN")
        if v == -math.inf:
            raise ValueError("extended real cannot be -inf")
        self._infinite = v == math.inf
        self._value = 0.0 if self._infinite else v

    @classmethod
    def inf(cls) -> ExtendedReal:
        return cls(math.inf)

    @property
    def is_finite(self) -> bool:
        return not self._infinite

    @property
    def is_infinite(self) -> bool:
        return self._infinite

    @property
    def value(self) -> float:
        """The float view (``math.inf`` when infinite)."""
        return math.inf if self._infinite else self._value

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return "ExtendedReal(inf)" if self._infinite else f"ExtendedReal({self._value!r})"

    def __hash__(self):
        return hash(self.value)

    @staticmethod
    def _coerce(other) -> ExtendedReal | None:
        if isinstance(other, ExtendedReal):
            return other
        if isinstance(other, Real):
            return ExtendedReal(other)
        return None

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._infinite == o._infinite and self._value == o._value

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._infinite:
            return False
        return o._infinite or self._value < o._value

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._infinite or o._infinite:
            return ExtendedReal.inf()
        return ExtendedReal(self._value + o._value)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o._infinite:
            raise ValueError("cannot subtract +inf in the extended reals")
        if self._infinite:
            return ExtendedReal.inf()
        return ExtendedReal(self._value - o._value)

    def __mul__(self, other):
        if not isinstance(other, Real):
            return NotImplemented
        t = float(other)
        if self._infinite:
            if t < 0:
                raise ValueError("negative multiple of +inf is not an extended real")
            # 0 * inf = 0 (positive homogeneity convention)
            return ExtendedReal(0.0) if t == 0 else ExtendedReal.inf()
        return ExtendedReal(self._value * t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Real):
            return NotImplemented
        t = float(other)
        if t <= 0:
            raise ValueError("extended reals may only be divided by positive numbers")
        return self * (1.0 / t)


INF = ExtendedReal.inf()
