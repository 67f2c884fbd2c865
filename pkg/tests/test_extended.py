import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccopt import INF, ExtendedReal

finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-1e12, max_value=1e12)
extended = st.one_of(finite.map(ExtendedReal), st.just(INF))


def test_construction_rejects_nan_and_minus_inf():
    with pytest.raises(ValueError):
        ExtendedReal(float("nan"))
    with pytest.raises(ValueError):
        ExtendedReal(-math.inf)


def test_infinity_absorbs_addition():
    assert ExtendedReal(3.0) + INF == INF
    assert (INF + 5).is_infinite
    assert (2.5 + ExtendedReal(1.0)).value == 3.5


def test_inf_minus_inf_is_rejected():
    with pytest.raises(ValueError):
        INF - INF
    with pytest.raises(ValueError):
        ExtendedReal(1.0) - INF
    assert (INF - 4.0).is_infinite


def test_scalar_multiples():
    assert INF * 0 == 0
    assert (INF * 2).is_infinite
    assert ExtendedReal(2.0) * 3 == 6
    assert (INF / 4).is_infinite
    with pytest.raises(ValueError):
        INF * -1
    with pytest.raises(ValueError):
        ExtendedReal(1.0) / 0


def test_float_view_and_repr():
    assert float(INF) == math.inf
    assert float(ExtendedReal(-2)) == -2.0
    assert repr(INF) == "ExtendedReal(inf)"
    assert ExtendedReal(ExtendedReal(1.25)).value == 1.25


@given(extended, extended)
def test_ordering_is_total_and_matches_floats(a, b):
    assert (a < b) + (a == b) + (a > b) == 1
    assert (a <= b) == (float(a) <= float(b))


@given(extended, extended)
def test_addition_matches_float_semantics(a, b):
    s = a + b
    assert s == b + a
    assert float(s) == float(a) + float(b)
    assert s.is_infinite == (a.is_infinite or b.is_infinite)


@given(finite)
def test_everything_finite_is_below_infinity(v):
    assert ExtendedReal(v) < INF
    assert ExtendedReal(v) < math.inf
    assert not INF < v
