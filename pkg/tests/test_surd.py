import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from boolcomp.surd import Surd, sign_sqrt2, sign_sqrt3

F = Fraction
small = st.fractions(min_value=-20, max_value=20, max_denominator=7)
rad = st.integers(0, 50)


def test_normalization():
    assert Surd(1, 2, 9) == 7 and Surd(1, 2, 9).is_rational
    assert Surd(0, 1, 8) == Surd(0, 2, 2)
    assert str(Surd.sqrt(3)) == "0+1*sqrt(3)"
    with pytest.raises(ValueError):
        Surd(0, 1, -1)


def test_arithmetic():
    r2 = Surd.sqrt(2)
    assert r2 * r2 == 2
    assert (1 + r2) ** 2 == Surd(3, 2, 2)
    assert (r2 / 2) * 2 == r2
    with pytest.raises(ValueError):
        r2 + Surd.sqrt(3)
    with pytest.raises(ValueError):
        Surd(1) / r2


def test_bracket():
    lo, hi = Surd.sqrt(2).bracket(12)
    assert lo <= F(14142135623731, 10**13) and hi - lo <= F(1, 10**12)
    assert lo * lo <= 2 <= hi * hi


@given(small, small, rad, small, small, rad)
def test_order_matches_float(p1, q1, d1, p2, q2, d2):
    a, b = Surd(p1, q1, d1), Surd(p2, q2, d2)
    fa, fb = float(a), float(b)
    if abs(fa - fb) > 1e-9:
        assert (a < b) == (fa < fb)
    assert (a == b) == (a._cmp(b) == 0)


@given(small, small, rad)
def test_sign_sqrt2(a, b, r):
    v = float(a) + float(b) * math.sqrt(r)
    if abs(v) > 1e-9:
        assert sign_sqrt2(a, b, F(r)) == (1 if v > 0 else -1)


@given(small, small, rad, small, rad)
def test_sign_sqrt3(a, b, r1, c, r2):
    v = float(a) + float(b) * math.sqrt(r1) + float(c) * math.sqrt(r2)
    if abs(v) > 1e-9:
        assert sign_sqrt3(a, b, F(r1), c, F(r2)) == (1 if v > 0 else -1)


def test_exact_zero_sqrt3():
    # sqrt(8) - 2 sqrt(2) = 0
    assert sign_sqrt3(F(0), F(1), F(8), F(-2), F(2)) == 0
