from fractions import Fraction

from hypothesis import given, strategies as st
import pytest

from qframe.dyadic import DyadicValue

dyadics = st.builds(DyadicValue.make, st.integers(-10**6, 10**6), st.integers(-8, 40))


def test_make_normalizes():
    assert DyadicValue.make(12, 3) == DyadicValue(3, 1)
    assert DyadicValue.make(0, 7) == DyadicValue(0, 0)
    assert DyadicValue.make(3, -2) == DyadicValue(12, 0)


def test_invalid_forms_rejected():
    with pytest.raises(ValueError):
        DyadicValue(4, 2)
    with pytest.raises(ValueError):
        DyadicValue(0, 1)
    with pytest.raises(ValueError):
        DyadicValue.from_fraction(Fraction(1, 3))


def test_decimal_is_exact():
    assert DyadicValue.make(-151, 4).decimal() == "-9.4375"
    assert DyadicValue.make(1, 64).decimal() == "0." + str(5**64).rjust(64, "0")
    assert DyadicValue.make(0).decimal() == "0"


@given(dyadics, dyadics)
def test_field_ops_match_fractions(a, b):
    fa, fb = a.to_fraction(), b.to_fraction()
    assert (a + b).to_fraction() == fa + fb
    assert (a - b).to_fraction() == fa - fb
    assert (a * b).to_fraction() == fa * fb
    assert (a < b) == (fa < fb)
    assert (a == b) == (fa == fb)
    assert abs(a).to_fraction() == abs(fa)
    assert DyadicValue.from_fraction(fa) == a
    assert DyadicValue.parse(str(fa)) == a
