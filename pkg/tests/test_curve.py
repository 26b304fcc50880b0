from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from toricount.curve import (CurveError, curve_from_config, curve_preset, elliptic_q2a2, h0,
                             kapranov_zeta, make_curve, numerator_at, pic0_count, point_counts,
                             rational_curve, zeta_numerator_series, zeta_value)
from toricount.gring import MotClass, count_specialize
from toricount.mvseries import MultiSeries, Truncation

L = MotClass.monomial(1)
ELL = elliptic_q2a2()


def test_make_curve_examples():
    assert rational_curve().is_rational
    assert ELL.genus == 1 and pic0_count(ELL, 2) == 5
    with pytest.raises(CurveError):
        make_curve(1, (2, 1))
    with pytest.raises(CurveError):
        make_curve(0, (1, 1))
    with pytest.raises(CurveError):
        make_curve(-1)


def test_config_forms():
    assert curve_from_config("p1") == rational_curve()
    cfg = curve_from_config({"genus": 1, "numerator_coeffs": [1, 2, 2], "label": "E"})
    assert cfg.numerator == ELL.numerator
    with pytest.raises(CurveError):
        curve_from_config({"genus": 1, "numerater": [1, 2, 2]})
    with pytest.raises(CurveError):
        curve_preset("hyperelliptic")


def test_p1_point_counts():
    pc = point_counts(rational_curve(), 2, 2)
    assert (pc.N(1), pc.N(2), pc.B(1), pc.B(2)) == (3, 5, 3, 1)
    assert point_counts(rational_curve(), 3, 1).B(1) == 4


def test_elliptic_point_counts_by_newton():
    # P = 1 + 2T + 2T^2 = (1 - a T)(1 - b T) with a + b = -2, ab = 2
    power_sums = {1: -2, 2: 0}
    for k in range(3, 7):
        power_sums[k] = -2 * power_sums[k - 1] - 2 * power_sums[k - 2]
    pc = point_counts(ELL, 2, 6)
    for k in range(1, 7):
        assert pc.N(k) == 2 ** k + 1 - power_sums[k]
    assert pc.N(1) == 5


def test_zeta_coefficients():
    z = kapranov_zeta(rational_curve(), 4)
    assert z.coeff((0,)) == 1
    assert z.coeff((2,)) == 1 + L + L * L
    e = kapranov_zeta(ELL, 4)
    assert count_specialize(e.coeff((1,)), 2).rational_value() == 5


@pytest.mark.parametrize("curve", [rational_curve(), ELL], ids=["p1", "elliptic"])
def test_zeta_times_denominator_is_numerator(curve):
    t = Truncation(None, 8)
    z = kapranov_zeta(curve, 8)
    den = MultiSeries(1, {(0,): MotClass.const(1), (1,): -(1 + L), (2,): L}, t)
    assert z * den == zeta_numerator_series(curve).restrict(t)


def test_h0_examples():
    assert h0(rational_curve(), 3) == 4
    assert h0(rational_curve(), -1) == 0
    g2 = make_curve(2)
    assert h0(g2, 5) == 4
    with pytest.raises(CurveError):
        h0(g2, 2)


def test_pic0_and_numerator_values():
    assert pic0_count(rational_curve(), 7) == 1
    assert numerator_at(ELL, 2, 1) == 5
    assert numerator_at(ELL, 2, Fraction(1, 2)) == 1 + 1 + Fraction(1, 2)
    # functional equation: P(1/q) = q^{-g} P(1)
    assert numerator_at(ELL, 2, Fraction(1, 2)) == Fraction(pic0_count(ELL, 2), 2)


def test_zeta_value_at_small_argument():
    # Z_{P1}(t) = 1 / ((1 - t)(1 - q t))
    assert zeta_value(rational_curve(), 3, Fraction(1, 9)) == 1 / (Fraction(8, 9) * Fraction(2, 3))


@given(st.sampled_from([2, 3, 4, 5, 7]), st.integers(1, 8))
def test_points_by_degree_recover_counts(q, m):
    pc = point_counts(rational_curve(), q, m)
    assert sum(e * pc.B(e) for e in range(1, m + 1) if m % e == 0) == pc.N(m) == q ** m + 1


@given(st.integers(1, 8))
def test_elliptic_degree_sums(m):
    pc = point_counts(ELL, 2, m)
    assert sum(e * pc.B(e) for e in range(1, m + 1) if m % e == 0) == pc.N(m)
    assert all(pc.B(e) >= 0 for e in range(1, m + 1))


@given(st.integers(0, 9))
def test_zeta_coefficients_count_effective_divisors(d):
    """#Sym^d P^1(F_q) is q^d + ... + 1."""
    z = kapranov_zeta(rational_curve(), 9)
    for q in (2, 3):
        assert count_specialize(z.coeff((d,)), q).rational_value() == sum(q ** i for i in range(d + 1))
