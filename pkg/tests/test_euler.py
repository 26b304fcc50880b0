from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from toricount.curve import elliptic_q2a2, kapranov_zeta, rational_curve
from toricount.euler import (LocalFactor, campana_admissible_local, campana_moebius,
                             classical_moebius, euler_product_counting, euler_product_motivic,
                             factored_campana_product, in_admissible_set, moebius_value,
                             multiplicativity_check, specialize_series, torus_factor,
                             unconstrained_series)
from toricount.fan import cone_supported, library_fan
from toricount.gring import MotClass
from toricount.mvseries import MultiSeries, Truncation, region

L = MotClass.monomial(1)
P1, P2, P1XP1 = library_fan("p1"), library_fan("p2"), library_fan("p1xp1")
FANS = ["p1", "p2", "p1xp1", "f1", "f2", "dp6"]


def poly(nvars, terms, trunc=None):
    return MultiSeries(nvars, dict(terms), trunc)


def test_classical_moebius_examples():
    assert classical_moebius(P1).series == poly(2, {(0, 0): 1, (1, 1): -1})
    assert classical_moebius(P2).series == poly(3, {(0, 0, 0): 1, (1, 1, 1): -1})
    a = poly(4, {(0, 0, 0, 0): 1, (1, 1, 0, 0): -1})
    b = poly(4, {(0, 0, 0, 0): 1, (0, 0, 1, 1): -1})
    assert classical_moebius(P1XP1).series == a * b


def test_admissible_examples():
    t = Truncation(None, 6)
    adm = campana_admissible_local(P1, (2, 2), 6).series
    expected = {(0, 0): 1}
    for k in range(2, 7):
        expected[(k, 0)] = expected[(0, k)] = 1
    assert adm == poly(2, expected, t)
    assert campana_admissible_local(P2, None, 4).series.coeff((1, 1, 1)) == 0
    for name in FANS:
        fan = library_fan(name)
        assert campana_admissible_local(fan, None, 3).series.constant_term() == 1


def test_campana_moebius_examples():
    mu = campana_moebius(P1, (2, 2), 6).series
    assert mu.coeff((2, 2)) == -1
    assert mu.coeff((2, 0)) == 0
    assert campana_moebius(P1, (1, 1), 6).series == classical_moebius(P1).series.restrict(mu.trunc)


def test_counting_product_examples():
    q = 2
    ep = euler_product_counting(classical_moebius(P1), rational_curve(), q, 6)
    assert ep.coeff((1, 1)) == -3
    one = LocalFactor(MultiSeries.one(2, Truncation(None, 6)))
    assert euler_product_counting(one, rational_curve(), q, 6) == MultiSeries.one(2, Truncation(None, 6))


@pytest.mark.parametrize("q", [2, 3])
def test_admissible_product_closed_form(q):
    ep = euler_product_counting(campana_admissible_local(P1, None, 6), rational_curve(), q, 6)
    for d in (1, 2, 3):
        assert ep.coeff((d, d)) == q ** (2 * d - 1) * (q + 1)


def test_motivic_product_examples():
    t = Truncation(None, 6)
    geo = LocalFactor(MultiSeries.one(1, t).divide(poly(1, {(0,): 1, (1,): -1}, t)))
    for curve in (rational_curve(), elliptic_q2a2()):
        assert euler_product_motivic(geo, curve, t) == kapranov_zeta(curve, 6)
    ep = euler_product_motivic(classical_moebius(P1), rational_curve(), t)
    expected = poly(2, {(0, 0): 1, (1, 1): -1}, t) * poly(2, {(0, 0): 1, (1, 1): -L}, t)
    assert ep == expected.map_coeffs(lambda c: MotClass.const(1) * c)


def test_multiplicativity_examples():
    t = Truncation(None, 6)
    F = classical_moebius(P1)
    G = LocalFactor(MultiSeries.one(2, t).divide(poly(2, {(0, 0): 1, (1, 0): -1}, t)))
    assert multiplicativity_check(F, G, rational_curve(), 2, t) == (True, None)
    one = LocalFactor(MultiSeries.one(2))
    assert multiplicativity_check(one, one, rational_curve(), 2, t)[0]


@pytest.mark.parametrize("name", FANS)
def test_moebius_support_and_valuation(name):
    fan = library_fan(name)
    mu = classical_moebius(fan).series
    for e, v in mu.items():
        assert set(e) <= {0, 1}
        assert v == moebius_value(fan, {i for i, x in enumerate(e) if x})
        assert sum(e) != 1


@pytest.mark.parametrize("name", FANS)
def test_moebius_inverts_cone_indicator(name):
    fan = library_fan(name)
    box = Truncation((3,) * fan.n_rays, None)
    mu = classical_moebius(fan).series
    geometric = MultiSeries.one(fan.n_rays, box)
    for i in range(fan.n_rays):
        k = tuple(1 if j == i else 0 for j in range(fan.n_rays))
        geometric = geometric.divide(MultiSeries.binomial(fan.n_rays, k, Fraction(1), 1, box)
                                     .map_coeffs(Fraction))
    product_ = mu.restrict(box) * geometric
    for e in region(fan.n_rays, box):
        support = {i for i, x in enumerate(e) if x}
        assert product_.coeff(e) == (1 if cone_supported(fan, support) else 0)


@pytest.mark.parametrize("name", ["p1", "p2", "p1xp1", "f1"])
def test_campana_moebius_valuation(name):
    fan = library_fan(name)
    m = (2,) * fan.n_rays
    mu = campana_moebius(fan, m, 6).series
    for e, v in mu.items():
        if any(e):
            assert sum(1 for x in e if x) >= 2, e


@pytest.mark.parametrize("name", ["p1", "p2", "f1"])
def test_campana_moebius_times_unconstrained_is_admissible(name):
    fan = library_fan(name)
    m = (2,) * fan.n_rays
    mu = campana_moebius(fan, m, 6).series
    assert mu * unconstrained_series(fan, m, 6) == campana_admissible_local(fan, m, 6).series


def test_torus_factor_and_admissible_set():
    assert torus_factor(P1, (2, 3)).series == poly(2, {(0, 0): 1, (2, 0): -1}) * poly(2, {(0, 0): 1, (0, 3): -1})
    assert in_admissible_set(P1, (0, 2), (2, 2))
    assert not in_admissible_set(P1, (0, 1), (2, 2))
    assert not in_admissible_set(P1, (2, 2), (2, 2))


@pytest.mark.parametrize("name", ["p1", "p2"])
@pytest.mark.parametrize("m", [None, 2])
def test_factorised_product_matches_direct(name, m):
    fan = library_fan(name)
    mm = None if m is None else (m,) * fan.n_rays
    t = Truncation(None, 6)
    direct = euler_product_motivic(campana_admissible_local(fan, mm, t), rational_curve(), t)
    assert factored_campana_product(fan, rational_curve(), mm, t) == direct


@pytest.mark.parametrize("curve", [rational_curve(), elliptic_q2a2()], ids=["p1", "elliptic"])
def test_two_paths_agree_on_p1xp1(curve):
    t = Truncation(None, 6)
    local = campana_admissible_local(P1XP1, None, t)
    motivic = specialize_series(euler_product_motivic(local, curve, t), 2)
    assert motivic == euler_product_counting(local, curve, 2, t)


unit_polys = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(any),
    st.integers(-3, 3), max_size=4,
).map(lambda d: LocalFactor(MultiSeries(2, {(0, 0): 1, **d})))


@given(unit_polys, unit_polys, st.sampled_from([2, 3]))
@settings(max_examples=25, deadline=None)
def test_multiplicativity_random(F, G, q):
    ok, bad = multiplicativity_check(F, G, rational_curve(), q, 5)
    assert ok, bad


@given(unit_polys)
@settings(max_examples=20, deadline=None)
def test_random_two_path(F):
    t = Truncation(None, 5)
    for curve in (rational_curve(), elliptic_q2a2()):
        motivic = specialize_series(euler_product_motivic(F, curve, t), 2)
        assert motivic == euler_product_counting(F, curve, 2, t)


def test_local_factor_needs_unit_constant():
    with pytest.raises(ValueError):
        LocalFactor(MultiSeries(1, {(0,): 2}))


def test_moebius_values_by_inclusion_exclusion():
    fan = P2
    for bits in product((0, 1), repeat=3):
        S = {i for i, b in enumerate(bits) if b}
        expected = sum((-1) ** (len(S) - len(T)) for k in range(len(S) + 1)
                       for T in map(set, combinations(sorted(S), k))
                       if cone_supported(fan, T))
        assert moebius_value(fan, S) == expected
