from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from toricount import ffcount
from toricount.fan import library_fan, picard_lattice
from toricount.ffcount import (INFINITY, BinaryForm, BudgetExceeded, PointDivisor,
                               campana_admissible, closed_points, count_both, count_hom_divisors,
                               count_hom_forms, effective_divisors, field, forms_of_degree,
                               multiplicity_profile, raw_form_count)

P1, P2, P1XP1, F1 = (library_fan(n) for n in ("p1", "p2", "p1xp1", "f1"))
QS = [2, 3, 4, 5, 7, 8, 9]


def naive_raw_count(fan, q, d, m=None):
    """Tuples of forms, filtered by factoring every form into closed points."""
    m = m or (1,) * fan.n_rays
    table = closed_points(q, max(max(d), 1))
    lists = []
    for di, mi in zip(d, m):
        keep = []
        for f in forms_of_degree(q, di):
            D = multiplicity_profile(f, table)
            if campana_admissible(D, mi):
                keep.append(D.support())
        lists.append(keep)
    total = 0
    for supports in product(*lists):
        if all(frozenset.intersection(*(supports[i] for i in c)) == frozenset()
               for c in fan.collections):
            total += 1
    return total


# ---------------------------------------------------------------- fields

@pytest.mark.parametrize("q", QS)
def test_field_axioms(q):
    F = field(q)
    for a in range(q):
        assert F.add[a][0] == a and F.mul[a][1] == a
        assert F.add[a][F.neg[a]] == 0
        if a:
            assert F.mul[a][F.inv[a]] == 1
        for b in range(q):
            assert F.add[a][b] == F.add[b][a]
            assert F.mul[a][b] == F.mul[b][a]
            assert F.sub[F.add[a][b]][b] == a


@pytest.mark.parametrize("q", QS)
def test_multiplicative_group_is_cyclic(q):
    F = field(q)
    orders = set()
    for a in range(1, q):
        x, k = a, 1
        while x != 1:
            x, k = F.mul[x][a], k + 1
        orders.add(k)
    assert max(orders) == q - 1


def test_non_prime_power_rejected():
    with pytest.raises(ValueError):
        field(6)


def poly_add(F, a, b):
    n = max(len(a), len(b))
    a, b = list(a) + [0] * (n - len(a)), list(b) + [0] * (n - len(b))
    return F.trim([F.add[x][y] for x, y in zip(a, b)])


@given(st.sampled_from([2, 3, 4, 5]), st.data())
@settings(max_examples=40, deadline=None)
def test_polynomial_division(q, data):
    F = field(q)
    coeffs = st.lists(st.integers(0, q - 1), min_size=1, max_size=6)
    a = F.trim(data.draw(coeffs))
    b = F.trim(data.draw(coeffs))
    if not any(b):
        return
    quo, rem = F.poly_divmod(a, b)
    assert poly_add(F, F.poly_mul(quo, b), rem) == F.trim(a)
    assert len(F.trim(rem)) < len(b) or not any(rem)


# --------------------------------------------------------- closed points

def test_closed_points_over_f2():
    table = closed_points(2, 2)
    assert table.by_degree[0] == (INFINITY, (0, 1), (1, 1))
    assert table.by_degree[1] == ((1, 1, 1),)
    assert table.count(1) == 3


@pytest.mark.parametrize("q", [2, 3, 4, 5])
@pytest.mark.parametrize("e", [1, 2, 3])
def test_closed_point_counts_follow_necklace_formula(q, e):
    table = closed_points(q, e)
    # sum_{k | e} k * B_k = q^e + 1
    assert sum(k * table.count(k) for k in range(1, e + 1) if e % k == 0) == q ** e + 1


def test_multiplicity_profile_examples():
    table = closed_points(2, 3)
    assert multiplicity_profile(BinaryForm(2, 3, (1, 0, 0, 0)), table).multiplicities() == {(0, 1): 3}
    f = BinaryForm(2, 3, (0, 0, 1, 0))  # u * v^2 ... coefficient of u^1 v^2
    assert multiplicity_profile(f, table).multiplicities() == {INFINITY: 2, (0, 1): 1}
    assert multiplicity_profile(BinaryForm(2, 2, (1, 1, 1)), table).multiplicities() == {(1, 1, 1): 1}
    assert multiplicity_profile(BinaryForm(2, 3, (1, 1, 1, 1)), table).multiplicities() == {(1, 1): 3}


def test_campana_filter_examples():
    p, r = (0, 1), (1, 1)
    assert campana_admissible(PointDivisor(()), 2)
    assert not campana_admissible(PointDivisor(((p, 1),)), 2)
    assert campana_admissible(PointDivisor(((p, 3), (r, 2))), 2)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_forms_and_divisors_correspond(q, d):
    table = closed_points(q, d)
    divisors = {str(D) for D in effective_divisors(table, d)}
    seen = {}
    for f in forms_of_degree(q, d):
        key = str(multiplicity_profile(f, table))
        seen[key] = seen.get(key, 0) + 1
    assert set(seen) == divisors
    assert set(seen.values()) == {q - 1}


# ------------------------------------------------------------ the oracles

def test_spec_examples():
    assert count_hom_forms(P1, 2, (1, 1)) == 6
    assert count_hom_forms(P2, 2, (1, 1, 1)) == 24
    assert count_hom_forms(P1, 3, (2, 2), (2, 2)) == 24
    assert count_hom_divisors(P1, 2, (1, 1)) == 6
    assert count_hom_divisors(P2, 2, (1, 1, 1)) == 24


@pytest.mark.parametrize("q", [2, 3, 4])
@pytest.mark.parametrize("d", [1, 2])
def test_p1_closed_form(q, d):
    assert count_both(P1, q, (d, d)) == q ** (2 * d + 1) - q ** (2 * d - 1)


@pytest.mark.parametrize("fan,q,d,m", [
    (P1, 2, (2, 2), None), (P1, 3, (2, 2), (2, 2)), (P1, 2, (3, 3), (2, 2)),
    (P1, 2, (3, 3), (2, 3)), (P2, 2, (1, 1, 1), None), (P2, 2, (2, 2, 2), None),
    (P2, 3, (1, 1, 1), None), (P1XP1, 2, (1, 1, 1, 1), None), (P1XP1, 2, (1, 1, 2, 2), None),
    (F1, 2, (1, 1, 1, 2), None), (F1, 3, (1, 0, 1, 1), None), (P2, 2, (2, 2, 2), (2, 2, 2)),
])
def test_oracles_agree_with_naive_enumeration(fan, q, d, m):
    naive = naive_raw_count(fan, q, d, m)
    raw = raw_form_count(fan, q, d, m)
    assert raw == naive
    assert count_hom_forms(fan, q, d, m) * (q - 1) ** picard_lattice(fan).rank == raw
    assert count_hom_divisors(fan, q, d, m) == count_hom_forms(fan, q, d, m)


@pytest.mark.parametrize("fan,d", [(P2, (1, 2, 1)), (P1, (1, 2)), (P1XP1, (1, 2, 1, 1))])
def test_inadmissible_degrees_count_zero(fan, d):
    assert raw_form_count(fan, 2, d) == 0
    assert count_hom_divisors(fan, 2, d) == 0


def test_partitions_and_workers_agree():
    base = raw_form_count(P2, 3, (2, 2, 2), partitions=1)
    assert raw_form_count(P2, 3, (2, 2, 2), partitions=7) == base
    assert raw_form_count(P2, 3, (2, 2, 2), workers=2) == base
    assert count_hom_divisors(P2, 3, (2, 2, 2), workers=2, partitions=5) == \
        count_hom_divisors(P2, 3, (2, 2, 2), partitions=1)


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        raw_form_count(P2, 3, (3, 3, 3), budget=1000)
    with pytest.raises(BudgetExceeded):
        count_hom_divisors(P2, 3, (3, 3, 3), budget=1000)
    assert ffcount.budget_from("small").max_tuples == 2 * 10 ** 6
    assert ffcount.budget_from(None).max_tuples is None


def test_bad_arguments():
    with pytest.raises(ValueError):
        raw_form_count(P2, 2, (1, 1))
    with pytest.raises(ValueError):
        raw_form_count(P2, 2, (1, 1, 1), (2, 2))
    with pytest.raises(ValueError):
        raw_form_count(P1, 2, (-1, -1))


@given(st.sampled_from([2, 3]), st.integers(0, 2), st.integers(0, 2))
@settings(max_examples=12, deadline=None)
def test_torus_divides_every_raw_count(q, a, b):
    for fan, d in ((P1XP1, (a, a, b, b)), (F1, (a, b, a, a + b))):
        if q ** sum(d) > 10 ** 4:
            continue
        raw = raw_form_count(fan, q, d)
        assert raw % (q - 1) ** picard_lattice(fan).rank == 0
