"""Local series of a fan and their Euler products over a curve.

Every local factor here is a constant family: the same series at every
closed point p, with L replaced by L^{deg p} and T by T^{deg p}.  Euler
products are expanded two ways:

* counting: an honest product over closed points of C, grouped by degree
  and raised to the number B_e of closed points of each degree;
* motivic: the local series is factored as prod (1 - L^j T^k)^(-b), and each
  factor contributes Z_C(L^j T^k)^b (Kapranov zeta function).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from toricount.curve import CurveModel, kapranov_zeta, point_counts
from toricount.fan import Fan, cone_supported
from toricount.gring import MotClass, specialize_rational
from toricount.mvseries import (MultiSeries, Truncation, first_discrepancy,
                                geometric_decompose, region)

ONE = MotClass.const(1)


@dataclass(frozen=True)
class LocalFactor:
    series: MultiSeries
    label: str = ""

    def __post_init__(self):
        c0 = self.series.constant_term()
        if c0 != 1:
            raise ValueError(f"local factor must have constant term 1, got {c0}")

    @property
    def constant_term_one(self):
        return True

    @property
    def nvars(self):
        return self.series.nvars

    def __mul__(self, other):
        return LocalFactor(self.series * other.series, f"{self.label}*{other.label}")


def _trunc(bound):
    if isinstance(bound, Truncation):
        return bound
    return Truncation(None, int(bound))


def _multiplicities(fan, m):
    m = (1,) * fan.n_rays if m is None else tuple(int(x) for x in m)
    if len(m) != fan.n_rays:
        raise ValueError(f"need {fan.n_rays} multiplicities, got {len(m)}")
    if any(x < 1 for x in m):
        raise ValueError("multiplicities must be >= 1")
    return m


def moebius_value(fan: Fan, support) -> int:
    """mu_B(e) for e the indicator vector of ``support`` (inclusion-exclusion)."""
    S = tuple(sorted(support))
    total = 0
    for k in range(len(S) + 1):
        for sub in combinations(S, k):
            if cone_supported(fan, sub):
                total += (-1) ** (len(S) - k)
    return total


def classical_moebius(fan: Fan) -> LocalFactor:
    N = fan.n_rays
    coeffs = {}
    for k in range(N + 1):
        for S in combinations(range(N), k):
            v = moebius_value(fan, S)
            if v:
                e = tuple(int(i in S) for i in range(N))
                coeffs[e] = MotClass.const(v)
    return LocalFactor(MultiSeries(N, coeffs), f"moebius[{fan.label}]")


def in_admissible_set(fan: Fan, n, m) -> bool:
    """n in A(B_Sigma)_m: cone-supported support, nonzero entries >= m_i."""
    supp = [i for i, x in enumerate(n) if x]
    if any(n[i] < m[i] for i in supp):
        return False
    return cone_supported(fan, supp)


def campana_admissible_local(fan: Fan, m=None, bound=8) -> LocalFactor:
    m = _multiplicities(fan, m)
    t = _trunc(bound)
    coeffs = {e: ONE for e in region(fan.n_rays, t) if in_admissible_set(fan, e, m)}
    return LocalFactor(MultiSeries(fan.n_rays, coeffs, t), f"admissible[{fan.label},m={m}]")


def unconstrained_factor(nvars, i, mi, bound) -> MultiSeries:
    """1 + T_i^{m_i} / (1 - T_i): each coordinate is 0 or >= m_i."""
    t = _trunc(bound)
    coeffs = {}
    for x in range(0, (t.total if t.total is not None else t.box[i]) + 1):
        if x == 0 or x >= mi:
            e = tuple(x if j == i else 0 for j in range(nvars))
            coeffs[e] = ONE
    return MultiSeries(nvars, coeffs, t)


def unconstrained_series(fan: Fan, m=None, bound=8) -> MultiSeries:
    m = _multiplicities(fan, m)
    acc = MultiSeries.one(fan.n_rays, _trunc(bound), one=ONE)
    for i, mi in enumerate(m):
        acc = acc * unconstrained_factor(fan.n_rays, i, mi, bound)
    return acc


def campana_moebius(fan: Fan, m=None, bound=8) -> LocalFactor:
    """P^eps = (admissible series) / prod_i (1 + T_i^{m_i}/(1 - T_i))."""
    m = _multiplicities(fan, m)
    acc = campana_admissible_local(fan, m, bound).series
    for i, mi in enumerate(m):
        acc = acc.divide(unconstrained_factor(fan.n_rays, i, mi, bound))
    return LocalFactor(acc, f"campana-moebius[{fan.label},m={m}]")


def torus_factor(fan: Fan, m=None) -> LocalFactor:
    """prod_i (1 - T_i^{m_i}), the factor cancelled by prod_i Z_C(T_i^{m_i})."""
    m = _multiplicities(fan, m)
    acc = MultiSeries.one(fan.n_rays, one=ONE)
    for i, mi in enumerate(m):
        e = tuple(mi if j == i else 0 for j in range(fan.n_rays))
        acc = acc * MultiSeries(fan.n_rays, {(0,) * fan.n_rays: ONE, e: -ONE})
    return LocalFactor(acc, f"torus[{fan.label},m={m}]")


# ------------------------------------------------------------ Euler products

def _specialize_local(series: MultiSeries, q: int, e: int) -> MultiSeries:
    qe = q ** e
    return series.map_coeffs(lambda c: specialize_rational(c, qe))


def euler_product_counting(local: LocalFactor, curve: CurveModel, q: int, bound) -> MultiSeries:
    """prod over closed points of C(F_q): local(L -> q^e, T -> T^e)^{B_e}."""
    t = _trunc(bound)
    total = t.total if t.total is not None else sum(t.box)
    counts = point_counts(curve, q, max(total, 1))
    base = local.series.restrict(t) if local.series.trunc.is_exact else local.series
    acc = MultiSeries.one(local.nvars, t)
    for e in range(1, total + 1):
        B = counts.B(e)
        if B == 0:
            continue
        f = _specialize_local(base, q, e).substitute_power(e).restrict(t)
        if len(f) == 1:  # only the constant term survives at this degree
            continue
        acc = acc * f.power(B)
    return acc.restrict(t)


def _zeta_at_monomial(zeta: MultiSeries, nvars, k, j, t: Truncation) -> MultiSeries:
    """Z_C(L^j T^k) as a series in T, truncated to t."""
    shift = MotClass.monomial(j)
    coeffs = {}
    d = 0
    while True:
        e = tuple(d * x for x in k)
        if not t.contains(e):
            break
        coeffs[e] = zeta.coeff((d,)) * shift ** d
        d += 1
    return MultiSeries(nvars, coeffs, t)


def euler_product_motivic(local: LocalFactor, curve: CurveModel, bound) -> MultiSeries:
    """Product over the geometric factorisation of Z_C(L^j T^k)^b."""
    t = _trunc(bound)
    total = t.total if t.total is not None else sum(t.box)
    F = local.series.restrict(t)
    fac = geometric_decompose(F)
    zeta = kapranov_zeta(curve, total)
    acc = MultiSeries.one(local.nvars, F.trunc, one=ONE)
    for k, j, b in fac.factors:
        z = _zeta_at_monomial(zeta, local.nvars, k, j, F.trunc)
        acc = acc * z.power(b)
    return acc


def specialize_series(F: MultiSeries, q: int) -> MultiSeries:
    """Coefficientwise counting measure for integral L-exponents."""
    return F.map_coeffs(lambda c: specialize_rational(c, q))


def multiplicativity_check(F: LocalFactor, G: LocalFactor, curve: CurveModel, q: int, bound):
    """EP(F) * EP(G) == EP(F * G) coefficientwise; returns (ok, first discrepancy)."""
    t = _trunc(bound)
    lhs = euler_product_counting(F, curve, q, t) * euler_product_counting(G, curve, q, t)
    prod_fg = LocalFactor(F.series.restrict(t) * G.series.restrict(t))
    rhs = euler_product_counting(prod_fg, curve, q, t)
    bad = first_discrepancy(lhs, rhs, t)
    return bad is None, bad


def zeta_product(curve: CurveModel, nvars, m, bound) -> MultiSeries:
    """prod_i Z_C(T_i^{m_i})."""
    t = _trunc(bound)
    total = t.total if t.total is not None else sum(t.box)
    zeta = kapranov_zeta(curve, total)
    acc = MultiSeries.one(nvars, t, one=ONE)
    for i, mi in enumerate(m):
        k = tuple(mi if j == i else 0 for j in range(nvars))
        acc = acc * _zeta_at_monomial(zeta, nvars, k, 0, t)
    return acc


def factored_campana_product(fan: Fan, curve: CurveModel, m=None, bound=8) -> MultiSeries:
    """prod_i Z_C(T_i^{m_i}) * EP(prod_i (1 - T_i^{m_i}) * P^eps * unconstrained).

    Algebraically equal to EP(admissible series); used as a cross-check.
    """
    m = _multiplicities(fan, m)
    t = _trunc(bound)
    inner = (torus_factor(fan, m).series.restrict(t) * campana_moebius(fan, m, t).series
             * unconstrained_series(fan, m, t))
    ep = euler_product_motivic(LocalFactor(inner), curve, t)
    return zeta_product(curve, fan.n_rays, m, t) * ep


def local_density_factor(fan: Fan, q_point: int, m=None, bound=8) -> Fraction:
    """prod_i (1 - 1/Q) * sum_{n in A_m} Q^{-<n, 1/m>} at a point with residue field size Q.

    Summed over the truncation region only; used for reporting.
    """
    m = _multiplicities(fan, m)
    Q = Fraction(q_point)
    total = Fraction(0)
    for e in region(fan.n_rays, _trunc(bound)):
        if in_admissible_set(fan, e, m):
            total += Q ** -sum(Fraction(x, mi) for x, mi in zip(e, m))
    return (1 - 1 / Q) ** fan.n_rays * total
