"""The source curve C, described by its genus and zeta numerator P_C."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from toricount.gring import MotClass, count_specialize, parse_motclass
from toricount.mvseries import MultiSeries, Truncation


class CurveError(ValueError):
    pass


@dataclass(frozen=True)
class CurveModel:
    genus: int
    numerator: tuple  # MotClass coefficients of P_C(T), constant term first
    label: str = ""

    @property
    def is_rational(self):
        return self.genus == 0


@dataclass(frozen=True)
class PointCounts:
    q: int
    rational: tuple  # N_1, ..., N_emax  (N_m = #C(F_{q^m}))
    closed: tuple    # B_1, ..., B_emax  (closed points of degree e)

    def N(self, m):
        return self.rational[m - 1]

    def B(self, e):
        return self.closed[e - 1]


def _as_class(c):
    if isinstance(c, MotClass):
        return c
    if isinstance(c, str):
        return parse_motclass(c)
    return MotClass.const(c)


def make_curve(genus, numerator=(1,), label="") -> CurveModel:
    if not isinstance(genus, int) or genus < 0:
        raise CurveError(f"genus must be a nonnegative integer, got {genus!r}")
    coeffs = [_as_class(c) for c in numerator] or [MotClass.const(1)]
    while len(coeffs) > 1 and not coeffs[-1]:
        coeffs.pop()
    if coeffs[0] != 1:
        raise CurveError(f"P_C(0) must be 1, got {coeffs[0]}")
    if len(coeffs) - 1 > 2 * genus:
        raise CurveError(f"deg P_C = {len(coeffs) - 1} exceeds 2g = {2 * genus}")
    if genus == 0:
        coeffs = [MotClass.const(1)]
    return CurveModel(genus, tuple(coeffs), label or (f"g{genus}" if genus else "P1"))


def rational_curve():
    return make_curve(0, (1,), "P1")


def elliptic_q2a2():
    # #E(F_2) = 5, trace of Frobenius -2:  P(T) = 1 + 2T + 2T^2
    return make_curve(1, (1, 2, 2), "elliptic:q2a2")


CURVE_PRESETS = ("p1", "elliptic:q2a2")


def curve_preset(name: str) -> CurveModel:
    key = name.strip().lower()
    if key in ("p1", "rational"):
        return rational_curve()
    if key == "elliptic:q2a2":
        return elliptic_q2a2()
    raise CurveError(f"unknown curve preset {name!r}; presets: {', '.join(CURVE_PRESETS)}")


def curve_from_config(cfg) -> CurveModel:
    """Accept a preset name or a mapping {genus, numerator_coeffs[, label]}."""
    if isinstance(cfg, str):
        return curve_preset(cfg)
    unknown = set(cfg) - {"genus", "numerator_coeffs", "numerator", "label"}
    if unknown or "genus" not in cfg:
        raise CurveError(f"curve config needs genus and numerator_coeffs; got {sorted(cfg)}")
    numerator = cfg.get("numerator_coeffs", cfg.get("numerator", (1,)))
    return make_curve(int(cfg["genus"]), numerator, cfg.get("label", ""))


def _integral_numerator(curve, q):
    out = []
    for c in curve.numerator:
        v = count_specialize(c, q)
        if not v.is_rational() or v.rational_value().denominator != 1:
            raise CurveError(f"numerator coefficient {c} is not an integer at q={q}")
        out.append(int(v.rational_value()))
    return out


def _mobius(n):
    res, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            res = -res
        p += 1
    return -res if n > 1 else res


def point_counts(curve: CurveModel, q: int, e_max: int) -> PointCounts:
    """N_m via Newton's identities on P_C, B_e by Moebius inversion."""
    c = _integral_numerator(curve, q)
    # P_C(T) = prod (1 - a_i T): elementary symmetric e_k = (-1)^k c_k
    elem = [(-1) ** k * ck for k, ck in enumerate(c)]
    power_sums = []
    for m in range(1, e_max + 1):
        e_m = elem[m] if m < len(elem) else 0
        p = (-1) ** (m - 1) * m * e_m
        for i in range(1, m):
            e_i = elem[i] if i < len(elem) else 0
            p += (-1) ** (i - 1) * e_i * power_sums[m - i - 1]
        power_sums.append(p)
    N = [q ** m + 1 - power_sums[m - 1] for m in range(1, e_max + 1)]
    B = []
    for e in range(1, e_max + 1):
        s = sum(_mobius(d) * N[e // d - 1] for d in range(1, e + 1) if e % d == 0)
        if s % e:
            raise CurveError(f"non-integral closed point count at degree {e}, q={q}")
        if s < 0:
            raise CurveError(f"negative closed point count B_{e} = {s // e} at q={q}")
        B.append(s // e)
    return PointCounts(q, tuple(N), tuple(B))


def kapranov_zeta(curve: CurveModel, bound: int) -> MultiSeries:
    """P_C(T) * sum T^a * sum L^b T^b, truncated at degree ``bound``."""
    trunc = Truncation(None, bound)
    out = {}
    for d in range(bound + 1):
        # coefficient of T^d in 1/((1-T)(1-LT)) is 1 + L + ... + L^d
        geo = MotClass({k: 1 for k in range(d + 1)})
        for i, pc in enumerate(curve.numerator):
            if i + d <= bound:
                out[(i + d,)] = out.get((i + d,), MotClass()) + pc * geo
    return MultiSeries(1, out, trunc)


def zeta_numerator_series(curve: CurveModel) -> MultiSeries:
    return MultiSeries(1, {(i,): c for i, c in enumerate(curve.numerator)})


def h0(curve: CurveModel, d: int) -> int:
    """Sections of a degree-d line bundle where Riemann-Roch decides it."""
    g = curve.genus
    if d < 0:
        return 0
    if g == 0:
        return d + 1
    if d > 2 * g - 2:
        return d + 1 - g
    raise CurveError(f"h0 of a degree-{d} bundle on a genus-{g} curve depends on the bundle")


def pic0_count(curve: CurveModel, q: int) -> int:
    """#Pic^0(C)(F_q) = P_C(1) at q."""
    value = sum(_integral_numerator(curve, q))
    if value < 1:
        raise CurveError(f"P_C(1) = {value} at q={q} is not a valid class number")
    return value


def numerator_at(curve: CurveModel, q: int, t) -> Fraction:
    """P_C(t) with coefficients specialised at q (t rational)."""
    t = Fraction(t)
    return sum((Fraction(c) * t ** i for i, c in enumerate(_integral_numerator(curve, q))),
               Fraction(0))


def zeta_value(curve: CurveModel, q: int, t) -> Fraction:
    """Z_C(t) = P_C(t) / ((1 - t)(1 - q t)) at a rational point inside the disc."""
    t = Fraction(t)
    if abs(t) >= Fraction(1, q):
        raise ValueError("zeta function evaluated outside |t| < 1/q")
    return numerator_at(curve, q, t) / ((1 - t) * (1 - q * t))

