"""Named verification suites run by ``toricount verify``.

Each suite returns a list of ``Verdict`` lines; a suite passes when all of
its lines do.  The closed forms used here are the independent oracles:
they come from hand computation, not from the code under test.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from toricount import ffcount
from toricount.curve import (elliptic_q2a2, kapranov_zeta, pic0_count, point_counts,
                             rational_curve, zeta_numerator_series)
from toricount.euler import (campana_admissible_local, campana_moebius,
                             classical_moebius, euler_product_counting, euler_product_motivic,
                             factored_campana_product, in_admissible_set, specialize_series,
                             unconstrained_series)
from toricount.fan import cone_supported, library_fan, picard_lattice
from toricount.gring import MotClass, specialize_rational, toric_class
from toricount.mvseries import MultiSeries, Truncation, first_discrepancy, region
from toricount.predict import (convergence_report, fitted_slope_constant, normalised_count,
                               predicted_count, tamagawa_constant, tamagawa_euler_form)


@dataclass
class Verdict:
    criterion: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.criterion}: {self.detail}"


def _timed(name, fn):
    t0 = time.monotonic()
    try:
        ok, detail = fn()
    except ffcount.BudgetExceeded as exc:
        ok, detail = False, f"budget exhausted: {exc}"
    return Verdict(name, ok, detail, time.monotonic() - t0)


def admissible_degrees(fan, size):
    """Admissible multidegrees with entries <= size, sorted."""
    return [d for d in product(range(size + 1), repeat=fan.n_rays)
            if all(sum(di * r[j] for di, r in zip(d, fan.rays)) == 0
                   for j in range(fan.ambient_rank))]


# ---------------------------------------------------------------- suites

def suite_classical_p1(budget=None):
    P1, C = library_fan("p1"), rational_curve()

    def run():
        bad = []
        for q in (2, 3, 4, 5):
            for d in (1, 2, 3):
                want = q ** (2 * d + 1) - q ** (2 * d - 1)
                got = ffcount.count_hom_forms(P1, q, (d, d), budget=budget)
                norm = normalised_count(got, P1, C, q, (d, d))
                if got != want or norm != Fraction(1) - Fraction(1, q * q):
                    bad.append((q, d, got, want))
            tau = tamagawa_constant(P1, C, q).value
            if tau != 1 - Fraction(1, q * q) or tamagawa_euler_form(P1, C, q) != tau:
                bad.append((q, "tamagawa", tau))
        return not bad, "exact 3/4 at q=2; q^(2d+1)-q^(2d-1) for q<=5, d<=3" if not bad else f"{bad}"

    return [_timed("classical-p1", run)]


def suite_p2_identity(budget=None):
    P2, C = library_fan("p2"), rational_curve()

    def run():
        bad, seen = [], {}
        for q in (2, 3):
            for a in (1, 2, 3):
                d = (a, a, a)
                f = ffcount.count_hom_forms(P2, q, d, budget=budget)
                v = ffcount.count_hom_divisors(P2, q, d, budget=budget)
                p = predicted_count(P2, C, q, d)
                seen[(q, a)] = f
                if not f == v == p:
                    bad.append((q, a, f, v, p))
        if seen.get((2, 1)) != 24:
            bad.append(("value at q=2, a=1", seen.get((2, 1))))
        return not bad, f"forms = divisors = prediction; q=2,a=1 -> {seen[(2, 1)]}" if not bad else f"{bad}"

    return [_timed("p2-identity", run)]


def suite_campana_p1(budget=None):
    P1, C = library_fan("p1"), rational_curve()

    def run():
        bad = []
        for q in (2, 3):
            for k in (2, 3, 4):
                d = (k, k)
                b = ffcount.count_both(P1, q, d, (2, 2), budget=budget)
                p = predicted_count(P1, C, q, d, (2, 2))
                if b != p:
                    bad.append((q, d, b, p))
                if k == 2 and b != q ** 3 - q:
                    bad.append((q, d, b, "expected q^3 - q"))
        return not bad, "brute = prediction; q^3 - q at d=(2,2)" if not bad else f"{bad}"

    return [_timed("campana-p1", run)]


def suite_convergence_p2(budget=None):
    P2, C = library_fan("p2"), rational_curve()

    def run():
        rep = convergence_report(P2, C, 2, None, [(a, a, a) for a in (1, 2, 3, 4)],
                                 budget=budget)
        errs = [r.observed_error_exponent for r in rep.rows]
        if any(e is None for e in errs) or not rep.ok:
            return False, f"rows: {[r.status for r in rep.rows]}, errors {errs}"
        monotone = all(b <= a for a, b in zip(errs, errs[1:]))
        c = fitted_slope_constant(rep.rows)
        bounded = all(e <= -a / 4 + c + 1e-12 for a, e in zip((1, 2, 3, 4), errs))
        text = ", ".join(f"{e:.3f}" for e in errs)
        closed = tamagawa_euler_form(P2, C, 2) == rep.rows[0].limit_constant
        return monotone and bounded, (f"log2 errors [{text}], fitted c = {c:.3f}, limit "
                                      f"{rep.rows[0].limit_constant} (closed product form "
                                      f"{'agrees' if closed else 'differs'})")

    return [_timed("convergence-p2", run)]


TWO_PATH_FANS = ("p1", "p2", "p1xp1", "f1")


def suite_euler_two_path(budget=None, bound=8):
    curves = (rational_curve(), elliptic_q2a2())

    def run():
        bad = []
        t = Truncation(None, bound)
        for name in TWO_PATH_FANS:
            fan = library_fan(name)
            locals_ = {
                "moebius": classical_moebius(fan),
                "campana-moebius": campana_moebius(fan, (2,) * fan.n_rays, bound),
                "admissible": campana_admissible_local(fan, None, bound),
            }
            for lname, local in locals_.items():
                for C in curves:
                    mot = euler_product_motivic(local, C, t)
                    cnt = euler_product_counting(local, C, 2, t)
                    e = first_discrepancy(specialize_series(mot, 2), cnt, t)
                    if e is not None:
                        bad.append((name, lname, C.label, e))
        return not bad, f"12 local factors x 2 curves agree to degree {bound}" if not bad else f"{bad}"

    return [_timed("euler-two-path", run)]


MOEBIUS_FANS = ("p1", "p2", "p1xp1", "f1", "f2", "dp6")


def suite_moebius(budget=None):
    def support(name):
        bad = []
        for fname in MOEBIUS_FANS:
            fan = library_fan(fname)
            mu = classical_moebius(fan).series
            if name == "a" and any(x > 1 for e in mu.support() for x in e):
                bad.append(fname)
            if name == "b":
                for m in ((1,) * fan.n_rays, (2,) * fan.n_rays):
                    ser = campana_moebius(fan, m, 6).series
                    for e in ser.support():
                        nz = [i for i, x in enumerate(e) if x]
                        if any(e) and (sum(e) < 2 or len(nz) < 2
                                       or any(e[i] < m[i] for i in nz)):
                            bad.append((fname, m, e))
        return not bad, "ok" if not bad else f"{bad}"

    def inversion():
        bad = []
        for fname in MOEBIUS_FANS:
            fan = library_fan(fname)
            box = Truncation(box=(3,) * fan.n_rays)
            for m in ((1,) * fan.n_rays, (2,) * fan.n_rays):
                mu = campana_moebius(fan, m, box).series
                conv = mu * unconstrained_series(fan, m, box)
                for n in region(fan.n_rays, box):
                    want = int(in_admissible_set(fan, n, m))
                    if conv.coeff(n) != want:
                        bad.append((fname, m, n))
                        break
            # classical form: partial sums of mu over the box
            mu = classical_moebius(fan).series
            for n in region(fan.n_rays, box):
                s = sum(v for e, v in mu.items() if all(a <= b for a, b in zip(e, n)))
                if s != int(cone_supported(fan, [i for i, x in enumerate(n) if x])):
                    bad.append((fname, "partial sum", n))
                    break
        return not bad, "ok on e <= (3,...,3)" if not bad else f"{bad}"

    def m_one():
        bad = []
        for fname in MOEBIUS_FANS:
            fan = library_fan(fname)
            a = campana_moebius(fan, None, 6).series
            b = classical_moebius(fan).series
            if first_discrepancy(a, b) is not None:
                bad.append(fname)
        return not bad, "ok" if not bad else f"{bad}"

    return [_timed("moebius (a) support in {0,1}^N", lambda: support("a")),
            _timed("moebius (b) valuation >= 2", lambda: support("b")),
            _timed("moebius (c) inversion identities", inversion),
            _timed("moebius (d) m = 1 is classical", m_one)]


def suite_factorisation(budget=None, bound=8):
    def run():
        bad = []
        t = Truncation(None, bound)
        for name in ("p1", "p2"):
            fan = library_fan(name)
            for m in ((1,) * fan.n_rays, (2,) * fan.n_rays):
                for C in (rational_curve(), elliptic_q2a2()):
                    lhs = factored_campana_product(fan, C, m, bound)
                    rhs = euler_product_motivic(campana_admissible_local(fan, m, bound), C, t)
                    e = first_discrepancy(lhs, rhs, t)
                    if e is not None:
                        bad.append((name, m, C.label, e))
        return not bad, f"identity holds to degree {bound}" if not bad else f"{bad}"

    return [_timed("factorisation", run)]


def direct_point_count(fan, q):
    """#X(F_q) from Cox coordinates: points whose zero set is cone-supported, mod the torus."""
    rk = picard_lattice(fan).rank
    good = 0
    for x in product(range(q), repeat=fan.n_rays):
        if cone_supported(fan, [i for i, v in enumerate(x) if v == 0]):
            good += 1
    return Fraction(good, (q - 1) ** rk)


def suite_curve_shadows(budget=None):
    curves = (rational_curve(), elliptic_q2a2())

    def zeta():
        bad = []
        for C in curves:
            Z = kapranov_zeta(C, 10)
            one = MotClass.const(1)
            back = (Z * MultiSeries(1, {(0,): one, (1,): -one})
                    * MultiSeries(1, {(0,): one, (1,): -MotClass.monomial(1)}))
            if first_discrepancy(back, zeta_numerator_series(C), Truncation(None, 10)) is not None:
                bad.append(C.label)
        return not bad, "ok" if not bad else f"{bad}"

    def newton():
        bad = []
        for C in curves:
            for q in ((2,) if C.genus else (2, 3, 4, 5)):
                pc = point_counts(C, q, 12)
                for mm in range(1, 13):
                    if sum(e * pc.B(e) for e in range(1, mm + 1) if mm % e == 0) != pc.N(mm):
                        bad.append((C.label, q, mm))
        return not bad, "ok" if not bad else f"{bad}"

    def orbits():
        bad = []
        for name in MOEBIUS_FANS:
            fan = library_fan(name)
            for q in (2, 3, 4):
                if specialize_rational(toric_class(fan), q) != direct_point_count(fan, q):
                    bad.append((name, q))
        return not bad, "ok" if not bad else f"{bad}"

    def pic0():
        v = pic0_count(elliptic_q2a2(), 2)
        return v == 5, f"#Pic^0 = {v}"

    return [_timed("curve-shadows zeta numerator", zeta),
            _timed("curve-shadows point counts", newton),
            _timed("curve-shadows toric class", orbits),
            _timed("curve-shadows elliptic Pic^0", pic0)]


STRUCTURAL_MATRIX = (("p1", 3), ("p2", 2), ("p1xp1", 2), ("f1", 2))


def suite_structural(budget=None):
    def torus():
        bad, runs = [], 0
        for name, size in STRUCTURAL_MATRIX:
            fan = library_fan(name)
            rk = picard_lattice(fan).rank
            for q in (2, 3):
                for d in admissible_degrees(fan, size):
                    for m in (None, (2,) * fan.n_rays):
                        raw = ffcount.raw_form_count(fan, q, d, m, budget=budget)
                        runs += 1
                        if raw % (q - 1) ** rk:
                            bad.append((name, q, d, m, raw))
        return not bad, f"{runs} raw counts divisible" if not bad else f"{bad}"

    def partitions():
        bad = []
        for name, size in STRUCTURAL_MATRIX:
            fan = library_fan(name)
            for q in (2, 3):
                for d in admissible_degrees(fan, size)[1:4]:
                    ref = ffcount.count_hom_forms(fan, q, d, budget=budget, partitions=1)
                    alts = [ffcount.count_hom_forms(fan, q, d, budget=budget, partitions=7),
                            ffcount.count_hom_forms(fan, q, d, budget=budget, workers=2),
                            ffcount.count_hom_divisors(fan, q, d, budget=budget, partitions=3)]
                    if any(a != ref for a in alts):
                        bad.append((name, q, d, ref, alts))
        return not bad, "partitioned and parallel runs agree" if not bad else f"{bad}"

    def inadmissible():
        bad = []
        for name, size in STRUCTURAL_MATRIX:
            fan = library_fan(name)
            good = set(admissible_degrees(fan, size))
            for d in product(range(size + 1), repeat=fan.n_rays):
                if d in good:
                    continue
                if ffcount.count_hom_forms(fan, 2, d) or ffcount.count_hom_divisors(fan, 2, d):
                    bad.append((name, d))
        return not bad, "all zero" if not bad else f"{bad}"

    return [_timed("structural torus divisibility", torus),
            _timed("structural partition agreement", partitions),
            _timed("structural inadmissible degrees", inadmissible)]


SUITES = {
    "classical-p1": suite_classical_p1,
    "p2-identity": suite_p2_identity,
    "campana-p1": suite_campana_p1,
    "convergence-p2": suite_convergence_p2,
    "euler-two-path": suite_euler_two_path,
    "moebius": suite_moebius,
    "factorisation": suite_factorisation,
    "curve-shadows": suite_curve_shadows,
    "structural": suite_structural,
}


def run_suite(name, budget=None):
    if name == "all":
        out = []
        for fn in SUITES.values():
            out.extend(fn(budget))
        return out
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return SUITES[name](budget)
