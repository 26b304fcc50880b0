"""Predicted counts, normalised counts and the limiting (Tamagawa) constant.

For C = P^1 the coefficient of the admissible-series Euler product is the
exact number of divisor tuples, so predictions are exact; for curves of
higher genus the division by #Pic^0 gives the asymptotic prediction only.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from toricount import ffcount
from toricount.curve import CurveModel, numerator_at, pic0_count, zeta_value
from toricount.euler import (LocalFactor, campana_admissible_local, euler_product_counting,
                             euler_product_motivic, torus_factor)
from toricount.fan import Fan, degree_admissible, picard_lattice
from toricount.gring import NEG_INF, AlgNumber, count_specialize, toric_class
from toricount.mvseries import MultiSeries, Truncation, evaluate_at_powers, geometric_decompose


def _multiplicities(fan, m):
    m = (1,) * fan.n_rays if m is None else tuple(int(x) for x in m)
    if len(m) != fan.n_rays or any(x < 1 for x in m):
        raise ValueError(f"need {fan.n_rays} multiplicities, all >= 1")
    return m


def predicted_count(fan: Fan, curve: CurveModel, q: int, d, m=None) -> Fraction:
    """Coefficient at d of EP(admissible) times (q-1)^n / #Pic^0^n."""
    d = tuple(int(x) for x in d)
    m = _multiplicities(fan, m)
    if not degree_admissible(fan, d):
        raise ValueError(f"multidegree {d} is not admissible for {fan.label}")
    box = Truncation(box=d)
    local = campana_admissible_local(fan, m, box)
    coeff = euler_product_counting(local, curve, q, box).coeff(d)
    n = fan.ambient_rank
    return coeff * Fraction((q - 1) ** n, pic0_count(curve, q) ** n)


def normalisation_exponent(fan: Fan, curve: CurveModel, d, m=None) -> Fraction:
    m = _multiplicities(fan, m)
    return (sum((Fraction(di, mi) for di, mi in zip(d, m)), Fraction(0))
            + fan.ambient_rank * (1 - curve.genus))


def normalised_count(count, fan: Fan, curve: CurveModel, q: int, d, m=None) -> AlgNumber:
    """count * q^{-(sum d_i/m_i + n(1-g))}."""
    return AlgNumber.q_power(q, -normalisation_exponent(fan, curve, d, m), Fraction(count))


@dataclass(frozen=True)
class TamagawaValue:
    value: AlgNumber
    error_dim_bound: Fraction   # certified exponent for the truncation
    tail_estimate: object       # exponent of the omitted tail (Fraction or -inf)
    bound: int


def theorem_error_exponent(d, m) -> Fraction:
    """-(1/4) min_i d_i/m_i."""
    return -Fraction(1, 4) * min(Fraction(di, mi) for di, mi in zip(d, m))


def truncation_error_bound(nvars, m, bound) -> Fraction:
    """The error exponent at the largest cube inside the total-degree truncation."""
    side = bound // nvars
    return -Fraction(1, 4) * min(Fraction(side + 1, mi) for mi in m)


def correction_series(fan: Fan, curve: CurveModel, m=None, bound=12, q=None) -> MultiSeries:
    """G = EP(admissible * prod_i (1 - T_i^{m_i})), i.e. EP(admissible) / prod_i Z_C(T_i^{m_i}).

    Motivic coefficients when q is None, else the counting expansion at q.
    """
    m = _multiplicities(fan, m)
    t = Truncation(None, bound)
    local = LocalFactor(campana_admissible_local(fan, m, t).series * torus_factor(fan, m).series)
    if q is None:
        return euler_product_motivic(local, curve, t)
    return euler_product_counting(local, curve, q, t)


def _residue(m, residue):
    if residue is None:
        return tuple(0 for _ in m)
    if residue == "all":
        return None
    rho = tuple(int(x) for x in residue)
    if len(rho) != len(m):
        raise ValueError("residue needs one entry per ray")
    return tuple(r % mi for r, mi in zip(rho, m))


def _in_class(e, m, rho):
    return rho is None or all(x % mi == r for x, mi, r in zip(e, m, rho))


def tamagawa_constant(fan: Fan, curve: CurveModel, q: int, m=None, bound=None, residue=None,
                      path="counting") -> TamagawaValue:
    """Limit of normalised counts as d -> infinity with d = residue (mod m).

    pole factor * G_rho(q^{-1/m}) * (q-1)^n q^{-n(1-g)} / #Pic^0^n, where
    G_rho keeps the terms of G with exponent congruent to the residue
    (default 0: d through multiples of m).  Each pole of Z_C(T_i^{m_i}) on
    |T_i| = q^{-1/m_i} contributes, and averaging over them is exactly this
    restriction.  residue="all" evaluates G itself, which is the sum of the
    limits over all residue classes.  For m = 1 the choices agree.
    """
    m = _multiplicities(fan, m)
    if bound is None:
        # two rays are cheap enough to push well past the slow initial band
        bound = (32 if fan.n_rays <= 2 else 12) * max(m)
    rho = _residue(m, residue)
    G = correction_series(fan, curve, m, bound, None if path == "motivic" else q)
    G = G.restrict(G.trunc)  # copy
    kept = MultiSeries(G.nvars, {e: v for e, v in G.items() if _in_class(e, m, rho)}, G.trunc)
    s = [Fraction(-1, mi) for mi in m]
    if path == "motivic":
        value, tail = evaluate_at_powers(kept, s)
        value = count_specialize(value, q)
    else:
        value = AlgNumber.rational(q, 0)
        for e, v in kept.items():
            value = value + AlgNumber.q_power(q, sum(a * x for a, x in zip(s, e)), v)
        tail = NEG_INF
    pole = numerator_at(curve, q, Fraction(1, q)) / (1 - Fraction(1, q))
    n, g = fan.ambient_rank, curve.genus
    scale = (pole ** fan.n_rays * Fraction(q - 1) ** n * Fraction(q) ** (-n * (1 - g))
             / pic0_count(curve, q) ** n)
    tau = value * scale
    numeric = numeric_tail(kept, q, m)
    if numeric != NEG_INF:
        numeric += Fraction(math.floor(math.log(abs(float(scale)), q) * 64), 64)
    bound_exp = truncation_error_bound(fan.n_rays, m, bound)
    for t in (tail, numeric):
        if t != NEG_INF:
            bound_exp = max(bound_exp, t)
    return TamagawaValue(tau, bound_exp, max(tail, numeric), bound)


def numeric_tail(G: MultiSeries, q: int, m) -> object:
    """log_q of the size of the terms next to the truncation frontier at T_i = q^{-1/m_i}.

    Virtual dimensions cannot see growth coming from integer coefficients of
    P_C (the counting shadow of weights), so for such curves this is the
    estimate that matters.  The frontier band is twice the lowest degree in
    the support wide.  Rounded up to 1/64.
    """
    if G.trunc.is_exact or G.trunc.total is None:
        return NEG_INF
    degrees = [sum(e) for e in G.support() if any(e)]
    if not degrees:
        return NEG_INF
    edge = G.trunc.total - 2 * min(degrees)
    size = 0.0
    for e, v in G.items():
        if sum(e) > edge and any(e):
            size += abs(count_specialize(v, q).to_float()) * q ** -sum(a / b for a, b in zip(e, m))
    if size == 0:
        return NEG_INF
    return Fraction(math.ceil(math.log(size, q) * 64), 64)


def tamagawa_euler_form(fan: Fan, curve: CurveModel, q: int, bound=12) -> Fraction:
    """m = 1 constant as (#Pic^0 q^{1-g}/(q-1))^rk * prod_p (1-1/Q)^rk #X(F_Q)/Q^n.

    The local factor is a polynomial F(u) in u = 1/Q; writing
    F = prod_k (1 - u^k)^{-b_k} turns the product over closed points into
    prod_k Z_C(q^{-k})^{b_k}.  Exact whenever the factorisation is finite.
    """
    rk = picard_lattice(fan).rank
    n, g = fan.ambient_rank, curve.genus
    cls = toric_class(fan)
    coeffs = {}
    for j, c in cls.items():  # [X]/L^n as a polynomial in u = L^{-1}
        coeffs[(int(n - j),)] = c
    F = MultiSeries(1, coeffs) * MultiSeries(1, {(0,): 1, (1,): -1}).power(rk)
    fac = geometric_decompose(F.restrict(Truncation(None, bound)))
    value = Fraction(1)
    for k, j, b in fac.factors:
        if j != 0:
            raise ValueError("local factor of a toric variety has constant coefficients")
        value *= zeta_value(curve, q, Fraction(1, q ** k[0])) ** b
    pref = Fraction(pic0_count(curve, q) * Fraction(q) ** (1 - g), q - 1) ** rk
    return pref * value


# ------------------------------------------------------------------ reports

REPORT_FIELDS = ("fan", "curve", "q", "m", "d", "brute_count", "predicted_count",
                 "normalised_value", "limit_constant", "limit_error_bound",
                 "theorem_error_exponent")


@dataclass
class CountRow:
    fan: str
    curve: str
    q: int
    m: tuple
    d: tuple
    brute_count: int | None
    predicted_count: Fraction
    normalised_value: AlgNumber
    limit_constant: AlgNumber
    limit_error_bound: Fraction
    theorem_error_exponent: Fraction
    observed_error_exponent: float | None = None  # log_q |normalised - limit|; None when exact
    status: str = "ok"

    def record(self):
        out = {}
        for k in REPORT_FIELDS + ("observed_error_exponent", "status"):
            v = getattr(self, k)
            if isinstance(v, tuple):
                v = ",".join(map(str, v))
            elif isinstance(v, (Fraction, AlgNumber)):
                v = str(v)
            out[k] = v
        return out


@dataclass
class CountReport:
    rows: list
    metadata: dict = field(default_factory=dict)
    runtimes: dict = field(default_factory=dict)  # kept out of files: not reproducible

    @property
    def ok(self):
        return all(r.status in ("ok", "asymptotic", "budget", "inadmissible") for r in self.rows)

    @property
    def mismatch(self):
        return any(r.status.endswith("mismatch") for r in self.rows)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for r in self.rows:
            rec = r.record()
            w.writerow(["" if rec[k] is None else rec[k] for k in REPORT_FIELDS])
        return buf.getvalue()

    def to_json(self):
        return json.dumps({"metadata": self.metadata, "rows": [r.record() for r in self.rows]},
                          indent=2, sort_keys=False) + "\n"


def config_hash(config: dict) -> str:
    text = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def observed_error(normalised: AlgNumber, limit: AlgNumber, q: int):
    diff = (normalised - limit).to_float()
    if diff == 0:
        return None
    return math.log(abs(diff), q)


def convergence_report(fan: Fan, curve: CurveModel, q: int, m=None, d_list=(), bound=None,
                       budget=None, workers=1, brute=True) -> CountReport:
    m = _multiplicities(fan, m)
    t0 = time.monotonic()
    taus = {}
    runtimes = {}
    rows = []
    d_list = sorted({tuple(int(x) for x in d) for d in d_list}, key=lambda d: (sum(d), d))
    for d in d_list:
        rho = tuple(x % mi for x, mi in zip(d, m))
        if rho not in taus:
            taus[rho] = tamagawa_constant(fan, curve, q, m, bound, rho)
        tau = taus[rho]
        common = dict(fan=fan.label, curve=curve.label, q=q, m=m, d=d,
                      limit_constant=tau.value, limit_error_bound=tau.error_dim_bound,
                      theorem_error_exponent=theorem_error_exponent(d, m))
        if not degree_admissible(fan, d):
            zero = normalised_count(0, fan, curve, q, d, m)
            rows.append(CountRow(brute_count=0 if brute and curve.genus == 0 else None,
                                 predicted_count=Fraction(0), normalised_value=zero,
                                 status="inadmissible", **common))
            continue
        t1 = time.monotonic()
        pred = predicted_count(fan, curve, q, d, m)
        status = "ok" if curve.genus == 0 else "asymptotic"
        count = None
        if brute and curve.genus == 0:
            try:
                count = ffcount.count_both(fan, q, d, m, budget, workers)
            except ffcount.BudgetExceeded:
                status = "budget"
            except ffcount.OracleMismatch:
                status = "oracle-mismatch"
            if count is not None and count != pred:
                status = "prediction-mismatch"
        runtimes[",".join(map(str, d))] = time.monotonic() - t1
        value = count if count is not None else pred
        norm = normalised_count(value, fan, curve, q, d, m)
        rows.append(CountRow(brute_count=count, predicted_count=pred, normalised_value=norm,
                             observed_error_exponent=observed_error(norm, tau.value, q),
                             status=status, **common))
    runtimes["total"] = time.monotonic() - t0
    meta = {"fan": fan.label, "curve": curve.label, "q": q, "m": list(m),
            "tamagawa_truncation": max((t.bound for t in taus.values()), default=bound),
            "tamagawa_tail_exponent": {",".join(map(str, k)): str(v.tail_estimate)
                                       for k, v in sorted(taus.items())},
            "budget": str(budget), "brute": brute}
    meta["config_hash"] = config_hash({**meta, "d_list": [list(d) for d in d_list]})
    return CountReport(rows, meta, runtimes)


def fitted_slope_constant(rows, slope=Fraction(-1, 4)):
    """Smallest c with observed error <= slope * min_i d_i/m_i + c on every row."""
    cs = [r.observed_error_exponent - float(slope * min(Fraction(a, b) for a, b in zip(r.d, r.m)))
          for r in rows if r.observed_error_exponent is not None]
    return max(cs) if cs else float("-inf")
