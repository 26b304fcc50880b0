"""Truncated multivariate power series in T_0..T_{N-1}.

A series knows the down-closed region of exponents on which its
coefficients are exact (a box, a total-degree bound, both, or neither for a
genuine polynomial).  Coefficients outside that region are never reported.
Coefficients are ``MotClass`` or plain rationals; both are supported by the
same code paths.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb

from toricount.gring import NEG_INF, MotClass, format_motclass, virtual_dimension


class TruncationError(ValueError):
    """A coefficient outside the exact region was requested."""


class DivergenceError(ArithmeticError):
    """A series was evaluated outside its domain of convergence."""


class DecompositionError(ValueError):
    """Series is outside the class with integral geometric factorisation."""


@dataclass(frozen=True)
class Truncation:
    box: tuple | None = None
    total: int | None = None

    @classmethod
    def exact(cls):
        return cls(None, None)

    @property
    def is_exact(self):
        return self.box is None and self.total is None

    def contains(self, e):
        if self.total is not None and sum(e) > self.total:
            return False
        if self.box is not None and any(x > b for x, b in zip(e, self.box)):
            return False
        return True

    def intersect(self, other):
        box = self.box
        if other.box is not None:
            box = other.box if box is None else tuple(map(min, box, other.box))
        total = self.total
        if other.total is not None:
            total = other.total if total is None else min(total, other.total)
        return Truncation(box, total)

    def exits(self, e):
        """Per-variable number of unit steps needed to leave the region from e."""
        out = []
        for i, x in enumerate(e):
            steps = []
            if self.box is not None:
                steps.append(self.box[i] - x + 1)
            if self.total is not None:
                steps.append(self.total - sum(e) + 1)
            out.append(min(steps) if steps else None)
        return out

    def __str__(self):
        if self.is_exact:
            return "exact"
        parts = []
        if self.total is not None:
            parts.append(f"total<={self.total}")
        if self.box is not None:
            parts.append("box<=(" + ",".join(map(str, self.box)) + ")")
        return " ".join(parts)


def degree_key(e):
    return (sum(e), e)


@lru_cache(maxsize=256)
def region(nvars, trunc: Truncation):
    """All exponents of the region, sorted by total degree then lex."""
    if trunc.is_exact:
        raise TruncationError("an exact polynomial has no finite exponent region")
    if trunc.box is not None:
        cands = product(*(range(b + 1) for b in trunc.box))
        pts = [e for e in cands if trunc.contains(e)]
    else:
        pts = []

        def rec(prefix, left):
            if len(prefix) == nvars:
                pts.append(tuple(prefix))
                return
            for x in range(left + 1):
                prefix.append(x)
                rec(prefix, left - x)
                prefix.pop()

        rec([], trunc.total)
    return tuple(sorted(pts, key=degree_key))


class MultiSeries:
    __slots__ = ("nvars", "trunc", "_c")

    def __init__(self, nvars, coeffs=None, trunc=None):
        self.nvars = nvars
        self.trunc = trunc if trunc is not None else Truncation.exact()
        c = {}
        if coeffs:
            for e, v in coeffs.items():
                e = tuple(int(x) for x in e)
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} has wrong length for {nvars} variables")
                if any(x < 0 for x in e):
                    raise ValueError(f"negative exponent {e}")
                if isinstance(v, int):
                    v = Fraction(v)
                if v and self.trunc.contains(e):
                    c[e] = v
        self._c = c

    @classmethod
    def _raw(cls, nvars, c, trunc):
        obj = cls.__new__(cls)
        obj.nvars, obj.trunc, obj._c = nvars, trunc, c
        return obj

    # -- constructors
    @classmethod
    def one(cls, nvars, trunc=None, one=Fraction(1)):
        return cls(nvars, {(0,) * nvars: one}, trunc)

    @classmethod
    def monomial(cls, nvars, e, coeff=Fraction(1), trunc=None):
        return cls(nvars, {tuple(e): coeff}, trunc)

    @classmethod
    def binomial(cls, nvars, k, coeff, b, trunc):
        """(1 - coeff * T^k)^b truncated; exact when b >= 0."""
        k = tuple(k)
        if not any(k):
            raise ValueError("binomial factor needs a nonzero multidegree")
        if b >= 0:
            trunc_b = Truncation.exact()
            top = b
        else:
            if trunc.is_exact:
                raise TruncationError("negative binomial power needs a truncation")
            trunc_b = trunc
            top = None
        out = {}
        n = 0
        power = MotClass.const(1) if isinstance(coeff, MotClass) else Fraction(1)
        while top is None or n <= top:
            e = tuple(n * x for x in k)
            if not trunc.contains(e) and not trunc.is_exact:
                break
            # generalised binomial coefficient binom(b, n) (-1)^n
            bc = _gbinom(b, n) * (-1) ** n
            if bc:
                out[e] = power * bc
            power = power * coeff
            n += 1
        res = cls._raw(nvars, {e: v for e, v in out.items() if v}, trunc_b)
        return res if trunc.is_exact else res.restrict(trunc)

    # -- access
    def coeff(self, e):
        e = tuple(e)
        if not self.trunc.contains(e):
            raise TruncationError(f"coefficient {e} lies outside the exact region ({self.trunc})")
        return self._c.get(e, self._zero_like())

    def get(self, e, default=None):
        return self._c.get(tuple(e), default)

    def _zero_like(self):
        for v in self._c.values():
            return MotClass() if isinstance(v, MotClass) else Fraction(0)
        return Fraction(0)

    def items(self):
        return sorted(self._c.items(), key=lambda kv: degree_key(kv[0]))

    def support(self):
        return set(self._c)

    def constant_term(self):
        return self._c.get((0,) * self.nvars, self._zero_like())

    def __len__(self):
        return len(self._c)

    def is_polynomial(self):
        return self.trunc.is_exact

    def restrict(self, trunc):
        t = self.trunc.intersect(trunc)
        return MultiSeries._raw(self.nvars, {e: v for e, v in self._c.items() if t.contains(e)}, t)

    def map_coeffs(self, f):
        out = {}
        for e, v in self._c.items():
            w = f(v)
            if w:
                out[e] = w
        return MultiSeries._raw(self.nvars, out, self.trunc)

    def to_motivic(self):
        return self.map_coeffs(lambda v: v if isinstance(v, MotClass) else MotClass.const(v))

    # -- arithmetic
    def _check(self, other):
        if not isinstance(other, MultiSeries):
            return False
        if other.nvars != self.nvars:
            raise ValueError(f"variable mismatch: {self.nvars} vs {other.nvars}")
        return True

    def __add__(self, other):
        if not self._check(other):
            return NotImplemented
        t = self.trunc.intersect(other.trunc)
        out = {e: v for e, v in self._c.items() if t.contains(e)}
        for e, v in other._c.items():
            if not t.contains(e):
                continue
            if e in out:
                w = out[e] + v
                if w:
                    out[e] = w
                else:
                    del out[e]
            else:
                out[e] = v
        return MultiSeries._raw(self.nvars, out, t)

    def __neg__(self):
        return MultiSeries._raw(self.nvars, {e: -v for e, v in self._c.items()}, self.trunc)

    def __sub__(self, other):
        if not self._check(other):
            return NotImplemented
        return self + (-other)

    def scale(self, c):
        return self.map_coeffs(lambda v: v * c)

    def __mul__(self, other):
        if not isinstance(other, MultiSeries):
            if isinstance(other, (int, Fraction, MotClass)):
                return self.scale(other)
            return NotImplemented
        self._check(other)
        t = self.trunc.intersect(other.trunc)
        box, total = t.box, t.total
        out = {}
        b_items = list(other._c.items())
        n = self.nvars
        for e1, v1 in self._c.items():
            s1 = sum(e1)
            for e2, v2 in b_items:
                if total is not None and s1 + sum(e2) > total:
                    continue
                e = tuple(e1[i] + e2[i] for i in range(n))
                if box is not None and any(e[i] > box[i] for i in range(n)):
                    continue
                p = v1 * v2
                if e in out:
                    out[e] = out[e] + p
                else:
                    out[e] = p
        return MultiSeries._raw(n, {e: v for e, v in out.items() if v}, t)

    __rmul__ = __mul__

    def divide(self, other, trunc=None):
        """H with H * other == self on the common exact region."""
        self._check(other)
        t = self.trunc.intersect(other.trunc)
        if trunc is not None:
            t = t.intersect(trunc)
        if t.is_exact:
            raise TruncationError("dividing two polynomials needs an explicit truncation")
        g0 = other.constant_term()
        if isinstance(g0, MotClass):
            if not g0.is_monomial():
                raise ZeroDivisionError(f"constant term {g0} is not a unit")
            g0inv = g0.inverse()
        else:
            if not g0:
                raise ZeroDivisionError("constant term is zero")
            g0inv = 1 / Fraction(g0)
        zero = (0,) * self.nvars
        g_items = [(e, v) for e, v in other._c.items() if e != zero and t.contains(e)]
        h = {}
        for e in region(self.nvars, t):
            acc = self._c.get(e)
            for e2, v2 in g_items:
                d = tuple(a - b for a, b in zip(e, e2))
                if min(d) < 0:
                    continue
                hv = h.get(d)
                if hv is not None:
                    acc = -hv * v2 if acc is None else acc - hv * v2
            if acc:
                val = acc * g0inv
                if val:
                    h[e] = val
        return MultiSeries._raw(self.nvars, h, t)

    def __truediv__(self, other):
        if isinstance(other, MultiSeries):
            return self.divide(other)
        if isinstance(other, (int, Fraction, MotClass)):
            return self.map_coeffs(lambda v: v / other)
        return NotImplemented

    def power(self, a, trunc=None):
        """self ** a for an integer (or rational) a, constant term 1.

        Uses the Euler-operator recurrence  E(G) F = a G E(F)  with
        E = sum_i T_i d/dT_i, so the cost is |region| * |support(self)|.
        """
        a = Fraction(a)
        zero = (0,) * self.nvars
        c0 = self._c.get(zero)
        if c0 is None or c0 != 1:
            raise ValueError("power needs constant term 1")
        t = self.trunc if trunc is None else self.trunc.intersect(trunc)
        if t.is_exact:
            if a.denominator != 1 or a < 0:
                raise TruncationError("non-polynomial power of a polynomial needs a truncation")
            result = MultiSeries.one(self.nvars, one=c0)
            base = self
            k = int(a)
            while k:
                if k & 1:
                    result = result * base
                base = base * base
                k >>= 1
            return result
        if a == 0:
            return MultiSeries.one(self.nvars, t, one=c0)
        f_items = [(e, sum(e), v) for e, v in self._c.items() if e != zero and t.contains(e)]
        g = {zero: c0}
        for e in region(self.nvars, t):
            if e == zero:
                continue
            n = sum(e)
            acc = None
            for e2, n2, v2 in f_items:
                d = tuple(x - y for x, y in zip(e, e2))
                if min(d) < 0:
                    continue
                gv = g.get(d)
                if gv is None:
                    continue
                w = a * n2 - (n - n2)
                if w:
                    term = gv * v2 * w
                    acc = term if acc is None else acc + term
            if acc:
                val = acc / n
                if val:
                    g[e] = val
        return MultiSeries._raw(self.nvars, g, t)

    def substitute_power(self, k):
        """T_i -> T_i^k and L -> L^k (the local factor at a degree-k point)."""
        t = self.trunc
        if not t.is_exact:
            box = None if t.box is None else tuple(k * b + k - 1 for b in t.box)
            total = None if t.total is None else k * t.total + k - 1
            t = Truncation(box, total)
        out = {}
        for e, v in self._c.items():
            out[tuple(k * x for x in e)] = v.substitute_power(k) if isinstance(v, MotClass) else v
        return MultiSeries._raw(self.nvars, out, t)

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        return (self.nvars == other.nvars and self.trunc == other.trunc
                and _norm(self._c) == _norm(other._c))

    def agrees_with(self, other, trunc=None):
        """Coefficientwise equality on the common exact region."""
        t = self.trunc.intersect(other.trunc)
        if trunc is not None:
            t = t.intersect(trunc)
        return first_discrepancy(self, other, t) is None

    def __repr__(self):
        return f"MultiSeries(nvars={self.nvars}, trunc={self.trunc}, terms={len(self._c)})"

    # -- text
    def dump(self):
        return "\n".join(f"{_fmt_exp(e)} := {_fmt_coeff(v)}" for e, v in self.items())

    def format_polynomial(self, names=None):
        names = names or [f"T{i}" for i in range(self.nvars)]
        if not self._c:
            return "0"
        parts = []
        for e, v in self.items():
            mono = "*".join(n if x == 1 else f"{n}^{x}" for n, x in zip(names, e) if x)
            c = v if isinstance(v, MotClass) else MotClass.const(v)
            neg = False
            if c.is_rational():
                cv = c.rational_value()
                neg = cv < 0
                ctext = format_motclass(MotClass.const(abs(cv)))
            elif len(c.terms) == 1 and next(iter(c.terms.values())) < 0:
                neg, ctext = True, format_motclass(-c)
            else:
                ctext = f"({format_motclass(c)})"
            if mono:
                body = mono if ctext == "1" else f"{ctext}*{mono}"
            else:
                body = ctext
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(f" {'-' if neg else '+'} {body}")
        return "".join(parts)


def _norm(c):
    return {e: (v if isinstance(v, MotClass) else MotClass.const(v)) for e, v in c.items()}


def _fmt_exp(e):
    return "(" + ", ".join(map(str, e)) + ")"


def _fmt_coeff(v):
    return format_motclass(v if isinstance(v, MotClass) else MotClass.const(v))


def _gbinom(b, n):
    # binom(b, n) for integer b of either sign
    if b >= 0:
        return comb(b, n) if n <= b else 0
    return (-1) ** n * comb(-b + n - 1, n)


def first_discrepancy(F, G, trunc=None):
    """First exponent (degree order) where F and G differ, else None."""
    t = F.trunc.intersect(G.trunc)
    if trunc is not None:
        t = t.intersect(trunc)
    keys = {e for e in F.support() | G.support() if t.contains(e)}
    for e in sorted(keys, key=degree_key):
        a, b = F.get(e, 0), G.get(e, 0)
        a = a if isinstance(a, MotClass) else MotClass.const(a)
        b = b if isinstance(b, MotClass) else MotClass.const(b)
        if a != b:
            return e
    return None


def parse_dump(text, nvars, trunc=None):
    """Read the ``e := coefficient`` dump format back into a series."""
    from toricount.gring import parse_motclass

    coeffs = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        lhs, rhs = line.split(":=")
        e = tuple(int(x) for x in lhs.strip().strip("()").split(",") if x.strip())
        coeffs[e] = parse_motclass(rhs)
    return MultiSeries(nvars, coeffs, trunc)


# ------------------------------------------------------------- factorisation

@dataclass(frozen=True)
class GeomFactorisation:
    """prod over (k, j, b) of (1 - L^j T^k)^(-b)."""

    nvars: int
    factors: tuple
    trunc: Truncation

    def replay(self, trunc=None):
        t = self.trunc if trunc is None else self.trunc.intersect(trunc)
        acc = MultiSeries.one(self.nvars, t, one=MotClass.const(1))
        for k, j, b in self.factors:
            acc = acc * MultiSeries.binomial(self.nvars, k, MotClass.monomial(j), -b, t)
        return acc


def geometric_decompose(F: MultiSeries) -> GeomFactorisation:
    """Greedy factorisation F = prod (1 - L^j T^k)^(-b) within truncation."""
    if F.trunc.is_exact:
        raise TruncationError("decompose a polynomial after restricting it to a truncation")
    zero = (0,) * F.nvars
    c0 = F.constant_term()
    if c0 != 1 and c0 != MotClass.const(1):
        raise DecompositionError("constant term must be 1")
    R = F.to_motivic()
    factors = []
    for k in region(F.nvars, F.trunc):
        if k == zero:
            continue
        c = R.get(k)
        if not c:
            continue
        for j, b in c.items():
            if b.denominator != 1:
                raise DecompositionError(f"non-integral multiplicity {b} at T^{k} L^{j}")
            factors.append((k, j, int(b)))
            R = R * MultiSeries.binomial(F.nvars, k, MotClass.monomial(j), int(b), F.trunc)
    return GeomFactorisation(F.nvars, tuple(factors), F.trunc)


# ---------------------------------------------------------------- evaluation

def convergence_margin(F: MultiSeries, alpha) -> Fraction:
    """max over stored nonzero d of dim(a_d) / <alpha, d> (finite limsup proxy)."""
    alpha = [Fraction(a) for a in alpha]
    if len(alpha) == 1 and F.nvars > 1:
        alpha = alpha * F.nvars
    best = NEG_INF
    for e, v in F.items():
        if not any(e):
            continue
        w = sum(a * x for a, x in zip(alpha, e))
        if w <= 0:
            raise ValueError(f"<alpha, {e}> = {w} is not positive")
        best = max(best, virtual_dimension(v) / w)
    return best


def evaluate_at_powers(F: MultiSeries, s, slope=None):
    """Value of F at T_i = L^{s_i}, with an estimate of the omitted tail.

    ``slope`` is the caller's per-variable bound on how fast coefficient
    dimensions grow (default 0).  The tail bound extrapolates every stored
    term linearly to the edge of the exact region; it is -inf for
    polynomials.
    """
    s = [Fraction(x) for x in s]
    if len(s) == 1 and F.nvars > 1:
        s = s * F.nvars
    slope = [Fraction(0)] * F.nvars if slope is None else [Fraction(x) for x in slope]
    if any(x >= 0 for x in s):
        raise DivergenceError("evaluation point must have negative exponents")
    if convergence_margin(F, [-x for x in s]) >= 1:
        raise DivergenceError("series does not converge at the requested point")
    value = MotClass()
    tail = NEG_INF
    for e, v in F.items():
        v = v if isinstance(v, MotClass) else MotClass.const(v)
        shift = sum(a * x for a, x in zip(s, e))
        value = value + v * MotClass.monomial(shift)
        if F.trunc.is_exact:
            continue
        base = v.virtual_dimension() + shift
        for i, steps in enumerate(F.trunc.exits(e)):
            rate = s[i] + slope[i]
            if rate >= 0:
                raise DivergenceError(f"declared slope makes direction {i} divergent")
            if steps is not None:
                tail = max(tail, base + steps * rate)
    return value, tail
