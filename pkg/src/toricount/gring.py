"""Exact coefficient ring: Laurent polynomials in L^{1/r} over Q.

``MotClass`` is a finite sum  sum_k c_k L^{k/r}  with rational c_k, the
subring of the Grothendieck ring with rational powers of L in which every
class used by the toric computations lives.  ``AlgNumber`` is its image
under the counting measure L -> q, an element of Q[x]/(x^r - q).
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

NEG_INF = float("-inf")


def _lcm(a, b):
    return a * b // math.gcd(a, b)


def _frac(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"expected a rational number, got {type(c).__name__}")


def _fmt_frac(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class MotClass:
    """Element of Q[L^{1/r}, L^{-1/r}]; immutable, canonical.

    ``terms`` maps an integer k to the coefficient of L^{k/r}.
    """

    __slots__ = ("r", "_terms", "_hash")

    def __init__(self, terms=None, r=1):
        if r < 1:
            raise ValueError("root order must be >= 1")
        clean = {}
        if terms:
            for k, c in terms.items():
                c = _frac(c)
                if c:
                    clean[int(k)] = c
        g = r
        for k in clean:
            g = math.gcd(g, k)
            if g == 1:
                break
        if g > 1:
            clean = {k // g: c for k, c in clean.items()}
            r //= g
        if not clean:
            r = 1
        self.r = r
        self._terms = clean
        self._hash = None

    # -- constructors
    @classmethod
    def const(cls, c):
        return cls({0: c})

    @classmethod
    def monomial(cls, s, coeff=1):
        """coeff * L^s for a rational exponent s."""
        s = _frac(s)
        return cls({s.numerator: coeff}, s.denominator)

    @classmethod
    def _raw(cls, terms, r):
        # terms already clean (no zero coefficients); skips canonicalisation
        # when the root order cannot shrink
        obj = cls.__new__(cls)
        obj.r = r if terms else 1
        obj._terms = terms
        obj._hash = None
        if r > 1 and terms:
            g = r
            for k in terms:
                g = math.gcd(g, k)
                if g == 1:
                    break
            if g > 1:
                obj._terms = {k // g: c for k, c in terms.items()}
                obj.r = r // g
        return obj

    # -- access
    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        """(exponent as Fraction, coefficient) pairs, descending exponent."""
        return [(Fraction(k, self.r), c) for k, c in sorted(self._terms.items(), reverse=True)]

    def coefficient(self, s):
        s = _frac(s)
        k = s * self.r
        if k.denominator != 1:
            return Fraction(0)
        return self._terms.get(int(k), Fraction(0))

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def is_monomial(self):
        return len(self._terms) == 1

    def is_rational(self):
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def rational_value(self):
        if not self.is_rational():
            raise ValueError(f"{self} is not a rational constant")
        return self._terms.get(0, Fraction(0))

    def virtual_dimension(self):
        if not self._terms:
            return NEG_INF
        return Fraction(max(self._terms), self.r)

    # -- arithmetic
    def _lift(self, r):
        f = r // self.r
        if f == 1:
            return self._terms
        return {k * f: c for k, c in self._terms.items()}

    @staticmethod
    def _coerce(other):
        if isinstance(other, MotClass):
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return MotClass({0: other})
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o._terms:
            return self
        if not self._terms:
            return o
        r = self.r if self.r == o.r else _lcm(self.r, o.r)
        out = dict(self._lift(r))
        for k, c in o._lift(r).items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v += c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return MotClass._raw(out, r)

    __radd__ = __add__

    def __neg__(self):
        return MotClass._raw({k: -c for k, c in self._terms.items()}, self.r)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return MotClass()
            return MotClass._raw({k: c * other for k, c in self._terms.items()}, self.r)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self._terms or not o._terms:
            return MotClass()
        r = self.r if self.r == o.r else _lcm(self.r, o.r)
        a, b = self._lift(r), o._lift(r)
        out = {}
        for k1, c1 in a.items():
            for k2, c2 in b.items():
                k = k1 + k2
                out[k] = out.get(k, 0) + c1 * c2
        return MotClass._raw({k: c for k, c in out.items() if c}, r)

    __rmul__ = __mul__

    def inverse(self):
        if len(self._terms) != 1:
            raise ZeroDivisionError(f"{self} is not a unit (only monomials are invertible)")
        (k, c), = self._terms.items()
        return MotClass._raw({-k: 1 / c}, self.r)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return MotClass._raw({k: c / other for k, c in self._terms.items()}, self.r)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        if len(self._terms) == 1:
            (k, c), = self._terms.items()
            return MotClass._raw({k * e: c ** e}, self.r) if e else MotClass.const(1)
        result = MotClass.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.r == o.r and self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.r, frozenset(self._terms.items())))
        return self._hash

    def substitute_power(self, e):
        """Image under L -> L^e (base change to a degree-e point)."""
        return MotClass._raw({k * e: c for k, c in self._terms.items()}, self.r)

    # -- text
    def __str__(self):
        return format_motclass(self)

    def __repr__(self):
        return f"MotClass({format_motclass(self)!r})"


L = MotClass({1: 1})
ONE = MotClass.const(1)
ZERO = MotClass()


def lefschetz_power(s, r=None) -> MotClass:
    """The monomial L^s; s must have denominator dividing r when r is given."""
    s = _frac(s)
    if r is not None and r % s.denominator:
        raise ValueError(f"exponent {s} is incompatible with root order {r}")
    return MotClass.monomial(s)


def virtual_dimension(a):
    """Virtual dimension of a MotClass or of a plain rational (dimension 0)."""
    if isinstance(a, MotClass):
        return a.virtual_dimension()
    return Fraction(0) if a else NEG_INF


def truncate_filtration(a: MotClass, m) -> MotClass:
    """Drop every term of virtual dimension strictly below -m."""
    m = _frac(m)
    return MotClass({k: c for k, c in a.terms.items() if Fraction(k, a.r) >= -m}, a.r)


def format_motclass(a: MotClass) -> str:
    if not a:
        return "0"
    parts = []
    for s, c in a.items():
        if s == 0:
            body = _fmt_frac(abs(c))
        else:
            mono = "L" if s == 1 else (f"L^{{{_fmt_frac(s)}}}")
            body = mono if abs(c) == 1 else f"{_fmt_frac(abs(c))}*{mono}"
        sign = "-" if c < 0 else "+"
        if not parts:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


_TERM = re.compile(
    r"^(?:(?P<coef>\d+(?:/\d+)?)\s*(?:\*|·)?\s*)?"
    r"(?P<L>L(?:\s*\^\s*(?:\{\s*(?P<e1>-?\d+(?:/\d+)?)\s*\}|\(\s*(?P<e2>-?\d+(?:/\d+)?)\s*\)|(?P<e3>-?\d+)))?)?$")


def parse_motclass(text: str) -> MotClass:
    """Inverse of ``format_motclass`` (also accepts a few obvious variants)."""
    s = text.strip().replace("−", "-")
    if not s:
        raise ValueError("empty MotClass text")
    # split at top-level signs, ignoring those inside exponent brackets
    terms, depth, cur, sign = [], 0, "", 1
    for ch in s:
        if ch in "{(":
            depth += 1
        elif ch in "})":
            depth -= 1
        if ch in "+-" and depth == 0 and not cur.rstrip().endswith("^"):
            if cur.strip():
                terms.append((sign, cur.strip()))
                sign = 1
            elif terms:
                raise ValueError(f"dangling sign in {text!r}")
            sign = -sign if ch == "-" else sign
            cur = ""
        else:
            cur += ch
    if not cur.strip():
        raise ValueError(f"dangling sign in {text!r}")
    terms.append((sign, cur.strip()))
    out = MotClass()
    for sg, body in terms:
        m = _TERM.match(body)
        if not m or (m.group("coef") is None and m.group("L") is None):
            raise ValueError(f"cannot parse term {body!r} in {text!r}")
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        if m.group("L"):
            e = m.group("e1") or m.group("e2") or m.group("e3") or "1"
            out = out + MotClass.monomial(Fraction(e), sg * coef)
        else:
            out = out + sg * coef
    return out


# ----------------------------------------------------------------- AlgNumber

class AlgNumber:
    """Element sum_j c_j x^j of Q[x]/(x^r - q); x stays symbolic."""

    __slots__ = ("q", "r", "coeffs")

    def __init__(self, q, coeffs, r=None):
        coeffs = [_frac(c) for c in coeffs] if coeffs else [Fraction(0)]
        r = len(coeffs) if r is None else r
        if len(coeffs) > r:
            raise ValueError("more coefficients than the root order allows")
        coeffs = coeffs + [Fraction(0)] * (r - len(coeffs))
        # canonical: smallest root order that represents the value
        g = r
        for j, c in enumerate(coeffs):
            if c:
                g = math.gcd(g, j)
        if g > 1:
            coeffs = coeffs[::g]
            r //= g
        if not any(coeffs):
            coeffs, r = [Fraction(0)], 1
        self.q = int(q)
        self.r = r
        self.coeffs = tuple(coeffs)

    @classmethod
    def rational(cls, q, c):
        return cls(q, [c], 1)

    @classmethod
    def q_power(cls, q, s, coeff=1):
        """coeff * q^s with s rational; x = q^{1/denominator(s)}."""
        s = _frac(s)
        r = s.denominator
        a, b = divmod(s.numerator, r)
        coeffs = [Fraction(0)] * r
        coeffs[b] = _frac(coeff) * Fraction(q) ** a
        return cls(q, coeffs, r)

    def _lift(self, r):
        f = r // self.r
        out = [Fraction(0)] * r
        for j, c in enumerate(self.coeffs):
            out[j * f] = c
        return out

    def _coerce(self, other):
        if isinstance(other, AlgNumber):
            if other.q != self.q:
                raise ValueError(f"cannot combine values at q={self.q} and q={other.q}")
            return other
        if isinstance(other, (int, Fraction, Rational)):
            return AlgNumber(self.q, [other], 1)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r = _lcm(self.r, o.r)
        return AlgNumber(self.q, [a + b for a, b in zip(self._lift(r), o._lift(r))], r)

    __radd__ = __add__

    def __neg__(self):
        return AlgNumber(self.q, [-c for c in self.coeffs], self.r)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        r = _lcm(self.r, o.r)
        a, b = self._lift(r), o._lift(r)
        out = [Fraction(0)] * r
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if y:
                    k = i + j
                    if k >= r:
                        out[k - r] += x * y * self.q
                    else:
                        out[k] += x * y
        return AlgNumber(self.q, out, r)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgNumber(self.q, [c / other for c in self.coeffs], self.r)
        if isinstance(other, AlgNumber) and sum(1 for c in other.coeffs if c) == 1:
            j = next(i for i, c in enumerate(other.coeffs) if c)
            inv = AlgNumber.q_power(self.q, Fraction(-j, other.r), 1 / other.coeffs[j])
            return self * inv
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, MotClass) else None
        if o is None:
            return NotImplemented
        return self.r == o.r and self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.q, self.r, self.coeffs))

    def is_rational(self):
        return self.r == 1

    def rational_value(self):
        if self.r != 1:
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def to_float(self):
        x = float(self.q) ** (1.0 / self.r)
        return sum(float(c) * x ** j for j, c in enumerate(self.coeffs))

    def __float__(self):
        return self.to_float()

    def __str__(self):
        if self.r == 1:
            return _fmt_frac(self.coeffs[0])
        parts = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            if j == 0:
                body = _fmt_frac(abs(c))
            else:
                mono = f"{self.q}^{{{_fmt_frac(Fraction(j, self.r))}}}"
                body = mono if abs(c) == 1 else f"{_fmt_frac(abs(c))}*{mono}"
            if not parts:
                parts.append(body if c > 0 else "-" + body)
            else:
                parts.append(f" {'-' if c < 0 else '+'} {body}")
        return "".join(parts)

    def __repr__(self):
        return f"AlgNumber(q={self.q}, {self})"


def count_specialize(a, q: int) -> AlgNumber:
    """Counting measure: L -> q, L^{1/r} -> x with x^r = q."""
    if not isinstance(a, MotClass):
        return AlgNumber.rational(q, _frac(a))
    r = a.r
    coeffs = [Fraction(0)] * r
    for k, c in a.terms.items():
        hi, lo = divmod(k, r)
        coeffs[lo] += c * Fraction(q) ** hi
    return AlgNumber(q, coeffs, r)


def specialize_rational(a, q: int) -> Fraction:
    """Counting measure for classes with integral L-exponents only."""
    if not isinstance(a, MotClass):
        return _frac(a)
    if a.r != 1:
        raise ValueError(f"{a} has fractional powers of L; value is not rational")
    return sum((c * Fraction(q) ** k for k, c in a.terms.items()), Fraction(0))


def toric_class(fan) -> MotClass:
    """Orbit decomposition: sum over all cones of (L - 1)^{n - dim cone}."""
    from toricount.fan import all_cones

    n = fan.ambient_rank
    torus = L - 1
    total = MotClass()
    for cone in all_cones(fan):
        total = total + torus ** (n - len(cone))
    return total
