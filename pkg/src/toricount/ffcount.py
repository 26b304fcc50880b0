"""Brute-force counts of morphisms P^1 -> X_Sigma over F_q in Cox coordinates.

A morphism of multidegree d is a tuple of nonzero binary forms f_i of
degree d_i with no common zero along any primitive collection, taken up
to the Neron-Severi torus.  Two oracles count them:

* ``count_hom_forms`` enumerates the forms themselves and tests common
  zeros with polynomial gcds;
* ``count_hom_divisors`` enumerates effective divisors on P^1 (multisets
  of closed points) and tests that supports do not meet.

Finite fields F_q with q = p^k are built from addition and multiplication
tables; elements are the integers 0..q-1.  Polynomials over F_q are tuples
of coefficients, constant term first.
"""
from __future__ import annotations

import time
from array import array
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from math import prod

from toricount import kernels
from toricount.fan import Fan, degree_admissible, picard_lattice


class BudgetExceeded(RuntimeError):
    pass


class OracleMismatch(AssertionError):
    pass


# ------------------------------------------------------------------ fields

def _prime_power(q):
    if q < 2:
        raise ValueError(f"q = {q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1:
        raise ValueError(f"q = {q} is not a prime power")
    return p, k


class GF:
    """The field with q elements, as lookup tables."""

    def __init__(self, q):
        p, k = _prime_power(q)
        self.q, self.p, self.k = q, p, k
        if k == 1:
            self.modulus = (0, 1)
            mul = [[(a * b) % p for b in range(q)] for a in range(q)]
            add = [[(a + b) % p for b in range(q)] for a in range(q)]
        else:
            self.modulus = _find_irreducible_prime(p, k)
            add = [[_digits_add(a, b, p, k) for b in range(q)] for a in range(q)]
            mul = [[_digits_mul(a, b, p, k, self.modulus) for b in range(q)] for a in range(q)]
        self.add = add
        self.mul = mul
        self.neg = [next(b for b in range(q) if add[a][b] == 0) for a in range(q)]
        self.sub = [[add[a][self.neg[b]] for b in range(q)] for a in range(q)]
        self.inv = [0] + [next(b for b in range(1, q) if mul[a][b] == 1) for a in range(1, q)]

    def __repr__(self):
        return f"GF({self.q})"

    @cached_property
    def tables(self):
        """Flat int arrays (add, sub, mul, inv) for the enumeration kernels."""
        flat = lambda t: array("i", [x for row in t for x in row])
        return flat(self.add), flat(self.sub), flat(self.mul), array("i", self.inv)

    # polynomial helpers (tuples, constant term first, no trailing zeros)
    def trim(self, f):
        f = list(f)
        while f and f[-1] == 0:
            f.pop()
        return tuple(f)

    def poly_mul(self, f, g):
        if not f or not g:
            return ()
        out = [0] * (len(f) + len(g) - 1)
        for i, a in enumerate(f):
            if a:
                for j, b in enumerate(g):
                    out[i + j] = self.add[out[i + j]][self.mul[a][b]]
        return self.trim(out)

    def poly_divmod(self, f, g):
        if not g:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(f)
        dg = len(g) - 1
        lead_inv = self.inv[g[-1]]
        quo = [0] * max(len(f) - dg, 0)
        while len(r) - 1 >= dg and r:
            c = self.mul[r[-1]][lead_inv]
            shift = len(r) - 1 - dg
            quo[shift] = c
            for i, b in enumerate(g):
                r[i + shift] = self.sub[r[i + shift]][self.mul[c][b]]
            while r and r[-1] == 0:
                r.pop()
        return self.trim(quo), tuple(r)

    def monic(self, f):
        if not f:
            return f
        c = self.inv[f[-1]]
        return tuple(self.mul[c][a] for a in f)

    def poly_gcd(self, f, g):
        f, g = self.trim(f), self.trim(g)
        while g:
            f, g = g, self.poly_divmod(f, g)[1]
        return self.monic(f)

    def monic_polys(self, deg):
        for tail in product(range(self.q), repeat=deg):
            yield tuple(tail) + (1,)


def _digits(a, p, k):
    return [(a // p ** i) % p for i in range(k)]


def _undigits(ds, p):
    return sum(d * p ** i for i, d in enumerate(ds))


def _digits_add(a, b, p, k):
    return _undigits([(x + y) % p for x, y in zip(_digits(a, p, k), _digits(b, p, k))], p)


def _digits_mul(a, b, p, k, modulus):
    x, y = _digits(a, p, k), _digits(b, p, k)
    out = [0] * (2 * k - 1)
    for i, u in enumerate(x):
        for j, v in enumerate(y):
            out[i + j] = (out[i + j] + u * v) % p
    for top in range(2 * k - 2, k - 1, -1):
        c = out[top]
        if c:
            for i, mcoef in enumerate(modulus):
                out[top - k + i] = (out[top - k + i] - c * mcoef) % p
    return _undigits(out[:k], p)


def _find_irreducible_prime(p, k):
    """Monic irreducible of degree k over F_p, coefficients constant first."""
    prime = GF(p)
    for f in prime.monic_polys(k):
        if f[0] == 0:
            continue
        if all(prime.poly_divmod(f, g)[1]
               for dg in range(1, k // 2 + 1) for g in prime.monic_polys(dg)):
            return f
    raise RuntimeError(f"no irreducible polynomial of degree {k} over F_{p}")


@lru_cache(maxsize=None)
def field(q) -> GF:
    return GF(q)


# ------------------------------------------------------------ closed points

INFINITY = "infinity"


def point_degree(pt):
    return 1 if pt == INFINITY else len(pt) - 1


def format_point(pt):
    if pt == INFINITY:
        return "inf"
    terms = []
    for i in range(len(pt) - 1, -1, -1):
        c = pt[i]
        if not c:
            continue
        mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
        if not mono:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(terms)


@dataclass(frozen=True)
class ClosedPointTable:
    q: int
    by_degree: tuple  # by_degree[e - 1] = closed points of degree e

    @property
    def depth(self):
        return len(self.by_degree)

    @cached_property
    def points(self):
        return tuple(pt for level in self.by_degree for pt in level)

    @cached_property
    def index(self):
        return {pt: i for i, pt in enumerate(self.points)}

    def count(self, e):
        return len(self.by_degree[e - 1])


@lru_cache(maxsize=None)
def closed_points(q, deg_max) -> ClosedPointTable:
    if deg_max < 1:
        raise ValueError("deg_max must be at least 1")
    F = field(q)
    levels = [[INFINITY] + [(c, 1) for c in range(q)]]
    irreducible = {1: [(c, 1) for c in range(q)]}
    for e in range(2, deg_max + 1):
        reducible = set()
        for k in range(1, e // 2 + 1):
            for f in irreducible[k]:
                for g in F.monic_polys(e - k):
                    reducible.add(F.poly_mul(f, g))
        irr = [f for f in F.monic_polys(e) if f not in reducible]
        irreducible[e] = irr
        levels.append(irr)
    return ClosedPointTable(q, tuple(tuple(level) for level in levels))


# ------------------------------------------------------------ forms, divisors

@dataclass(frozen=True)
class BinaryForm:
    """sum_i coeffs[i] u^{d-i} v^i over F_q."""

    q: int
    degree: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.degree + 1:
            raise ValueError(f"degree {self.degree} form needs {self.degree + 1} coefficients")
        if any(not 0 <= c < self.q for c in self.coeffs):
            raise ValueError(f"coefficients must lie in 0..{self.q - 1}")

    def is_zero(self):
        return not any(self.coeffs)

    def dehomogenise(self):
        """f(t, 1) with t = u/v, constant term first."""
        return field(self.q).trim(reversed(self.coeffs))

    def order_at_infinity(self):
        """Multiplicity of the zero v = 0."""
        if self.is_zero():
            raise ValueError("the zero form has no divisor")
        return self.degree - (len(self.dehomogenise()) - 1)


@dataclass(frozen=True)
class PointDivisor:
    parts: tuple  # ((closed_point, multiplicity), ...)

    def __post_init__(self):
        pts = [p for p, _ in self.parts]
        if len(set(pts)) != len(pts):
            raise ValueError("points of a divisor must be distinct")
        if any(k < 1 for _, k in self.parts):
            raise ValueError("multiplicities must be >= 1")

    @property
    def degree(self):
        return sum(k * point_degree(p) for p, k in self.parts)

    def multiplicities(self):
        return dict(self.parts)

    def support(self):
        return frozenset(p for p, _ in self.parts)

    def __str__(self):
        if not self.parts:
            return "0"
        return " + ".join(f"{k}*[{format_point(p)}]" for p, k in self.parts)


def multiplicity_profile(f: BinaryForm, table: ClosedPointTable) -> PointDivisor:
    if f.is_zero():
        raise ValueError("the zero form has no divisor")
    F = field(f.q)
    parts = []
    inf = f.order_at_infinity()
    if inf:
        parts.append((INFINITY, inf))
    g = f.dehomogenise()
    for level in table.by_degree:
        for pt in level:
            if pt == INFINITY or len(g) < len(pt):
                continue
            k = 0
            while True:
                quo, rem = F.poly_divmod(g, pt)
                if rem:
                    break
                g, k = quo, k + 1
            if k:
                parts.append((pt, k))
    if len(g) > 1:
        raise ValueError(f"closed point table of depth {table.depth} cannot factor {f}")
    return PointDivisor(tuple(parts))


def campana_admissible(D: PointDivisor, m_i: int) -> bool:
    if m_i < 1:
        raise ValueError("multiplicity must be >= 1")
    return all(k >= m_i for _, k in D.parts)


def forms_of_degree(q, d):
    """All nonzero binary forms of degree d over F_q."""
    for coeffs in product(range(q), repeat=d + 1):
        if any(coeffs):
            yield BinaryForm(q, d, coeffs)


def effective_divisors(table: ClosedPointTable, d):
    """Effective divisors of degree d, as PointDivisors."""
    pts = [p for p in table.points if point_degree(p) <= d]

    def rec(start, left, acc):
        if left == 0:
            yield PointDivisor(tuple(acc))
            return
        for i in range(start, len(pts)):
            e = point_degree(pts[i])
            for k in range(1, left // e + 1):
                acc.append((pts[i], k))
                yield from rec(i + 1, left - k * e, acc)
                acc.pop()

    yield from rec(0, d, [])


# ------------------------------------------------------------------ budgets

@dataclass(frozen=True)
class Budget:
    max_tuples: int | None = None
    max_seconds: float | None = None

    def deadline(self):
        return None if self.max_seconds is None else time.monotonic() + self.max_seconds


BUDGETS = {
    "small": Budget(2 * 10 ** 6, 60.0),
    "medium": Budget(10 ** 8, 600.0),
    "large": Budget(None, None),
}


def budget_from(spec) -> Budget:
    if spec is None:
        return Budget()
    if isinstance(spec, Budget):
        return spec
    if isinstance(spec, str) and spec in BUDGETS:
        return BUDGETS[spec]
    return Budget(int(spec), None)


def _check_size(sizes, budget: Budget):
    total = prod(sizes)
    if budget.max_tuples is not None and total > budget.max_tuples:
        raise BudgetExceeded(f"{total} tuples exceeds the budget of {budget.max_tuples}")


def _multiplicities(fan, m):
    m = (1,) * fan.n_rays if m is None else tuple(int(x) for x in m)
    if len(m) != fan.n_rays or any(x < 1 for x in m):
        raise ValueError(f"need {fan.n_rays} multiplicities, all >= 1")
    return m


def _check_degree(fan, d):
    d = tuple(int(x) for x in d)
    if len(d) != fan.n_rays:
        raise ValueError(f"multidegree has {len(d)} entries, fan has {fan.n_rays} rays")
    if any(x < 0 for x in d):
        raise ValueError("multidegree entries must be nonnegative")
    return d


def _collections(fan):
    return [sorted(c) for c in sorted(fan.collections, key=lambda c: (len(c), sorted(c)))]


def _chunks(n, parts):
    parts = max(1, min(parts, n))
    step, extra = divmod(n, parts)
    out, lo = [], 0
    for i in range(parts):
        hi = lo + step + (i < extra)
        out.append((lo, hi))
        lo = hi
    return out


def _run_partitioned(fn, args, n_first, budget, workers, partitions):
    """Sum fn(*args, lo, hi) over a partition of the first coordinate's list."""
    deadline = budget.deadline()
    ranges = _chunks(n_first, partitions or max(4 * workers, 8))
    total = 0
    if workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn, *args, lo, hi) for lo, hi in ranges]
            for fut in futures:
                remaining = None if deadline is None else max(deadline - time.monotonic(), 0)
                try:
                    total += fut.result(timeout=remaining)
                except TimeoutError:
                    for f in futures:
                        f.cancel()
                    raise BudgetExceeded(f"wall clock budget of {budget.max_seconds}s exhausted")
        return total
    for lo, hi in ranges:
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded(f"wall clock budget of {budget.max_seconds}s exhausted")
        total += fn(*args, lo, hi)
    return total


# ------------------------------------------------------------- form oracle

def admissible_forms(q, d, m_i, table=None):
    """Nonzero forms of degree d whose divisor passes the Campana filter."""
    forms = list(forms_of_degree(q, d))
    if m_i == 1:
        return forms
    table = table or closed_points(q, max(d, 1))
    return [f for f in forms if campana_admissible(multiplicity_profile(f, table), m_i)]


def _pack_forms(forms, stride):
    coeffs = array("i", [0] * (len(forms) * stride))
    degs = array("i", [0] * len(forms))
    infs = array("i", [0] * len(forms))
    for k, f in enumerate(forms):
        g = f.dehomogenise()
        coeffs[k * stride:k * stride + len(g)] = array("i", g)
        degs[k] = len(g) - 1
        infs[k] = int(len(g) - 1 < f.degree)
    return coeffs, degs, infs


def raw_form_count(fan: Fan, q: int, d, m=None, budget=None, workers=1, partitions=None,
                   backend=None) -> int:
    """Number of tuples of nonzero forms with no common zero on any primitive collection."""
    d = _check_degree(fan, d)
    m = _multiplicities(fan, m)
    budget = budget_from(budget)
    if not degree_admissible(fan, d):
        return 0
    table = closed_points(q, max(max(d), 1))
    lists = [admissible_forms(q, di, mi, table) for di, mi in zip(d, m)]
    sizes = [len(x) for x in lists]
    if 0 in sizes:
        return 0
    _check_size(sizes, budget)
    stride = max(d) + 1
    packed = [_pack_forms(forms, stride) for forms in lists]
    add, sub, mul, inv = field(q).tables
    impl = kernels.backend(backend)
    args = ([p[0] for p in packed], [p[1] for p in packed], [p[2] for p in packed], stride,
            _collections(fan), q, add, sub, mul, inv)
    return _run_partitioned(impl.count_forms, args, sizes[0], budget, workers, partitions)


def count_hom_forms(fan: Fan, q: int, d, m=None, budget=None, workers=1, partitions=None,
                    backend=None) -> int:
    raw = raw_form_count(fan, q, d, m, budget, workers, partitions, backend)
    torus = (q - 1) ** picard_lattice(fan).rank
    if raw % torus:
        raise AssertionError(f"raw count {raw} is not divisible by (q-1)^rk = {torus}")
    return raw // torus


# ---------------------------------------------------------- divisor oracle

def admissible_divisors(table, d, m_i):
    return [D for D in effective_divisors(table, d) if campana_admissible(D, m_i)]


def support_mask(D: PointDivisor, table: ClosedPointTable) -> int:
    mask = 0
    for p, _ in D.parts:
        mask |= 1 << table.index[p]
    return mask


def divisor_tuple_count(fan: Fan, q: int, d, m=None, budget=None, workers=1, partitions=None) -> int:
    d = _check_degree(fan, d)
    m = _multiplicities(fan, m)
    budget = budget_from(budget)
    if not degree_admissible(fan, d):
        return 0
    table = closed_points(q, max(max(d), 1))
    masks = [[support_mask(D, table) for D in admissible_divisors(table, di, mi)]
             for di, mi in zip(d, m)]
    sizes = [len(x) for x in masks]
    if 0 in sizes:
        return 0
    _check_size(sizes, budget)
    args = (masks, _collections(fan))
    return _run_partitioned(kernels.count_divisors, args, sizes[0], budget, workers, partitions)


def count_hom_divisors(fan: Fan, q: int, d, m=None, budget=None, workers=1, partitions=None) -> int:
    return (q - 1) ** fan.ambient_rank * divisor_tuple_count(fan, q, d, m, budget, workers,
                                                             partitions)


def count_both(fan: Fan, q: int, d, m=None, budget=None, workers=1) -> int:
    """Run both oracles; raise OracleMismatch if they disagree."""
    a = count_hom_forms(fan, q, d, m, budget, workers)
    b = count_hom_divisors(fan, q, d, m, budget, workers)
    if a != b:
        raise OracleMismatch(f"form count {a} != divisor count {b} for {fan.label} q={q} d={d}")
    return a
