"""Complete regular fans of split toric varieties.

Rays are indexed by their position in ``Fan.rays``; that order is the index
set for every variable T_i, multidegree and multiplicity tuple downstream.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import gcd

from toricount import _snf


class FanError(ValueError):
    """Malformed fan description."""


class PicardError(ValueError):
    """The class group of the fan is not a free abelian group."""


@dataclass(frozen=True)
class Fan:
    ambient_rank: int
    rays: tuple
    max_cones: tuple
    label: str = ""

    def __post_init__(self):
        n = self.ambient_rank
        if not isinstance(n, int) or n < 1:
            raise FanError(f"ambient rank must be a positive integer, got {n!r}")
        rays = tuple(tuple(int(x) for x in r) for r in self.rays)
        if not rays:
            raise FanError("fan has no rays")
        seen = set()
        for i, r in enumerate(rays):
            if len(r) != n:
                raise FanError(f"ray {i} has length {len(r)}, expected {n}")
            if not any(r):
                raise FanError(f"ray {i} is zero")
            if gcd(*r) != 1:
                raise FanError(f"ray {i} = {list(r)} is not primitive")
            if r in seen:
                raise FanError(f"ray {i} = {list(r)} is duplicated")
            seen.add(r)
        cones = []
        for c in self.max_cones:
            c = tuple(sorted(int(i) for i in c))
            if len(set(c)) != len(c):
                raise FanError(f"cone {list(c)} repeats a ray")
            if len(c) != n:
                raise FanError(f"cone {list(c)} has {len(c)} rays, expected {n}")
            if any(i < 0 or i >= len(rays) for i in c):
                raise FanError(f"cone {list(c)} refers to a missing ray")
            cones.append(c)
        if not cones:
            raise FanError("fan has no maximal cones")
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "max_cones", tuple(cones))

    @property
    def n_rays(self):
        return len(self.rays)

    @cached_property
    def _cone_sets(self):
        return tuple(frozenset(c) for c in self.max_cones)

    @cached_property
    def collections(self):
        return primitive_collections(self)

    def __hash__(self):
        return hash((self.ambient_rank, self.rays, self.max_cones))

    def __eq__(self, other):
        if not isinstance(other, Fan):
            return NotImplemented
        return (self.ambient_rank, self.rays, frozenset(self.max_cones)) == (
            other.ambient_rank, other.rays, frozenset(other.max_cones))


@dataclass
class ValidationReport:
    smooth: bool
    complete: bool
    details: list = field(default_factory=list)

    @property
    def ok(self):
        return self.smooth and self.complete


@dataclass(frozen=True)
class PicData:
    rank: int
    ray_pairing: tuple
    degree_matrix: tuple
    section_matrix: tuple
    invariant_factors: tuple

    def degree(self, d):
        """Class in Pic(X) = Z^r of the divisor sum_i d_i D_i."""
        return tuple(sum(a * b for a, b in zip(row, d)) for row in self.degree_matrix)

    def lift(self, c):
        return tuple(sum(c[k] * self.section_matrix[k][i] for k in range(self.rank))
                     for i in range(len(self.section_matrix[0]) if self.rank else 0))


# --------------------------------------------------------------------- parsing

def parse_fan(document) -> Fan:
    """Build a Fan from a mapping (or JSON text) with keys dim, rays, max_cones."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise FanError(f"fan document is not valid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise FanError("fan document must be a mapping")
    dim = document.get("dim", document.get("n"))
    rays = document.get("rays")
    cones = document.get("max_cones", document.get("cones"))
    if dim is None or rays is None or cones is None:
        raise FanError("fan document needs 'dim', 'rays' and 'max_cones'")
    try:
        return Fan(int(dim), tuple(tuple(r) for r in rays), tuple(tuple(c) for c in cones),
                   str(document.get("label", "")))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, FanError):
            raise
        raise FanError(f"malformed fan document: {exc}") from None


def fan_document(fan: Fan) -> dict:
    return {"dim": fan.ambient_rank, "rays": [list(r) for r in fan.rays],
            "max_cones": [list(c) for c in fan.max_cones], "label": fan.label}


def dump_fan(fan: Fan) -> str:
    return json.dumps(fan_document(fan), indent=2) + "\n"


# --------------------------------------------------------------------- library

def projective_line():
    return Fan(1, ((1,), (-1,)), ((0,), (1,)), "P1")


def projective_plane():
    return Fan(2, ((1, 0), (0, 1), (-1, -1)), ((0, 1), (1, 2), (0, 2)), "P2")


def p1_times_p1():
    return Fan(2, ((1, 0), (-1, 0), (0, 1), (0, -1)),
               ((0, 2), (2, 1), (1, 3), (3, 0)), "P1xP1")


def hirzebruch(a):
    return Fan(2, ((1, 0), (0, 1), (-1, a), (0, -1)),
               ((0, 1), (1, 2), (2, 3), (3, 0)), f"F{a}")


def del_pezzo_6():
    rays = ((1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1))
    return Fan(2, rays, tuple((i, (i + 1) % 6) for i in range(6)), "dP6")


LIBRARY_NAMES = ("p1", "p2", "p1xp1", "hirzebruch:a", "dp6")


def library_fan(name: str) -> Fan:
    key = name.strip().lower()
    if key == "p1":
        return projective_line()
    if key == "p2":
        return projective_plane()
    if key == "p1xp1":
        return p1_times_p1()
    if key == "dp6":
        return del_pezzo_6()
    if key.startswith("hirzebruch:") or (key.startswith("f") and key[1:].isdigit()):
        tail = key.split(":", 1)[1] if ":" in key else key[1:]
        try:
            a = int(tail)
        except ValueError:
            raise FanError(f"bad Hirzebruch parameter in {name!r}") from None
        if a < 0:
            raise FanError("Hirzebruch parameter must be nonnegative")
        return hirzebruch(a)
    raise FanError(f"unknown fan {name!r}; library names: {', '.join(LIBRARY_NAMES)}")


def load_fan(spec: str) -> Fan:
    """Resolve a library name or a path to a fan file."""
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            fan = parse_fan(fh.read())
        if not fan.label:
            fan = Fan(fan.ambient_rank, fan.rays, fan.max_cones, os.path.basename(spec))
        return fan
    return library_fan(spec)


# ------------------------------------------------------------------ validation

def _cone_det(fan, cone, extra=None):
    rows = [fan.rays[i] for i in cone]
    if extra is not None:
        rows.append(fan.rays[extra])
    return _snf.det(rows)


def _solve(rows, v):
    """Coefficients lam with sum lam_k rows[k] == v, or None if singular."""
    n = len(v)
    M = [[Fraction(rows[k][j]) for k in range(n)] + [Fraction(v[j])] for j in range(n)]
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c] != 0), None)
        if p is None:
            return None
        M[c], M[p] = M[p], M[c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [M[k][n] / M[k][k] for k in range(n)]


def _generic_vector(fan):
    """A rational vector off every hyperplane spanned by n-1 rays."""
    n = fan.ambient_rank
    spans = [s for s in combinations(range(fan.n_rays), n - 1)]
    for t in range(1, 200):
        v = [Fraction(1)] + [Fraction(t * (k + 2) + 1, 7 * k + 3 + t) for k in range(1, n)]
        v = [x * (1 if (k + t) % 2 else -1) for k, x in enumerate(v)]
        if all(_snf.det([[Fraction(x) for x in fan.rays[i]] for i in s] + [v]) != 0
               for s in spans):
            return v
    raise RuntimeError("no generic vector found")  # pragma: no cover


def validate(fan: Fan) -> ValidationReport:
    """Check smoothness and the completeness certificate; never raises."""
    details = []
    smooth = True
    for c in fan.max_cones:
        d = _cone_det(fan, c)
        if abs(d) != 1:
            smooth = False
            details.append(f"cone {list(c)} has determinant {d} (not unimodular)")

    complete = True
    used = set().union(*fan._cone_sets)
    for i in range(fan.n_rays):
        if i not in used:
            complete = False
            details.append(f"ray {i} lies in no maximal cone")

    n = fan.ambient_rank
    facets = {}
    for k, c in enumerate(fan.max_cones):
        for f in combinations(c, n - 1):
            facets.setdefault(f, []).append(k)
    for f, owners in sorted(facets.items()):
        if len(owners) != 2:
            complete = False
            details.append(f"facet {list(f)} borders {len(owners)} maximal cone(s), expected 2")
            continue
        a, b = (next(i for i in fan.max_cones[k] if i not in f) for k in owners)
        sa, sb = _cone_det(fan, f, a), _cone_det(fan, f, b)
        if sa * sb >= 0:
            complete = False
            details.append(f"cones {list(fan.max_cones[owners[0]])} and "
                           f"{list(fan.max_cones[owners[1]])} lie on the same side of facet {list(f)}")

    # connectivity of the facet-adjacency graph
    adj = {k: set() for k in range(len(fan.max_cones))}
    for owners in facets.values():
        for x in owners:
            adj[x].update(o for o in owners if o != x)
    seen, stack = {0}, [0]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != len(fan.max_cones):
        complete = False
        details.append("facet-adjacency graph of maximal cones is disconnected")

    # the cones must cover a generic direction exactly once
    if complete and smooth:
        v = _generic_vector(fan)
        hits = 0
        for c in fan.max_cones:
            lam = _solve([fan.rays[i] for i in c], v)
            if lam is not None and all(x > 0 for x in lam):
                hits += 1
        if hits != 1:
            complete = False
            details.append(f"a generic direction lies in {hits} maximal cones, expected 1")
    return ValidationReport(smooth, complete, details)


# --------------------------------------------------------------- combinatorics

def cone_supported(fan: Fan, S) -> bool:
    S = frozenset(S)
    if any(i < 0 or i >= fan.n_rays for i in S):
        raise IndexError(f"ray index out of range in {sorted(S)}")
    return any(S <= c for c in fan._cone_sets)


def primitive_collections(fan: Fan) -> frozenset:
    """Minimal ray subsets contained in no cone."""
    found = []
    for size in range(2, fan.n_rays + 1):
        for S in combinations(range(fan.n_rays), size):
            S = frozenset(S)
            if any(P <= S for P in found):
                continue
            if not cone_supported(fan, S):
                found.append(S)
    return frozenset(found)


def all_cones(fan: Fan) -> list:
    """Every cone of the fan (faces of maximal cones, zero cone included), once."""
    out = set()
    for c in fan.max_cones:
        for k in range(len(c) + 1):
            out.update(frozenset(s) for s in combinations(c, k))
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def picard_lattice(fan: Fan) -> PicData:
    n, N = fan.ambient_rank, fan.n_rays
    pairing = [[fan.rays[i][j] for i in range(N)] for j in range(n)]
    A = _snf.transpose(pairing)  # N x n: m -> (<m, rho_i>)_i
    U, D, _V = _snf.smith_normal_form(A)
    factors = tuple(D[k][k] for k in range(min(N, n)))
    if any(f != 1 for f in factors):
        raise PicardError(f"cokernel has invariant factors {factors}; expected all 1")
    Uinv = _snf.inverse_unimodular(U)
    degree = tuple(tuple(row) for row in U[n:])
    section = tuple(tuple(Uinv[i][k] for i in range(N)) for k in range(n, N))
    return PicData(N - n, tuple(tuple(r) for r in pairing), degree, section, factors)


def degree_admissible(fan: Fan, d) -> bool:
    if len(d) != fan.n_rays:
        raise ValueError(f"multidegree has {len(d)} entries, fan has {fan.n_rays} rays")
    if any(x < 0 for x in d):
        raise ValueError("multidegree entries must be nonnegative")
    return all(sum(di * r[j] for di, r in zip(d, fan.rays)) == 0
               for j in range(fan.ambient_rank))


def log_anticanonical_degree(fan: Fan, m, d) -> Fraction:
    if len(m) != fan.n_rays or len(d) != fan.n_rays:
        raise ValueError("m and d must have one entry per ray")
    return sum((Fraction(di, mi) for di, mi in zip(d, m)), Fraction(0))
