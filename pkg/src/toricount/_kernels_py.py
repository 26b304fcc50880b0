"""Pure-Python enumeration kernels (reference implementation and fallback).

``count_forms`` walks tuples of forms coordinate by coordinate, carrying for
every primitive collection the monic gcd of the dehomogenised forms seen so
far and whether all of them vanish at infinity.  A collection is settled
once its gcd is constant and some member is nonzero at infinity; a branch
dies when a collection's last member leaves it unsettled.  When every
collection is settled the remaining coordinates are free, so the branch
contributes the product of the remaining list sizes.
"""


def _gcd(a, b, add, sub, mul, inv, q):
    # a, b: lists constant-first without trailing zeros
    a, b = list(a), list(b)
    while b:
        db = len(b) - 1
        lead = inv[b[-1]]
        while len(a) - 1 >= db and a:
            c = mul[a[-1] * q + lead]
            shift = len(a) - 1 - db
            for i in range(db + 1):
                a[i + shift] = sub[a[i + shift] * q + mul[c * q + b[i]]]
            while a and a[-1] == 0:
                a.pop()
        a, b = b, a
    c = inv[a[-1]]
    return [mul[c * q + x] for x in a]


def _setup(n, collections):
    at = [[] for _ in range(n)]
    last = []
    for c, members in enumerate(collections):
        for i in members:
            at[i].append(c)
        last.append(max(members))
    return at, last


def count_forms(coeffs, degs, infs, stride, collections, q, add, sub, mul, inv, lo, hi):
    n = len(degs)
    sizes = [len(x) for x in degs]
    polys = [[list(coeffs[i][k * stride:k * stride + degs[i][k] + 1]) for k in range(sizes[i])]
             for i in range(n)]
    at, last = _setup(n, collections)
    rest = [1] * (n + 1)
    for i in range(n - 1, -1, -1):
        rest[i] = rest[i + 1] * sizes[i]
    ncoll = len(collections)

    def rec(i, gs, allinf, open_count, k_lo, k_hi):
        total = 0
        for k in range(k_lo, k_hi):
            f = polys[i][k]
            fi = infs[i][k]
            gs2, inf2 = gs, allinf
            still = open_count
            dead = False
            copied = False
            for c in at[i]:
                g = gs[c]
                if g == ():
                    continue  # settled
                if not copied:
                    gs2, inf2, copied = list(gs), list(allinf), True
                h = f if g is None else _gcd(g, f, add, sub, mul, inv, q)
                a = allinf[c] and fi
                if len(h) == 1 and not a:
                    gs2[c] = ()
                    still -= 1
                elif last[c] == i:
                    dead = True
                    break
                else:
                    gs2[c] = h
                    inf2[c] = a
            if dead:
                continue
            if still == 0:
                total += rest[i + 1]
            else:
                total += rec(i + 1, gs2, inf2, still, 0, sizes[i + 1])
        return total

    # None: no member seen yet; (): settled
    return rec(0, [None] * ncoll, [True] * ncoll, ncoll, lo, hi)


def count_divisors(masks, collections, lo, hi):
    """Tuples of support masks whose intersection over each collection is empty."""
    n = len(masks)
    sizes = [len(x) for x in masks]
    at, last = _setup(n, collections)
    rest = [1] * (n + 1)
    for i in range(n - 1, -1, -1):
        rest[i] = rest[i + 1] * sizes[i]
    FULL = -1  # all bits set

    def rec(i, inter, open_count, k_lo, k_hi):
        total = 0
        for k in range(k_lo, k_hi):
            s = masks[i][k]
            inter2 = inter
            still = open_count
            dead = False
            copied = False
            for c in at[i]:
                cur = inter[c]
                if cur == 0:
                    continue
                if not copied:
                    inter2, copied = list(inter), True
                v = cur & s
                inter2[c] = v
                if v == 0:
                    still -= 1
                elif last[c] == i:
                    dead = True
                    break
            if dead:
                continue
            if still == 0:
                total += rest[i + 1]
            else:
                total += rec(i + 1, inter2, still, 0, sizes[i + 1])
        return total

    return rec(0, [FULL] * len(collections), len(collections), lo, hi)
