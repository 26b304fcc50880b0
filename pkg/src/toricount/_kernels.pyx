# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled form-enumeration kernel; same contract as _kernels_py.count_forms."""
from libc.stdlib cimport malloc, free


cdef struct Ctx:
    int n
    int ncoll
    int stride
    int q
    int *sizes
    int **coeffs
    int **degs
    int **infs
    int *at_start      # collections containing coordinate i: at_idx[at_start[i]:at_start[i+1]]
    int *at_idx
    int *last
    int *add
    int *sub
    int *mul
    int *inv
    # per-level state, level l in 0..n: collection c uses slot l*ncoll + c
    int *gbuf          # (n+1)*ncoll*stride
    int *gdeg          # -2: settled, -1: no member yet, else degree of gcd
    int *ginf
    int *tmp_a
    int *tmp_b


cdef int poly_gcd(Ctx *cx, int *a, int da, int *b, int db, int *out) nogil:
    """Monic gcd of a (degree da) and b (degree db) into out; returns its degree."""
    cdef int q = cx.q
    cdef int i, shift, c, lead, t
    cdef int *x = cx.tmp_a
    cdef int *y = cx.tmp_b
    cdef int *sw
    for i in range(da + 1):
        x[i] = a[i]
    for i in range(db + 1):
        y[i] = b[i]
    while db >= 0:
        lead = cx.inv[y[db]]
        while da >= db:
            c = cx.mul[x[da] * q + lead]
            shift = da - db
            for i in range(db + 1):
                x[i + shift] = cx.sub[x[i + shift] * q + cx.mul[c * q + y[i]]]
            while da >= 0 and x[da] == 0:
                da -= 1
        sw = x
        x = y
        y = sw
        t = da
        da = db
        db = t
    c = cx.inv[x[da]]
    for i in range(da + 1):
        out[i] = cx.mul[c * q + x[i]]
    return da


cdef object rec(Ctx *cx, int i, int open_count, int k_lo, int k_hi, object rest):
    cdef int k, j, c, still, dead, h, a, src, dst, t, s
    cdef int stride = cx.stride
    cdef int ncoll = cx.ncoll
    cdef int *f
    cdef int df, fi
    total = 0
    for k in range(k_lo, k_hi):
        f = cx.coeffs[i] + k * stride
        df = cx.degs[i][k]
        fi = cx.infs[i][k]
        still = open_count
        dead = 0
        # copy level i state into level i + 1
        for c in range(ncoll):
            src = i * ncoll + c
            dst = (i + 1) * ncoll + c
            cx.gdeg[dst] = cx.gdeg[src]
            cx.ginf[dst] = cx.ginf[src]
            if cx.gdeg[src] >= 0:
                for t in range(cx.gdeg[src] + 1):
                    cx.gbuf[dst * stride + t] = cx.gbuf[src * stride + t]
        for j in range(cx.at_start[i], cx.at_start[i + 1]):
            c = cx.at_idx[j]
            dst = (i + 1) * ncoll + c
            if cx.gdeg[dst] == -2:
                continue
            if cx.gdeg[dst] == -1:
                for t in range(df + 1):
                    cx.gbuf[dst * stride + t] = f[t]
                h = df
            else:
                h = poly_gcd(cx, cx.gbuf + dst * stride, cx.gdeg[dst], f, df,
                             cx.gbuf + dst * stride)
            a = cx.ginf[dst] and fi
            if h == 0 and not a:
                cx.gdeg[dst] = -2
                still -= 1
            elif cx.last[c] == i:
                dead = 1
                break
            else:
                cx.gdeg[dst] = h
                cx.ginf[dst] = a
        if dead:
            continue
        if still == 0:
            total += rest[i + 1]
        else:
            total += rec(cx, i + 1, still, 0, cx.sizes[i + 1], rest)
    return total


def count_forms(coeffs, degs, infs, int stride, collections, int q, add, sub, mul, inv,
                int lo, int hi):
    cdef Ctx cx
    cdef int n = len(degs)
    cdef int ncoll = len(collections)
    cdef int i, c, k, pos
    cdef int[::1] mv
    keep = []  # holds the buffers alive while the kernel runs
    cx.n = n
    cx.ncoll = ncoll
    cx.stride = stride
    cx.q = q
    cx.sizes = <int *> malloc(n * sizeof(int))
    cx.coeffs = <int **> malloc(n * sizeof(int *))
    cx.degs = <int **> malloc(n * sizeof(int *))
    cx.infs = <int **> malloc(n * sizeof(int *))
    cx.at_start = <int *> malloc((n + 1) * sizeof(int))
    cx.at_idx = <int *> malloc((sum(len(m) for m in collections) + 1) * sizeof(int))
    cx.last = <int *> malloc((ncoll + 1) * sizeof(int))
    cx.gbuf = <int *> malloc((n + 1) * (ncoll + 1) * stride * sizeof(int))
    cx.gdeg = <int *> malloc((n + 1) * (ncoll + 1) * sizeof(int))
    cx.ginf = <int *> malloc((n + 1) * (ncoll + 1) * sizeof(int))
    cx.tmp_a = <int *> malloc(stride * sizeof(int))
    cx.tmp_b = <int *> malloc(stride * sizeof(int))
    try:
        for i in range(n):
            cx.sizes[i] = len(degs[i])
            mv = coeffs[i]
            keep.append(coeffs[i])
            cx.coeffs[i] = &mv[0]
            mv = degs[i]
            keep.append(degs[i])
            cx.degs[i] = &mv[0]
            mv = infs[i]
            keep.append(infs[i])
            cx.infs[i] = &mv[0]
        pos = 0
        for i in range(n):
            cx.at_start[i] = pos
            for c in range(ncoll):
                if i in collections[c]:
                    cx.at_idx[pos] = c
                    pos += 1
        cx.at_start[n] = pos
        for c in range(ncoll):
            cx.last[c] = max(collections[c])
            cx.gdeg[c] = -1
            cx.ginf[c] = 1
        for name, tab in (("add", add), ("sub", sub), ("mul", mul), ("inv", inv)):
            mv = tab
            keep.append(tab)
            if name == "add":
                cx.add = &mv[0]
            elif name == "sub":
                cx.sub = &mv[0]
            elif name == "mul":
                cx.mul = &mv[0]
            else:
                cx.inv = &mv[0]
        rest = [1] * (n + 1)
        for i in range(n - 1, -1, -1):
            rest[i] = rest[i + 1] * cx.sizes[i]
        if ncoll == 0:
            return (hi - lo) * rest[1]
        return rec(&cx, 0, ncoll, lo, hi, rest)
    finally:
        free(cx.sizes)
        free(cx.coeffs)
        free(cx.degs)
        free(cx.infs)
        free(cx.at_start)
        free(cx.at_idx)
        free(cx.last)
        free(cx.gbuf)
        free(cx.gdeg)
        free(cx.ginf)
        free(cx.tmp_a)
        free(cx.tmp_b)
