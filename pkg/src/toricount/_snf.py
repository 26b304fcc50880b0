"""Smith normal form over the integers with unimodular transforms.

Matrices are lists of lists of Python ints.  Sizes here are tiny (a handful
of rays), so clarity wins over speed.
"""


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B):
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(len(A))]


def transpose(A):
    return [list(row) for row in zip(*A)]


def det(A):
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(row) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                # Bareiss division is exact; keep ints as ints
                M[i][j] = num // prev if isinstance(num, int) else num / prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def smith_normal_form(A):
    """Return ``(U, D, V)`` with ``U @ A @ V == D`` and U, V unimodular.

    D is diagonal with nonnegative entries d_1 | d_2 | ... .
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(row) for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        # row_dst += c * row_src
        D[dst] = [a + c * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, c):
        for row in D:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] != 0 and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t] != 0:
                    add_row(t, i, -(D[i][t] // D[t][t]))
                    if D[i][t] != 0:
                        done = False
            for j in range(t + 1, n):
                if D[t][j] != 0:
                    add_col(t, j, -(D[t][j] // D[t][t]))
                    if D[t][j] != 0:
                        done = False
            if done:
                # divisibility of the rest of the block by the pivot
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if D[i][j] % D[t][t] != 0), None)
                if bad is None:
                    break
                add_row(bad[0], t, 1)
                continue
            # move the new smallest entry of row/column t into the pivot
            cand = [(abs(D[i][t]), i, t) for i in range(t, m) if D[i][t] != 0]
            cand += [(abs(D[t][j]), t, j) for j in range(t, n) if D[t][j] != 0]
            _, i, j = min(cand)
            swap_rows(t, i)
            swap_cols(t, j)
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return U, D, V


def inverse_unimodular(U):
    """Exact inverse of a unimodular integer matrix via Gauss-Jordan over Z."""
    from fractions import Fraction

    n = len(U)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(U)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    out = []
    for row in M:
        right = row[n:]
        if any(x.denominator != 1 for x in right):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in right])
    return out
