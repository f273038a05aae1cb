"""Pure-Python arithmetic kernels.

Mirror image of the compiled backend in ``_ckern.pyx``: same algorithms,
same pivoting and tie-breaking, bit-identical results.  Polynomials are
lists of ints in [0, q) by ascending power, canonical form has no trailing
zeros (zero polynomial is the empty list).  Field tables are flat
``array('i')`` buffers: ``add[a*q+b]``, ``mul[a*q+b]``, ``neg[a]``,
``inv[a]``.
"""

BACKEND = "pure"


def poly_trim(c):
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    del c[n:]
    return c


def poly_add(a, b, q, add):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i in range(len(b)):
        out[i] = add[out[i] * q + b[i]]
    return poly_trim(out)


def poly_neg(a, q, neg):
    return [neg[c] for c in a]


def poly_sub(a, b, q, add, neg):
    out = list(a)
    if len(out) < len(b):
        out.extend([0] * (len(b) - len(out)))
    for i in range(len(b)):
        out[i] = add[out[i] * q + neg[b[i]]]
    return poly_trim(out)


def poly_mul(a, b, q, add, mul):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        base = ai * q
        for j, bj in enumerate(b):
            if bj:
                k = i + j
                out[k] = add[out[k] * q + mul[base + bj]]
    return poly_trim(out)


def poly_divmod(a, b, q, add, mul, neg, inv):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    db = len(b) - 1
    lead_inv = inv[b[db]]
    if len(rem) - 1 < db:
        return [], poly_trim(rem)
    quot = [0] * (len(rem) - db)
    for i in range(len(rem) - 1, db - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        f = mul[c * q + lead_inv]
        quot[i - db] = f
        base = neg[f] * q
        for j in range(db + 1):
            if b[j]:
                k = i - db + j
                rem[k] = add[rem[k] * q + mul[base + b[j]]]
    return poly_trim(quot), poly_trim(rem)


def mat_nullspace(flat, nrows, ncols, q, add, mul, neg, inv):
    """Right nullspace basis of an nrows x ncols matrix over F_q.

    Returns one canonical basis vector per free column (ascending), each a
    list of length ncols.  Deterministic Gauss-Jordan, pivots scanned left
    to right, first nonzero row below the current one wins.
    """
    m = list(flat)
    pivots = []  # (row, col)
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        sel = -1
        for r in range(row, nrows):
            if m[r * ncols + col]:
                sel = r
                break
        if sel < 0:
            continue
        if sel != row:
            rs, ss = row * ncols, sel * ncols
            for j in range(ncols):
                m[rs + j], m[ss + j] = m[ss + j], m[rs + j]
        base = row * ncols
        f = inv[m[base + col]]
        if f != 1:
            for j in range(col, ncols):
                m[base + j] = mul[m[base + j] * q + f]
        for r in range(nrows):
            if r == row:
                continue
            c = m[r * ncols + col]
            if c == 0:
                continue
            cb = neg[c] * q
            rb = r * ncols
            for j in range(col, ncols):
                v = m[base + j]
                if v:
                    m[rb + j] = add[m[rb + j] * q + mul[cb + v]]
        pivots.append((row, col))
        row += 1
    pivot_cols = {c: r for r, c in pivots}
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        vec = [0] * ncols
        vec[free] = 1
        for col, r in pivot_cols.items():
            vec[col] = neg[m[r * ncols + free]]
        basis.append(vec)
    return basis


def _row_deg_pivot(row):
    # degree of each entry is len-1; pivot = rightmost column attaining the
    # row degree; returns (rowdeg, pivot_col), (-1, -1) for a zero row
    rd = -1
    piv = -1
    for j, e in enumerate(row):
        d = len(e) - 1
        if d > rd:
            rd = d
            piv = j
        elif d == rd and d >= 0:
            piv = j
    return rd, piv


def weak_popov(rows, q, add, mul, neg, inv):
    """Row reduction to weak Popov form (distinct pivot columns).

    ``rows`` is a k x n matrix of coefficient lists.  Returns
    ``(rows, rowdegs, ubounds, ok)`` where ``ubounds[i]`` upper-bounds the
    degree of the transformation row expressing output row i in the input
    rows, and ``ok`` is False when a zero row appears (rank deficiency).
    """
    k = len(rows)
    work = [[list(e) for e in r] for r in rows]
    ubound = [0] * k
    state = [_row_deg_pivot(r) for r in work]
    while True:
        for rd, piv in state:
            if rd < 0:
                degs = [s[0] for s in state]
                return work, degs, ubound, False
        seen = {}
        clash = None
        for i in range(k):
            piv = state[i][1]
            if piv in seen:
                clash = (seen[piv], i)
                break
            seen[piv] = i
        if clash is None:
            degs = [s[0] for s in state]
            return work, degs, ubound, True
        a, b = clash
        # reduce the row of larger degree; on a tie reduce the earlier row
        if state[a][0] > state[b][0]:
            red, by = a, b
        elif state[b][0] > state[a][0]:
            red, by = b, a
        else:
            red, by = a, b
        rd_red, piv = state[red]
        rd_by = state[by][0]
        shift = rd_red - rd_by
        c = mul[work[red][piv][rd_red] * q + inv[work[by][piv][rd_by]]]
        cb = neg[c] * q
        for j in range(len(work[red])):
            src = work[by][j]
            if not src:
                continue
            dst = work[red][j]
            need = shift + len(src)
            if len(dst) < need:
                dst.extend([0] * (need - len(dst)))
            for t, s in enumerate(src):
                if s:
                    u = shift + t
                    dst[u] = add[dst[u] * q + mul[cb + s]]
            poly_trim(dst)
        ubound[red] = max(ubound[red], shift + ubound[by])
        state[red] = _row_deg_pivot(work[red])
