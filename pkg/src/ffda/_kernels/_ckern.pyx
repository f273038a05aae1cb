# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled arithmetic kernels.

Same algorithms, pivoting and tie-breaking as ``_pykern.py``; the two
backends produce bit-identical results.
"""

from cpython.mem cimport PyMem_Malloc, PyMem_Free

BACKEND = "c"


def poly_trim(c):
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    del c[n:]
    return c


cdef int* _buf_from_list(object lst, Py_ssize_t n) except NULL:
    cdef int* buf = <int*> PyMem_Malloc(n * sizeof(int)) if n else <int*> PyMem_Malloc(sizeof(int))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = lst[i]
    return buf


cdef object _list_from_buf(int* buf, Py_ssize_t n):
    cdef Py_ssize_t m = n
    while m and buf[m - 1] == 0:
        m -= 1
    cdef list out = [0] * m
    cdef Py_ssize_t i
    for i in range(m):
        out[i] = buf[i]
    return out


def poly_add(a, b, int q, add):
    cdef int[::1] addv = add
    if len(a) < len(b):
        a, b = b, a
    cdef Py_ssize_t na = len(a), nb = len(b), i
    cdef int* buf = _buf_from_list(a, na)
    try:
        for i in range(nb):
            buf[i] = addv[buf[i] * q + <int> b[i]]
        return _list_from_buf(buf, na)
    finally:
        PyMem_Free(buf)


def poly_neg(a, int q, neg):
    cdef int[::1] negv = neg
    cdef Py_ssize_t i, n = len(a)
    cdef list out = [0] * n
    for i in range(n):
        out[i] = negv[<int> a[i]]
    return out


def poly_sub(a, b, int q, add, neg):
    cdef int[::1] addv = add
    cdef int[::1] negv = neg
    cdef Py_ssize_t na = len(a), nb = len(b), n = na if na > nb else nb, i
    cdef int* buf = <int*> PyMem_Malloc((n if n else 1) * sizeof(int))
    if buf == NULL:
        raise MemoryError()
    try:
        for i in range(na):
            buf[i] = a[i]
        for i in range(na, n):
            buf[i] = 0
        for i in range(nb):
            buf[i] = addv[buf[i] * q + negv[<int> b[i]]]
        return _list_from_buf(buf, n)
    finally:
        PyMem_Free(buf)


def poly_mul(a, b, int q, add, mul):
    if not a or not b:
        return []
    cdef int[::1] addv = add
    cdef int[::1] mulv = mul
    cdef Py_ssize_t na = len(a), nb = len(b), i, j, k
    cdef Py_ssize_t n = na + nb - 1
    cdef int* pa = _buf_from_list(a, na)
    cdef int* pb
    cdef int* po
    cdef int ai, bj, base
    try:
        pb = _buf_from_list(b, nb)
    except BaseException:
        PyMem_Free(pa)
        raise
    po = <int*> PyMem_Malloc(n * sizeof(int))
    if po == NULL:
        PyMem_Free(pa)
        PyMem_Free(pb)
        raise MemoryError()
    try:
        for k in range(n):
            po[k] = 0
        for i in range(na):
            ai = pa[i]
            if ai == 0:
                continue
            base = ai * q
            for j in range(nb):
                bj = pb[j]
                if bj:
                    k = i + j
                    po[k] = addv[po[k] * q + mulv[base + bj]]
        return _list_from_buf(po, n)
    finally:
        PyMem_Free(pa)
        PyMem_Free(pb)
        PyMem_Free(po)


def poly_divmod(a, b, int q, add, mul, neg, inv):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    cdef int[::1] addv = add
    cdef int[::1] mulv = mul
    cdef int[::1] negv = neg
    cdef int[::1] invv = inv
    cdef Py_ssize_t na = len(a), nb = len(b), db = nb - 1, i, j, k
    cdef list quot_out, rem_out
    if na - 1 < db:
        return [], poly_trim(list(a))
    cdef int* rem = _buf_from_list(a, na)
    cdef int* pb
    cdef int* quot
    cdef int lead_inv, c, f, base
    try:
        pb = _buf_from_list(b, nb)
    except BaseException:
        PyMem_Free(rem)
        raise
    quot = <int*> PyMem_Malloc((na - db) * sizeof(int))
    if quot == NULL:
        PyMem_Free(rem)
        PyMem_Free(pb)
        raise MemoryError()
    try:
        for k in range(na - db):
            quot[k] = 0
        lead_inv = invv[pb[db]]
        for i in range(na - 1, db - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            f = mulv[c * q + lead_inv]
            quot[i - db] = f
            base = negv[f] * q
            for j in range(db + 1):
                if pb[j]:
                    k = i - db + j
                    rem[k] = addv[rem[k] * q + mulv[base + pb[j]]]
        quot_out = _list_from_buf(quot, na - db)
        rem_out = _list_from_buf(rem, na)
        return quot_out, rem_out
    finally:
        PyMem_Free(rem)
        PyMem_Free(pb)
        PyMem_Free(quot)


def mat_nullspace(flat, Py_ssize_t nrows, Py_ssize_t ncols, int q,
                  add, mul, neg, inv):
    cdef int[::1] addv = add
    cdef int[::1] mulv = mul
    cdef int[::1] negv = neg
    cdef int[::1] invv = inv
    cdef Py_ssize_t n = nrows * ncols
    cdef int* m = _buf_from_list(flat, n)
    cdef Py_ssize_t row, col, r, j, sel, base, rb, rs, ss
    cdef int f, c, v, tmp
    cdef list pivot_rows = []
    cdef list pivot_cols = []
    try:
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
                rs = row * ncols
                ss = sel * ncols
                for j in range(ncols):
                    tmp = m[rs + j]
                    m[rs + j] = m[ss + j]
                    m[ss + j] = tmp
            base = row * ncols
            f = invv[m[base + col]]
            if f != 1:
                for j in range(col, ncols):
                    m[base + j] = mulv[m[base + j] * q + f]
            for r in range(nrows):
                if r == row:
                    continue
                c = m[r * ncols + col]
                if c == 0:
                    continue
                rb = r * ncols
                c = negv[c] * q
                for j in range(col, ncols):
                    v = m[base + j]
                    if v:
                        m[rb + j] = addv[m[rb + j] * q + mulv[c + v]]
            pivot_rows.append(row)
            pivot_cols.append(col)
            row += 1
        basis = []
        pivset = set(pivot_cols)
        for free in range(ncols):
            if free in pivset:
                continue
            vec = [0] * ncols
            vec[free] = 1
            for j in range(len(pivot_cols)):
                vec[pivot_cols[j]] = negv[m[<Py_ssize_t> pivot_rows[j] * ncols + free]]
            basis.append(vec)
        return basis
    finally:
        PyMem_Free(m)


def weak_popov(rows, int q, add, mul, neg, inv):
    cdef int[::1] addv = add
    cdef int[::1] mulv = mul
    cdef int[::1] negv = neg
    cdef int[::1] invv = inv
    cdef Py_ssize_t k = len(rows)
    cdef Py_ssize_t n = len(rows[0]) if k else 0
    cdef Py_ssize_t i, j, t, u
    cdef int cap = 0, d
    for i in range(k):
        for j in range(n):
            d = <int> len(rows[i][j]) - 1
            if d > cap:
                cap = d
    cdef Py_ssize_t stride = cap + 1
    cdef int* w = <int*> PyMem_Malloc((k * n * stride if k * n else 1) * sizeof(int))
    cdef int* edeg = <int*> PyMem_Malloc((k * n if k * n else 1) * sizeof(int))
    cdef int* rowdeg = <int*> PyMem_Malloc((k if k else 1) * sizeof(int))
    cdef int* pivot = <int*> PyMem_Malloc((k if k else 1) * sizeof(int))
    cdef int* ubound = <int*> PyMem_Malloc((k if k else 1) * sizeof(int))
    cdef int* seen = <int*> PyMem_Malloc((n if n else 1) * sizeof(int))
    if w == NULL or edeg == NULL or rowdeg == NULL or pivot == NULL \
            or ubound == NULL or seen == NULL:
        PyMem_Free(w); PyMem_Free(edeg); PyMem_Free(rowdeg)
        PyMem_Free(pivot); PyMem_Free(ubound); PyMem_Free(seen)
        raise MemoryError()
    cdef Py_ssize_t eb, sb, db
    cdef int rd, piv, a, b, red, by, shift, c, cb, s, sd, nd
    cdef bint ok = True, clash
    try:
        for i in range(k):
            for j in range(n):
                eb = (i * n + j) * stride
                entry = rows[i][j]
                d = <int> len(entry) - 1
                edeg[i * n + j] = d
                for t in range(d + 1):
                    w[eb + t] = entry[t]
                for t in range(d + 1, stride):
                    w[eb + t] = 0
            ubound[i] = 0
        for i in range(k):
            rd = -1
            piv = -1
            for j in range(n):
                d = edeg[i * n + j]
                if d > rd:
                    rd = d
                    piv = <int> j
                elif d == rd and d >= 0:
                    piv = <int> j
            rowdeg[i] = rd
            pivot[i] = piv
        while True:
            for i in range(k):
                if rowdeg[i] < 0:
                    ok = False
                    break
            if not ok:
                break
            for j in range(n):
                seen[j] = -1
            clash = False
            for i in range(k):
                piv = pivot[i]
                if seen[piv] >= 0:
                    a = seen[piv]
                    b = <int> i
                    clash = True
                    break
                seen[piv] = <int> i
            if not clash:
                break
            if rowdeg[a] > rowdeg[b]:
                red = a; by = b
            elif rowdeg[b] > rowdeg[a]:
                red = b; by = a
            else:
                red = a; by = b
            piv = pivot[red]
            shift = rowdeg[red] - rowdeg[by]
            c = mulv[w[(red * n + piv) * stride + rowdeg[red]] * q
                     + invv[w[(by * n + piv) * stride + rowdeg[by]]]]
            cb = negv[c] * q
            for j in range(n):
                sd = edeg[by * n + j]
                if sd < 0:
                    continue
                eb = (red * n + j) * stride
                sb = (by * n + j) * stride
                for t in range(sd + 1):
                    s = w[sb + t]
                    if s:
                        u = eb + shift + t
                        w[u] = addv[w[u] * q + mulv[cb + s]]
                nd = edeg[red * n + j]
                if shift + sd > nd:
                    nd = shift + sd
                while nd >= 0 and w[eb + nd] == 0:
                    nd -= 1
                edeg[red * n + j] = nd
            if shift + ubound[by] > ubound[red]:
                ubound[red] = shift + ubound[by]
            rd = -1
            piv = -1
            for j in range(n):
                d = edeg[red * n + j]
                if d > rd:
                    rd = d
                    piv = <int> j
                elif d == rd and d >= 0:
                    piv = <int> j
            rowdeg[red] = rd
            pivot[red] = piv
        out_rows = []
        for i in range(k):
            row_out = []
            for j in range(n):
                eb = (i * n + j) * stride
                d = edeg[i * n + j]
                row_out.append([w[eb + t] for t in range(d + 1)])
            out_rows.append(row_out)
        degs = [rowdeg[i] for i in range(k)]
        ubounds = [ubound[i] for i in range(k)]
        return out_rows, degs, ubounds, ok
    finally:
        PyMem_Free(w); PyMem_Free(edeg); PyMem_Free(rowdeg)
        PyMem_Free(pivot); PyMem_Free(ubound); PyMem_Free(seen)
