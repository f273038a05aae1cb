"""Lattices over F_q[T], the diagonal flow, and exact shortest vectors.

Lattices are row spans over the polynomial ring: a basis is a k x k
Laurent matrix whose rows generate the lattice.  ``tau`` embeds a system
of linear forms as the unimodular basis of {(Yq - p, q)}, and ``apply_flow``
scales coordinate l by T^t_l (first m) or T^-t_l (last n).

Shortest vectors are computed by truncating the basis at T^-N (guard N),
scaling by T^N into a polynomial matrix, and reducing to weak Popov form;
for a weak Popov matrix the degree of any polynomial combination of the
rows is max(deg a_i + rowdeg_i), so the sorted row degrees are the
successive minima of the scaled lattice.  The truncation error E has sup
norm at most e**-(N+1), and two certificates keep results exact:

* value certificate: if the reduction's transformation rows satisfy
  deg U_i <= rowdeg_i for all i, the perturbed basis rows U_i(B~+E) have
  the same norm profile as the truncated ones, so lambda_1 is exact
  (tracked as a degree upper bound; a spurious failure only costs a
  GuardTooSmall retry, never an incorrect value);
* membership decision: with A an upper bound on the adjugate entry norms
  minus the determinant log-norm, any c with |cB| <= e^(b-1) has
  deg c <= b - 1 + A, so once N >= A + 2 the truncated verdict of
  "lambda_1 < e^b" matches the true lattice in both directions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from . import _kernels as K
from .algebra import BOTTOM, FieldDescriptor, LogNorm, Poly, _same_field
from .dirichlet import Epsilon, LinearFormsY, WeightVector
from .errors import (BudgetExceeded, DomainError, GuardTooSmall,
                     PrecisionExhausted, SingularMatrix)
from .laurent import Laurent

_NEG_INF = float("-inf")

#: Extra guard places beyond the largest flow exponent.
GUARD_MARGIN = 8


@dataclass(frozen=True)
class LatticeBasis:
    """k x k Laurent matrix; rows are a module basis of the lattice."""

    field: FieldDescriptor
    k: int
    rows: tuple  # k tuples of k Laurent entries
    det_log: Optional[int] = None  # known determinant log-norm, if any

    def __post_init__(self):
        if len(self.rows) != self.k or any(len(r) != self.k for r in self.rows):
            raise DomainError("basis matrix must be k x k")
        for row in self.rows:
            for x in row:
                _same_field(self.field, x.field)

    @property
    def min_prec(self):
        precs = [x.prec for row in self.rows for x in row]
        finite = [p for p in precs if p is not None]
        return min(finite) if finite else None

    def row_sup_log(self, i: int):
        return max(x.upper_log for x in self.rows[i])

    def __str__(self):
        return ";".join(",".join(str(x) for x in row) for row in self.rows)


def identity_basis(field: FieldDescriptor, k: int) -> LatticeBasis:
    one = Laurent.from_poly(Poly.one(field))
    zero = Laurent.zero(field)
    rows = tuple(tuple(one if i == j else zero for j in range(k)) for i in range(k))
    return LatticeBasis(field, k, rows, det_log=0)


def parse_basis(field: FieldDescriptor, text: str) -> LatticeBasis:
    from .laurent import parse_laurent
    rows = [tuple(parse_laurent(field, c) for c in r.split(","))
            for r in text.split(";") if r.strip()]
    k = len(rows)
    return LatticeBasis(field, k, tuple(rows))


def tau(Y: LinearFormsY) -> LatticeBasis:
    """Basis of {(Yq - p, q) : p, q polynomial vectors}.

    Row i < m is the i-th unit vector; row m+j carries the j-th column of
    Y in the first m coordinates and the unit vector e_j in the last n.
    """
    field, m, n = Y.field, Y.m, Y.n
    k = m + n
    one = Laurent.from_poly(Poly.one(field))
    zero = Laurent.zero(field)
    rows = []
    for i in range(m):
        rows.append(tuple(one if l == i else zero for l in range(k)))
    for j in range(n):
        row = [Y.entries[i][j] for i in range(m)]
        row += [one if l == j else zero for l in range(n)]
        rows.append(tuple(row))
    return LatticeBasis(field, k, tuple(rows), det_log=0)


def flow_matrix(field: FieldDescriptor, t: WeightVector) -> LatticeBasis:
    """Diagonal basis diag(T^t_1..T^t_m, T^-t_{m+1}..T^-t_k)."""
    k = t.m + t.n
    zero = Laurent.zero(field)
    rows = []
    for l in range(k):
        e = t.t[l] if l < t.m else -t.t[l]
        entry = Laurent.from_poly(Poly.one(field)).times_T(e)
        rows.append(tuple(entry if j == l else zero for j in range(k)))
    return LatticeBasis(field, k, tuple(rows), det_log=0)


def apply_flow(B: LatticeBasis, t: WeightVector) -> LatticeBasis:
    """Scale column l of the basis by T^t_l (l < m) or T^-t_l (l >= m)."""
    if t.m + t.n != B.k:
        raise DomainError("weight vector does not match the dimension")
    exps = [t.t[l] if l < t.m else -t.t[l] for l in range(B.k)]
    rows = tuple(tuple(x.times_T(exps[j]) for j, x in enumerate(row))
                 for row in B.rows)
    det = None if B.det_log is None else B.det_log + sum(exps)
    return LatticeBasis(B.field, B.k, rows, det_log=det)


# ---------------------------------------------------------------------------
# scaled polynomial matrices and weak Popov reduction

@dataclass(frozen=True)
class PolyMatrix:
    """T^shift-scaled truncation of a Laurent basis; ``exact`` means no
    certified or potential coefficient was dropped (E = 0)."""

    field: FieldDescriptor
    k: int
    rows: tuple  # tuples of Poly
    shift: int
    exact: bool = True

    def row_degs(self) -> tuple:
        out = []
        for row in self.rows:
            degs = [p.degree for p in row if p.degree is not None]
            out.append(max(degs) if degs else None)
        return tuple(out)

    def __str__(self):
        return ";".join(",".join(str(p) for p in row) for row in self.rows)


def scale_to_poly(B: LatticeBasis, N: int) -> PolyMatrix:
    """Entries become T^N * (entry truncated below T^-N)."""
    exact = True
    rows = []
    for row in B.rows:
        out = []
        for x in row:
            if x.known_floor > -N:
                raise PrecisionExhausted(
                    f"entry certified only to prec {x.prec}, guard {N} too deep")
            if not x.is_exact:
                exact = False
            if x.top is None:
                out.append(Poly.zero(B.field))
                continue
            if x.low < -N:
                exact = False
            asc = [x.coeff(e) for e in range(-N, x.top + 1)]
            out.append(Poly(B.field, asc))
        rows.append(tuple(out))
    return PolyMatrix(B.field, B.k, tuple(rows), N, exact)


def _kernel_rows(M: PolyMatrix):
    return [[list(p.coeffs) for p in row] for row in M.rows]


def _reduce_full(M: PolyMatrix):
    t = M.field.tables()
    rows, degs, ubounds, ok = K.weak_popov(
        _kernel_rows(M), t.q, t.add, t.mul, t.neg, t.inv)
    if not ok:
        raise SingularMatrix("rows are dependent over the fraction field")
    out = tuple(tuple(Poly(M.field, e) for e in row) for row in rows)
    return PolyMatrix(M.field, M.k, out, M.shift, M.exact), tuple(degs), tuple(ubounds)


def weak_popov(M: PolyMatrix):
    """Reduce to weak Popov form; returns (reduced matrix, row degrees)."""
    reduced, degs, _ = _reduce_full(M)
    return reduced, degs


# ---------------------------------------------------------------------------
# shortest vectors

def _default_guard(B: LatticeBasis) -> int:
    sup = max((x.upper_log for row in B.rows for x in row), default=0)
    sup = 0 if sup == _NEG_INF else int(sup)
    return max(sup, 0) + GUARD_MARGIN


def _available_guard(B: LatticeBasis) -> Optional[int]:
    p = B.min_prec
    return None if p is None else p


def lambda1_log(B: LatticeBasis, guard: Optional[int] = None) -> LogNorm:
    """Exact log-norm of a shortest nonzero lattice vector."""
    if guard is None:
        guard = _default_guard(B)
        avail = _available_guard(B)
        if avail is not None:
            guard = min(guard, avail)
    P = scale_to_poly(B, guard)
    _, degs, ubounds = _reduce_full(P)
    lam = min(degs) - guard
    if not P.exact and any(u > d for u, d in zip(ubounds, degs)):
        raise GuardTooSmall(
            f"guard {guard} cannot certify the value (transform bound exceeded)")
    return LogNorm(lam)


def _adjugate_gap(B: LatticeBasis) -> int:
    """Upper bound for max adjugate entry log-norm minus det log-norm."""
    if B.det_log is None:
        det = det_laurent(B)
        det_log = int(det.lognorm())
    else:
        det_log = B.det_log
    sups = []
    for i in range(B.k):
        s = B.row_sup_log(i)
        if s == _NEG_INF:
            raise SingularMatrix("zero row")
        sups.append(int(s))
    return sum(sups) - min(sups) - det_log


def lambda1_lt(B: LatticeBasis, bound: int, guard: Optional[int] = None) -> bool:
    """Certified decision of lambda_1 < e**bound."""
    needed = max(_adjugate_gap(B) + 2, 0)
    if guard is not None:
        needed = max(needed, guard)
    avail = _available_guard(B)
    if avail is not None and needed > avail:
        raise PrecisionExhausted(
            f"membership decision needs guard {needed}, precision allows {avail}")
    P = scale_to_poly(B, needed)
    _, degs, _ = _reduce_full(P)
    return min(degs) - needed <= bound - 1


def in_K_eps(B: LatticeBasis, eps: Epsilon, guard: Optional[int] = None) -> bool:
    """True when every nonzero lattice vector has norm >= eps."""
    return not lambda1_lt(B, -eps.s, guard=guard)


def flow_trace(Y: LinearFormsY, ts: Sequence[WeightVector], eps: Epsilon,
               guard: Optional[int] = None) -> list:
    """Per-weight record of (t, lambda_1 log, in K_eps) along the flow."""
    base = tau(Y)
    out = []
    for t in ts:
        Bt = apply_flow(base, t)
        g = guard
        while True:
            try:
                lam = lambda1_log(Bt, guard=g)
                break
            except GuardTooSmall:
                g = (g if g is not None else _default_guard(Bt)) * 2
                avail = _available_guard(Bt)
                if avail is not None and g > avail:
                    raise
        out.append((t, lam, int(lam) >= -eps.s))
    return out


# ---------------------------------------------------------------------------
# determinants and the independent shortest-vector oracle

def det_poly(rows: Sequence[Sequence[Poly]], field: FieldDescriptor) -> Poly:
    k = len(rows)
    if k == 0:
        return Poly.one(field)
    if k == 1:
        return rows[0][0]
    acc = Poly.zero(field)
    for j in range(k):
        if rows[0][j].is_zero:
            continue
        minor = [[rows[i][c] for c in range(k) if c != j] for i in range(1, k)]
        term = rows[0][j] * det_poly(minor, field)
        acc = acc + (term if j % 2 == 0 else -term)
    return acc


def det_laurent(B: LatticeBasis) -> Laurent:
    def rec(rows):
        k = len(rows)
        if k == 1:
            return rows[0][0]
        acc = Laurent.zero(B.field)
        for j in range(k):
            minor = [[rows[i][c] for c in range(k) if c != j]
                     for i in range(1, k)]
            term = rows[0][j] * rec(minor)
            acc = acc + (term if j % 2 == 0 else -term)
        return acc
    return rec([list(r) for r in B.rows])


def lambda1_oracle(rows: Sequence[Sequence[Poly]], field: FieldDescriptor,
                   coeff_deg_bound: Optional[int] = None) -> int:
    """Shortest-vector exponent by degree-level solvability.

    Independent of the reduction path: asks, level by level, whether some
    nonzero coefficient vector c (deg c_l <= D) kills every coordinate
    coefficient above T^level.  D comes from Cramer's rule: a vector of
    norm e**level has deg c <= level + sum(rowdegs) - min(rowdegs) -
    deg det, so the sum of row degrees always suffices at the minimum.
    """
    k = len(rows)
    det = det_poly(rows, field)
    if det.is_zero:
        raise SingularMatrix("oracle requires a nonsingular matrix")
    detdeg = det.degree
    rowdegs = []
    for row in rows:
        ds = [p.degree for p in row if p.degree is not None]
        rowdegs.append(max(ds) if ds else -1)
    slack = sum(rowdegs) - min(rowdegs) - detdeg

    def solvable(level: int) -> bool:
        D = coeff_deg_bound
        if D is None:
            D = max(0, level + slack)
        nvars = k * (D + 1)
        t = field.tables()
        mat = []
        for j in range(k):
            col_deg = max((rows[l][j].degree if rows[l][j].degree is not None
                           else -1) for l in range(k))
            for m in range(level + 1, D + col_deg + 1):
                crow = [0] * nvars
                nonzero = False
                for l in range(k):
                    pc = rows[l][j].coeffs
                    for d in range(D + 1):
                        idx = m - d
                        if 0 <= idx < len(pc) and pc[idx]:
                            crow[l * (D + 1) + d] = pc[idx]
                            nonzero = True
                if nonzero:
                    mat.append(crow)
        if not mat:
            return True
        flat = [x for r in mat for x in r]
        basis = K.mat_nullspace(flat, len(mat), nvars, t.q,
                                t.add, t.mul, t.neg, t.inv)
        return bool(basis)

    level = min(rowdegs)
    while level > detdeg - sum(rowdegs) - 1 and solvable(level - 1):
        level -= 1
    return level


def lambda1_enumerate(rows: Sequence[Sequence[Poly]], field: FieldDescriptor,
                      coeff_deg_bound: int,
                      budget: Optional[int] = None) -> int:
    """Plain odometer enumeration of coefficient vectors (small cases)."""
    k = len(rows)
    q = field.q
    total = q ** (k * (coeff_deg_bound + 1))
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} candidates exceed budget {budget}")
    best = None
    polys = [Poly(field, c)
             for c in itertools.product(range(q), repeat=coeff_deg_bound + 1)]
    for combo in itertools.product(polys, repeat=k):
        if all(p.is_zero for p in combo):
            continue
        sup = None
        for j in range(k):
            acc = Poly.zero(field)
            for l in range(k):
                if not (combo[l].is_zero or rows[l][j].is_zero):
                    acc = acc + combo[l] * rows[l][j]
            d = acc.degree
            if d is not None and (sup is None or d > sup):
                sup = d
        if sup is None:
            raise SingularMatrix("dependent rows found during enumeration")
        if best is None or sup < best:
            best = sup
    return best
