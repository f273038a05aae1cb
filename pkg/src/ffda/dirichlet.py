"""Constructive Dirichlet solver and the improvability checker.

A system of m linear forms in n variables is an m x n Laurent matrix Y.
For a balanced weight vector t the non-strict system asks for polynomial
vectors (p, q), q != 0, with

    |Y_i q - p_i| <  e**-t_i          (i = 1..m)
    |q_j|         <= e**t_{m+j}       (j = 1..n),

and the eps-improved system shrinks both sides by eps = e**-s with strict
inequalities throughout.  The solver reduces Y to fractional parts, stacks
one Hankel coefficient block per entry (t_i rows, t_{m+j}+1 columns), and
reads a solution off a nullspace vector; the block matrix has sum(t_i)
rows and sum(t_i) + n columns, so a nontrivial nullspace always exists.

The improvability checker brute-forces the strict system: the degree
bounds leave finitely many candidate q, and p_i is forced to be the
polynomial part of Y_i q since the residual must have norm below 1.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .algebra import FieldDescriptor, Poly, _same_field
from .errors import BudgetExceeded, DomainError, PrecisionExhausted
from .laurent import DEFAULT_PREC, Laurent

_NEG_INF = float("-inf")


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class WeightVector:
    """Balanced nonnegative integer weights: sum of the first m equals the
    sum of the last n; the norm is the max coordinate."""

    m: int
    n: int
    t: tuple

    def __post_init__(self):
        if len(self.t) != self.m + self.n:
            raise DomainError("weight vector has wrong length")
        if any(x < 0 for x in self.t):
            raise DomainError("weights must be nonnegative")
        if sum(self.t[:self.m]) != sum(self.t[self.m:]):
            raise DomainError("weights are not balanced")

    @property
    def norm(self) -> int:
        return max(self.t) if self.t else 0

    @property
    def left(self) -> tuple:
        return self.t[:self.m]

    @property
    def right(self) -> tuple:
        return self.t[self.m:]

    def __str__(self):
        return ",".join(str(x) for x in self.t)


def weight_vectors(m: int, n: int, norm_bound: int) -> Iterator[WeightVector]:
    """All balanced weight vectors with max coordinate <= norm_bound,
    in lexicographic order, no duplicates."""
    if norm_bound < 0:
        raise DomainError("norm bound must be >= 0")
    for t in itertools.product(range(norm_bound + 1), repeat=m + n):
        if sum(t[:m]) == sum(t[m:]):
            yield WeightVector(m, n, t)


@dataclass(frozen=True)
class Epsilon:
    """eps = e**-s on the value group; s >= 1 keeps eps <= 1/e."""

    s: int

    def __post_init__(self):
        if self.s < 1:
            raise DomainError("eps must be at most 1/e (s >= 1)")

    def __str__(self):
        return f"e^-{self.s}"

    @classmethod
    def parse(cls, text: str) -> "Epsilon":
        text = text.strip()
        if not text.startswith("e^"):
            raise DomainError("eps must be written e^-s")
        return cls(-int(text[2:]))


@dataclass(frozen=True)
class LinearFormsY:
    """m x n matrix of Laurent entries over a common field."""

    field: FieldDescriptor
    m: int
    n: int
    entries: tuple  # tuple of m tuples of n Laurent values

    def __post_init__(self):
        if len(self.entries) != self.m or any(len(r) != self.n for r in self.entries):
            raise DomainError("entry matrix has wrong shape")
        for row in self.entries:
            for y in row:
                _same_field(self.field, y.field)

    @property
    def reduced(self) -> bool:
        """True when every entry has absolute value < 1."""
        return all(y.upper_log < 0 for row in self.entries for y in row)

    @property
    def min_prec(self):
        precs = [y.prec for row in self.entries for y in row]
        finite = [p for p in precs if p is not None]
        return min(finite) if finite else None

    def row_dot(self, i: int, q: Sequence[Poly]) -> Laurent:
        acc = Laurent.zero(self.field)
        for j, qj in enumerate(q):
            if not qj.is_zero:
                acc = acc + self.entries[i][j].mul_poly(qj)
        return acc

    def __str__(self):
        return ";".join(",".join(str(y) for y in row) for row in self.entries)


def parse_forms(field: FieldDescriptor, text: str, m: int, n: int) -> LinearFormsY:
    from .laurent import parse_laurent
    rows = [r for r in text.split(";") if r.strip()]
    if len(rows) != m:
        raise DomainError(f"expected {m} rows, got {len(rows)}")
    entries = []
    for r in rows:
        cells = r.split(",")
        if len(cells) != n:
            raise DomainError(f"expected {n} entries per row")
        entries.append(tuple(parse_laurent(field, c) for c in cells))
    return LinearFormsY(field, m, n, tuple(entries))


def random_forms(field: FieldDescriptor, m: int, n: int, prec: int,
                 seed, with_poly_part: bool = True) -> LinearFormsY:
    """Deterministic random forms; raising ``prec`` extends the same tails.

    Per entry, the polynomial part (if any) and then the tail coefficients
    at T^-1, T^-2, ... are drawn in a fixed order from an entry-local
    generator, so a higher precision reproduces every earlier coefficient.
    """
    q = field.q
    entries = []
    for i in range(m):
        row = []
        for j in range(n):
            rng = random.Random(f"{seed}:{m}x{n}:{i},{j}")
            terms = {}
            if with_poly_part and rng.randrange(4) == 0:
                d = rng.randrange(3)
                for k in range(d + 1):
                    c = rng.randrange(q)
                    if c:
                        terms[k] = c
            for e in range(1, prec + 1):
                c = rng.randrange(q)
                if c:
                    terms[-e] = c
            row.append(Laurent.from_terms(field, terms, prec))
        entries.append(tuple(row))
    return LinearFormsY(field, m, n, tuple(entries))


@dataclass(frozen=True)
class DirichletSolution:
    p: tuple  # m polynomials
    q: tuple  # n polynomials

    @property
    def q_nonzero(self) -> bool:
        return any(not x.is_zero for x in self.q)

    def __str__(self):
        ps = ",".join(str(x) for x in self.p)
        qs = ",".join(str(x) for x in self.q)
        return f"p=({ps}) q=({qs})"


# ---------------------------------------------------------------------------
# reduction and the Hankel system

def reduce_forms(Y: LinearFormsY):
    """Replace each entry by its fractional part.

    Returns (Y', shifts) where shifts[i][j] is the polynomial part removed
    from entry (i, j); a solution (p', q) of the reduced system lifts to
    the original one via p_i = p'_i + sum_j shifts[i][j] * q_j.
    """
    new_rows, shifts = [], []
    for row in Y.entries:
        nr, sr = [], []
        for y in row:
            pp, fp = y.polynomial_part(), y.fractional_part()
            nr.append(fp)
            sr.append(pp)
        new_rows.append(tuple(nr))
        shifts.append(tuple(sr))
    return LinearFormsY(Y.field, Y.m, Y.n, tuple(new_rows)), tuple(map(tuple, shifts))


def hankel_block(y: Laurent, rows: int, cols: int) -> list:
    """Hankel matrix of tail coefficients: entry (s, j) is the coefficient
    of T^-(s+j-1) in y, s = 1..rows, j = 1..cols."""
    if y.upper_log >= 0:
        raise DomainError("Hankel extraction requires |y| < 1")
    return [[y.coeff(-(s + j - 1)) for j in range(1, cols + 1)]
            for s in range(1, rows + 1)]


def nullspace_fq(M: Sequence[Sequence[int]], field: FieldDescriptor,
                 ncols: Optional[int] = None) -> list:
    """Basis of the right nullspace of a matrix over F_q."""
    from . import _kernels as K
    nrows = len(M)
    if ncols is None:
        if nrows == 0:
            raise DomainError("cannot infer width of an empty matrix")
        ncols = len(M[0])
    if nrows == 0:
        return [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
    flat = [x for row in M for x in row]
    t = field.tables()
    return K.mat_nullspace(flat, nrows, ncols, t.q, t.add, t.mul, t.neg, t.inv)


def dirichlet_solve(Y: LinearFormsY, t: WeightVector) -> DirichletSolution:
    """A nonzero solution of the non-strict system at weights t.

    Existence is unconditional; only insufficient precision can fail.
    """
    if (t.m, t.n) != (Y.m, Y.n):
        raise DomainError("weight vector shape does not match Y")
    Yr, shifts = reduce_forms(Y)
    col_blocks = [t.right[j] + 1 for j in range(Y.n)]
    rows = []
    for i in range(Y.m):
        if t.left[i] == 0:
            continue
        blocks = [hankel_block(Yr.entries[i][j], t.left[i], col_blocks[j])
                  for j in range(Y.n)]
        for s in range(t.left[i]):
            rows.append([x for b in blocks for x in b[s]])
    basis = nullspace_fq(rows, Y.field, ncols=sum(col_blocks))
    v = basis[0]
    qs, ofs = [], 0
    for j in range(Y.n):
        qs.append(Poly(Y.field, v[ofs:ofs + col_blocks[j]]))
        ofs += col_blocks[j]
    ps = []
    for i in range(Y.m):
        pi = Yr.row_dot(i, qs).polynomial_part()
        for j in range(Y.n):
            if not (shifts[i][j].is_zero or qs[j].is_zero):
                pi = pi + shifts[i][j] * qs[j]
        ps.append(pi)
    return DirichletSolution(tuple(ps), tuple(qs))


def verify_system(Y: LinearFormsY, t: WeightVector, sol: DirichletSolution,
                  eps: Optional[Epsilon] = None,
                  strict: Optional[bool] = None) -> bool:
    """Check the system at weights t.

    Without eps: residuals strictly below e**-t_i and |q_j| <= e**t_{m+j}.
    With eps = e**-s both families are strict and shrunk by eps, i.e.
    residual log-norms <= -t_i - s - 1 and deg q_j <= t_{m+j} - s - 1.
    """
    if strict is None:
        strict = eps is not None
    if strict != (eps is not None):
        raise DomainError("strict verification is exactly the eps-shrunk system")
    if not (any(not x.is_zero for x in sol.p) or sol.q_nonzero):
        return False
    s = eps.s if eps else 0
    for j in range(Y.n):
        d = sol.q[j].degree
        bound = t.right[j] - s - 1 if strict else t.right[j]
        if d is not None and d > bound:
            return False
    for i in range(Y.m):
        resid = Y.row_dot(i, sol.q) - Laurent.from_poly(sol.p[i])
        if not resid.abs_le(-t.left[i] - s - 1):
            return False
    return True


# ---------------------------------------------------------------------------
# the eps-improvability checker

def _candidate_qs(field: FieldDescriptor, nums: Sequence[int]) -> Iterator[tuple]:
    """All nonzero tuples of polynomials with nums[j] free coefficients."""
    spaces = [
        [Poly(field, c) for c in
         itertools.product(range(field.q), repeat=k)]
        for k in nums
    ]
    for combo in itertools.product(*spaces):
        if any(not p.is_zero for p in combo):
            yield combo


@dataclass(frozen=True)
class WindowVerdict:
    t: WeightVector
    solvable: bool
    witness: Optional[DirichletSolution]


def solve_strict(Y: LinearFormsY, eps: Epsilon, t: WeightVector,
                 budget: Optional[int] = None) -> WindowVerdict:
    """Decide the eps-shrunk strict system at one weight vector by
    exhausting the admissible q (p_i forced to the polynomial part)."""
    if (t.m, t.n) != (Y.m, Y.n):
        raise DomainError("weight vector shape does not match Y")
    nums = [max(0, t.right[j] - eps.s) for j in range(Y.n)]
    total = 1
    for k in nums:
        total *= Y.field.q ** k
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} strict candidates exceed budget {budget}")
    for qs in _candidate_qs(Y.field, nums):
        ok = True
        ps = []
        for i in range(Y.m):
            prod = Y.row_dot(i, qs)
            pi = prod.polynomial_part()
            resid = prod - Laurent.from_poly(pi)
            if not resid.abs_le(-t.left[i] - eps.s - 1):
                ok = False
                break
            ps.append(pi)
        if ok:
            return WindowVerdict(t, True, DirichletSolution(tuple(ps), tuple(qs)))
    return WindowVerdict(t, False, None)


def di_check_window(Y: LinearFormsY, eps: Epsilon,
                    window: Sequence[WeightVector],
                    budget: Optional[int] = None) -> list:
    """Per-weight verdicts over a finite window; the forms are
    eps-improvable on the window when every verdict is solvable."""
    return [solve_strict(Y, eps, t, budget=budget) for t in window]
