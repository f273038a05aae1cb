"""Wedge-product calculus for submodules of Lambda^(n+1).

The norm of a rank-j submodule is the sup norm of the wedge of any basis:
basis changes multiply the wedge by a unit determinant, so the norm is
well defined.  The primitive closure (saturation) is computed by
diagonalizing the basis matrix with tracked column operations over the
PID F_q[T]; if W collects the inverse column transforms, the row span of
the original matrix equals {sum a_i d_i W_i}, so the first j rows of W
are a basis of the saturation.

``act_flow_tau`` evaluates the closed coefficient formula for the flow
composed with the unipotent embedding acting on a wedge; the signs come
from explicit permutation parity and are cross-checked against the direct
matrix action in the test suite.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .algebra import BOTTOM, FieldDescriptor, LogNorm, Poly, _same_field
from .errors import DomainError
from .laurent import Laurent


@dataclass(frozen=True)
class SubmoduleBasis:
    """Basis of a rank-j submodule of Lambda^ambient (entries Poly), or of
    its image under a group element (entries Laurent)."""

    field: FieldDescriptor
    ambient: int
    vectors: tuple  # j tuples of ambient entries

    def __post_init__(self):
        for v in self.vectors:
            if len(v) != self.ambient:
                raise DomainError("vector has wrong length")

    @property
    def rank(self) -> int:
        return len(self.vectors)

    def __str__(self):
        return ";".join(",".join(str(x) for x in v) for v in self.vectors)


@dataclass(frozen=True)
class WedgeVector:
    """Coefficients w_I of a j-vector, indexed by sorted subsets I."""

    field: FieldDescriptor
    ambient: int
    grade: int
    coeffs: dict  # tuple(I) -> Poly | Laurent

    @property
    def is_zero(self) -> bool:
        return all(_entry_is_zero(c) for c in self.coeffs.values())

    def norm_log(self) -> LogNorm:
        best = BOTTOM
        for c in self.coeffs.values():
            ln = _entry_lognorm(c)
            if best < ln:
                best = ln
        return best

    def __str__(self):
        items = []
        for I in sorted(self.coeffs):
            c = self.coeffs[I]
            if not _entry_is_zero(c):
                items.append("{" + ",".join(map(str, I)) + "}:" + str(c))
        return "; ".join(items) if items else "0"


def _entry_is_zero(x) -> bool:
    if isinstance(x, Poly):
        return x.is_zero
    return x.top is None and x.prec is None


def _entry_lognorm(x) -> LogNorm:
    return x.lognorm()


def _det(rows, zero, field):
    k = len(rows)
    if k == 0:
        return Poly.one(field)
    if k == 1:
        return rows[0][0]
    acc = zero
    for j in range(k):
        minor = [[rows[i][c] for c in range(k) if c != j] for i in range(1, k)]
        term = rows[0][j] * _det(minor, zero, field)
        acc = acc + (term if j % 2 == 0 else -term)
    return acc


def wedge(vs: Sequence[Sequence], field: FieldDescriptor,
          ambient: Optional[int] = None) -> WedgeVector:
    """Multilinear alternating wedge; coefficients are the j x j minors."""
    j = len(vs)
    if ambient is None:
        ambient = len(vs[0])
    if not 1 <= j <= ambient:
        raise DomainError("grade must be between 1 and the ambient dimension")
    sample = vs[0][0]
    zero = Poly.zero(field) if isinstance(sample, Poly) else Laurent.zero(field)
    coeffs = {}
    for I in itertools.combinations(range(ambient), j):
        rows = [[v[i] for i in I] for v in vs]
        coeffs[I] = _det(rows, zero, field)
    return WedgeVector(field, ambient, j, coeffs)


def submodule_wedge(delta: SubmoduleBasis) -> WedgeVector:
    return wedge(delta.vectors, delta.field, delta.ambient)


def submodule_norm_log(delta: SubmoduleBasis) -> LogNorm:
    """Sup norm of the wedge of the basis; the zero module has norm 1."""
    if delta.rank == 0:
        return LogNorm(0)
    w = submodule_wedge(delta)
    if w.is_zero:
        raise DomainError("vectors are dependent, not a basis")
    return w.norm_log()


# ---------------------------------------------------------------------------
# primitive closure over the PID F_q[T]

def primitive_closure(delta: SubmoduleBasis) -> SubmoduleBasis:
    """Smallest primitive submodule of the same rank containing delta."""
    field = delta.field
    j, N = delta.rank, delta.ambient
    if j == 0:
        return delta
    for v in delta.vectors:
        for x in v:
            if not isinstance(x, Poly):
                raise DomainError("closure is defined for polynomial submodules")
    A = [list(v) for v in delta.vectors]
    one, zero = Poly.one(field), Poly.zero(field)
    W = [[one if i == c else zero for c in range(N)] for i in range(N)]

    for d in range(j):
        while True:
            pi = pc = None
            pdeg = None
            for i in range(d, j):
                for c in range(d, N):
                    e = A[i][c]
                    if not e.is_zero and (pdeg is None or e.degree < pdeg):
                        pi, pc, pdeg = i, c, e.degree
            if pi is None:
                raise DomainError("vectors are dependent, not a basis")
            if pi != d:
                A[d], A[pi] = A[pi], A[d]
            if pc != d:
                for row in A:
                    row[d], row[pc] = row[pc], row[d]
                W[d], W[pc] = W[pc], W[d]
            dirty = False
            for i in range(d + 1, j):
                if A[i][d].is_zero:
                    continue
                qq, _ = divmod(A[i][d], A[d][d])
                if not qq.is_zero:
                    A[i] = [A[i][c] - qq * A[d][c] for c in range(N)]
                if not A[i][d].is_zero:
                    dirty = True
            for c in range(d + 1, N):
                if A[d][c].is_zero:
                    continue
                qq, _ = divmod(A[d][c], A[d][d])
                if not qq.is_zero:
                    for i in range(j):
                        A[i][c] = A[i][c] - qq * A[i][d]
                    W[d] = [W[d][x] + qq * W[c][x] for x in range(N)]
                if not A[d][c].is_zero:
                    dirty = True
            if not dirty:
                break
    return SubmoduleBasis(field, N, tuple(tuple(W[i]) for i in range(j)))


# ---------------------------------------------------------------------------
# flow/unipotent action on wedges

def _check_flow_exponents(t_full: Sequence[int]):
    if t_full[0] != sum(t_full[1:]):
        raise DomainError("leading flow exponent must equal the sum of the rest")
    if any(x < 0 for x in t_full):
        raise DomainError("flow exponents must be nonnegative")


def act_flow_tau(delta: SubmoduleBasis, t_full: Sequence[int],
                 y: Sequence[Laurent]) -> WedgeVector:
    """Closed-form coefficients h_I of the flow-plus-shear image of the
    wedge of delta.

    ``t_full`` is (t_0, t_1, ..., t_n) with t_0 = t_1 + ... + t_n; the
    group element fixes coordinate 0 up to scaling T^t_0 after shearing
    e_i -> e_i + y_i e_0, and scales coordinate i by T^-t_i.
    """
    _check_flow_exponents(t_full)
    n = delta.ambient - 1
    if len(y) != n:
        raise DomainError("point image must have n coordinates")
    w = submodule_wedge(delta)
    field = delta.field
    out = {}
    for J in w.coeffs:
        wj = w.coeffs[J]
        base = wj if isinstance(wj, Laurent) else Laurent.from_poly(wj)
        if 0 in J:
            rest = tuple(i for i in J if i != 0)
            acc = base
            for i in range(1, n + 1):
                if i in J:
                    continue
                I = tuple(sorted(rest + (i,)))
                wi = w.coeffs[I]
                if _entry_is_zero(wi):
                    continue
                term = y[i - 1] * (wi if isinstance(wi, Laurent)
                                   else Laurent.from_poly(wi))
                if I.index(i) % 2:
                    term = -term
                acc = acc + term
            scale = sum(t_full[i] for i in range(1, n + 1) if i not in J)
            out[J] = acc.times_T(scale)
        else:
            out[J] = base.times_T(-sum(t_full[i] for i in J))
    return WedgeVector(field, delta.ambient, delta.rank, out)


def act_flow_tau_direct(delta: SubmoduleBasis, t_full: Sequence[int],
                        y: Sequence[Laurent]) -> WedgeVector:
    """Same action computed entrywise: transform each basis vector by the
    explicit matrix and wedge the images (cross-check path)."""
    _check_flow_exponents(t_full)
    field = delta.field
    n = delta.ambient - 1
    imgs = []
    for v in delta.vectors:
        coords = [x if isinstance(x, Laurent) else Laurent.from_poly(x)
                  for x in v]
        head = coords[0]
        for i in range(1, n + 1):
            head = head + y[i - 1] * coords[i]
        img = [head.times_T(t_full[0])]
        img += [coords[i].times_T(-t_full[i]) for i in range(1, n + 1)]
        imgs.append(tuple(img))
    return wedge(imgs, field, delta.ambient)


# ---------------------------------------------------------------------------
# norm-like sampling

def _random_poly(rng: random.Random, field: FieldDescriptor, deg_bound: int) -> Poly:
    return Poly(field, [rng.randrange(field.q) for _ in range(deg_bound + 1)])


def _random_vector(rng, field, ambient, deg_bound):
    return tuple(_random_poly(rng, field, deg_bound) for _ in range(ambient))


def check_norm_like(field: FieldDescriptor, n: int, samples: int, seed,
                    deg_bound: int = 3) -> dict:
    """Sampled verification of the norm-like inequalities.

    Checks, per sample: monotonicity under same-rank containment (both a
    random nonsingular polynomial multiple of the basis and the primitive
    closure), and submultiplicativity with constant exactly 1 when a new
    vector is adjoined.  Returns a report with reproducer seeds.
    """
    ambient = n + 1
    violations = []
    counts = {"n1_sub": 0, "n1_closure": 0, "n2": 0}
    for idx in range(samples):
        rng = random.Random(f"{seed}:{idx}")
        j = rng.randrange(1, n + 1)
        while True:
            vs = [_random_vector(rng, field, ambient, deg_bound) for _ in range(j)]
            if not wedge(vs, field, ambient).is_zero:
                break
        delta = SubmoduleBasis(field, ambient, tuple(vs))
        nd = int(submodule_norm_log(delta))

        while True:
            gamma = _random_vector(rng, field, ambient, deg_bound)
            if not wedge(list(vs) + [gamma], field, ambient).is_zero:
                break
        joined = SubmoduleBasis(field, ambient, tuple(list(vs) + [gamma]))
        ngamma = int(submodule_norm_log(SubmoduleBasis(field, ambient, (gamma,))))
        counts["n2"] += 1
        if int(submodule_norm_log(joined)) > nd + ngamma:
            violations.append({"kind": "n2", "sample": idx, "seed": f"{seed}:{idx}"})

        closure = primitive_closure(delta)
        counts["n1_closure"] += 1
        if nd < int(submodule_norm_log(closure)):
            violations.append({"kind": "n1_closure", "sample": idx,
                               "seed": f"{seed}:{idx}"})

        while True:
            R = [[_random_poly(rng, field, 1) for _ in range(j)] for _ in range(j)]
            if not _det(R, Poly.zero(field), field).is_zero:
                break
        sub_vs = []
        for i in range(j):
            vec = [Poly.zero(field)] * ambient
            for l in range(j):
                if R[i][l].is_zero:
                    continue
                for c in range(ambient):
                    vec[c] = vec[c] + R[i][l] * vs[l][c]
            sub_vs.append(tuple(vec))
        counts["n1_sub"] += 1
        if int(submodule_norm_log(SubmoduleBasis(field, ambient, tuple(sub_vs)))) < nd:
            violations.append({"kind": "n1_sub", "sample": idx,
                               "seed": f"{seed}:{idx}"})
    return {
        "q": field.q,
        "n": n,
        "samples": samples,
        "seed": str(seed),
        "deg_bound": deg_bound,
        "checked": counts,
        "violations": violations,
    }
