"""Precision-tracked Laurent series in F_q((1/T)), balls and exact measures.

A :class:`Laurent` stores the certified window of a series: the leading
exponent ``top`` (None when no nonzero coefficient is certified), the
coefficients from ``top`` downward, and a tail precision ``prec`` meaning
that every coefficient at exponent >= -prec is certified.  ``prec = None``
marks an exact value (all omitted coefficients are genuinely zero).

Arithmetic propagates the tightest provable window.  Comparisons that
would depend on uncertified coefficients raise :class:`PrecisionExhausted`
rather than guess; this is what makes cylinder subdivision arguments in
the measure code sound, since a value built from a ball's generic point
certifies a statement for every point of the ball.

Measures are exact rationals count * q**-depth, normalized so the closed
unit ball has measure 1; a closed ball of radius e**k has measure q**k.
Open balls canonicalize to closed ones a step down (|x| < e^k iff
|x| <= e^(k-1)), and tripling a radius moves one step up since e < 3 < e^2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from . import _kernels as K
from .algebra import (BOTTOM, FieldDescriptor, LogNorm, Poly, _same_field,
                      _format_term, parse_terms)
from .errors import BudgetExceeded, DomainError, PrecisionExhausted

#: Default tail precision for generated (not parsed) inexact values.
DEFAULT_PREC = 64

_NEG_INF = float("-inf")


class Laurent:
    """One element of F_q((1/T)) with a certified coefficient window."""

    __slots__ = ("field", "top", "coeffs", "prec")

    def __init__(self, field: FieldDescriptor, top: Optional[int],
                 coeffs: Sequence[int] = (), prec: Optional[int] = None):
        coeffs = [] if top is None else list(coeffs)
        floor = None if prec is None else -prec
        if floor is not None and top is not None:
            # storage below the certified floor is meaningless
            if top < floor:
                coeffs = []
            else:
                coeffs = coeffs[:top - floor + 1]
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
            top -= 1
            if floor is not None and top < floor:
                coeffs = []
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.field = field
        self.top = top if coeffs else None
        self.coeffs = tuple(coeffs)
        self.prec = prec

    # --- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, field: FieldDescriptor, prec: Optional[int] = None) -> "Laurent":
        return cls(field, None, (), prec)

    @classmethod
    def from_poly(cls, P: Poly, prec: Optional[int] = None) -> "Laurent":
        if P.is_zero:
            return cls.zero(P.field, prec)
        return cls(P.field, P.degree, tuple(reversed(P.coeffs)), prec)

    @classmethod
    def from_terms(cls, field: FieldDescriptor, terms: dict,
                   prec: Optional[int] = None) -> "Laurent":
        if not terms:
            return cls.zero(field, prec)
        top = max(terms)
        low = min(terms)
        coeffs = [terms.get(e, 0) for e in range(top, low - 1, -1)]
        return cls(field, top, coeffs, prec)

    # --- certified-window bookkeeping ---------------------------------------
    @property
    def known_floor(self):
        """Lowest certified exponent (-inf for exact values)."""
        return _NEG_INF if self.prec is None else -self.prec

    @property
    def upper_log(self):
        """Certified upper bound on the log-absolute-value (-inf for 0)."""
        if self.top is not None:
            return self.top
        return _NEG_INF if self.prec is None else -self.prec - 1

    @property
    def low(self) -> Optional[int]:
        return None if self.top is None else self.top - len(self.coeffs) + 1

    @property
    def is_exact(self) -> bool:
        return self.prec is None

    def coeff(self, e: int) -> int:
        if self.prec is not None and e < -self.prec:
            raise PrecisionExhausted(
                f"coefficient at T^{e} is below the certified tail (prec={self.prec})")
        if self.top is None or e > self.top:
            return 0
        i = self.top - e
        return self.coeffs[i] if i < len(self.coeffs) else 0

    # --- norms and comparisons ----------------------------------------------
    def lognorm(self) -> LogNorm:
        if self.top is not None:
            return LogNorm(self.top)
        if self.prec is None:
            return BOTTOM
        raise PrecisionExhausted(
            f"value is 0 to precision {self.prec}; log-norm undecidable")

    def abs_le(self, k: int) -> bool:
        """Certified truth of |x| <= e^k (raises when undecidable)."""
        if self.top is not None:
            return self.top <= k
        if self.prec is None:
            return True
        if -self.prec - 1 <= k:
            return True
        raise PrecisionExhausted(
            f"|x| <= e^{k} undecidable at precision {self.prec}")

    def abs_lt(self, k: int) -> bool:
        return self.abs_le(k - 1)

    # --- decomposition --------------------------------------------------------
    def polynomial_part(self) -> Poly:
        if self.prec is not None and self.prec < 0:
            raise PrecisionExhausted("coefficients at T^0.. are uncertified")
        if self.top is None or self.top < 0:
            return Poly.zero(self.field)
        asc = [self.coeff(e) for e in range(0, self.top + 1)]
        return Poly(self.field, asc)

    def fractional_part(self) -> "Laurent":
        if self.prec is not None and self.prec < 0:
            raise PrecisionExhausted("coefficients at T^0.. are uncertified")
        if self.top is None or self.top < 0:
            return self
        low = self.low
        if low >= 0:
            return Laurent.zero(self.field, self.prec)
        coeffs = [self.coeff(e) for e in range(-1, low - 1, -1)]
        return Laurent(self.field, -1, coeffs, self.prec)

    # --- arithmetic -------------------------------------------------------------
    def _dense_asc(self):
        """(low, ascending coefficient list) of the stored window."""
        if self.top is None:
            return 0, []
        return self.low, list(reversed(self.coeffs))

    def __add__(self, other: "Laurent") -> "Laurent":
        _same_field(self.field, other.field)
        floor = max(self.known_floor, other.known_floor)
        t = self.field.tables()
        la, ca = self._dense_asc()
        lb, cb = other._dense_asc()
        lo = min(la, lb) if (ca or cb) else 0
        ca = [0] * (la - lo) + ca
        cb = [0] * (lb - lo) + cb
        out = K.poly_add(ca, cb, t.q, t.add)
        terms = {lo + i: c for i, c in enumerate(out) if c and lo + i >= floor}
        prec = None if floor == _NEG_INF else -int(floor)
        return Laurent.from_terms(self.field, terms, prec)

    def __neg__(self) -> "Laurent":
        t = self.field.tables()
        return Laurent(self.field, self.top,
                       [t.neg[c] for c in self.coeffs], self.prec)

    def __sub__(self, other: "Laurent") -> "Laurent":
        return self + (-other)

    def __mul__(self, other: "Laurent") -> "Laurent":
        _same_field(self.field, other.field)
        # exact zero annihilates regardless of the other side's precision
        if (self.top is None and self.prec is None) or \
           (other.top is None and other.prec is None):
            return Laurent.zero(self.field)
        floor = max(self.known_floor + other.upper_log,
                    other.known_floor + self.upper_log)
        prec = None if floor == _NEG_INF else -int(floor)
        t = self.field.tables()
        la, ca = self._dense_asc()
        lb, cb = other._dense_asc()
        out = K.poly_mul(ca, cb, t.q, t.add, t.mul)
        lo = la + lb
        terms = {lo + i: c for i, c in enumerate(out) if c and lo + i >= floor}
        return Laurent.from_terms(self.field, terms, prec)

    def mul_poly(self, P: Poly) -> "Laurent":
        return self * Laurent.from_poly(P)

    def scale(self, c: int) -> "Laurent":
        """Multiply by the field element with packed value c."""
        if c == 0:
            return Laurent.zero(self.field)
        t = self.field.tables()
        return Laurent(self.field, self.top,
                       [t.mul[x * t.q + c] for x in self.coeffs], self.prec)

    def times_T(self, k: int) -> "Laurent":
        """Multiply by T^k (shifts the certified window by k)."""
        prec = None if self.prec is None else self.prec - k
        top = None if self.top is None else self.top + k
        return Laurent(self.field, top, self.coeffs, prec)

    def with_prec(self, prec: Optional[int]) -> "Laurent":
        """Weaken (never strengthen) the certified tail."""
        if prec is None:
            if self.prec is not None:
                raise PrecisionExhausted("cannot promote an inexact value to exact")
            return self
        if self.prec is not None and prec > self.prec:
            raise PrecisionExhausted("cannot extend certification")
        return Laurent(self.field, self.top, self.coeffs, prec)

    # --- equality / text ----------------------------------------------------------
    def __eq__(self, other):
        return (isinstance(other, Laurent) and self.field == other.field
                and self.top == other.top and self.coeffs == other.coeffs
                and self.prec == other.prec)

    def __hash__(self):
        return hash((self.field, self.top, self.coeffs, self.prec))

    def __str__(self):
        return format_laurent(self)

    def __repr__(self):
        return f"Laurent({self.field}, {format_laurent(self)!r})"


def laurent_parts(a: Laurent):
    """Split into (polynomial part, fractional part); their sum is a."""
    return a.polynomial_part(), a.fractional_part()


def laurent_arith(op: str, a: Laurent, b) -> Laurent:
    """Dispatch ``add/mul/poly_mul``; rejects results with an empty window."""
    if op == "add":
        out = a + b
    elif op == "mul":
        out = a * b
    elif op == "poly_mul":
        out = a.mul_poly(b)
    else:
        raise DomainError(f"unknown Laurent operation {op!r}")
    if out.top is None and out.prec is not None and out.prec < 0:
        raise PrecisionExhausted("result has no certified coefficients")
    return out


# ---------------------------------------------------------------------------
# text format

def format_laurent(a: Laurent) -> str:
    if a.top is None:
        body = "0"
    else:
        body = "+".join(_format_term(a.field, c, a.top - i)
                        for i, c in enumerate(a.coeffs) if c)
    if a.prec is None:
        return body
    return f"{body} ; prec={a.prec}"


def parse_laurent(field: FieldDescriptor, text: str) -> Laurent:
    body, _, tail = text.partition(";")
    prec = None
    tail = tail.strip()
    if tail:
        key, _, val = tail.partition("=")
        if key.strip() != "prec":
            raise DomainError(f"unknown annotation {tail!r}")
        prec = int(val)
    terms = parse_terms(field, body)
    if terms and prec is not None and min(terms) < -prec:
        raise DomainError("literal has terms below its own precision")
    return Laurent.from_terms(field, terms, prec)


# ---------------------------------------------------------------------------
# balls and measures

@dataclass(frozen=True)
class Ball:
    """Ball in F; in the ultrametric every point of a ball is a center."""

    center: Laurent
    radius_log: int
    closed: bool = True

    @property
    def field(self) -> FieldDescriptor:
        return self.center.field

    @property
    def radius_canonical(self) -> int:
        """Radius exponent of the equivalent closed ball."""
        return self.radius_log if self.closed else self.radius_log - 1

    def canonical(self) -> "Ball":
        r = self.radius_canonical
        if self.center.known_floor > r + 1:
            raise PrecisionExhausted("center not certified down to the radius")
        kept = {e: c for e, c in _stored_terms(self.center) if e > r}
        return Ball(Laurent.from_terms(self.field, kept), r, True)

    def grow(self, steps: int = 1) -> "Ball":
        """Radius times 3**steps: one canonical log-step up per factor 3."""
        c = self.canonical()
        return Ball(c.center, c.radius_log + steps, True)

    def children(self) -> Iterator["Ball"]:
        """The q sub-balls one radius step down."""
        c = self.canonical()
        r = c.radius_log
        base = dict(_stored_terms(c.center))
        for a in range(self.field.q):
            terms = dict(base)
            if a:
                terms[r] = a
            yield Ball(Laurent.from_terms(self.field, terms), r - 1, True)

    def generic_point(self) -> Laurent:
        """The center with certification cut exactly at the radius.

        Any statement certified about this value holds for every point of
        the ball, which is what the adaptive measure scans rely on.
        """
        c = self.canonical()
        return Laurent(self.field, c.center.top, c.center.coeffs,
                       -(c.radius_log + 1))

    def representatives(self, depth: int, budget: Optional[int] = None) -> Iterator[Laurent]:
        c = self.canonical()
        r = c.radius_log
        if depth < -r:
            raise DomainError("depth must be >= -radius_log")
        exponents = list(range(r, -depth, -1))
        count = self.field.q ** len(exponents)
        if budget is not None and count > budget:
            raise BudgetExceeded(f"{count} cylinders exceed budget {budget}")
        base = dict(_stored_terms(c.center))
        # exponents run downward, so the stream is lexicographic in the
        # printed coefficient prefix
        for combo in itertools.product(range(self.field.q), repeat=len(exponents)):
            terms = dict(base)
            for e, a in zip(exponents, combo):
                if a:
                    terms[e] = a
            yield Laurent.from_terms(self.field, terms)

    def __contains__(self, x: Laurent) -> bool:
        return (x - self.center).abs_le(self.radius_canonical)

    def __str__(self):
        body = format_laurent(self.center)
        br = "[]" if self.closed else "()"
        return f"B{br[0]}{body}; e^{self.radius_log}{br[1]}"


def _stored_terms(a: Laurent):
    if a.top is None:
        return []
    return [(a.top - i, c) for i, c in enumerate(a.coeffs) if c]


def parse_ball(field: FieldDescriptor, text: str) -> Ball:
    text = text.strip()
    if text.startswith("B[") and text.endswith("]"):
        closed = True
    elif text.startswith("B(") and text.endswith(")"):
        closed = False
    else:
        raise DomainError(f"malformed ball literal {text!r}")
    inner = text[2:-1]
    center_text, _, rad = inner.partition(";")
    rad = rad.strip()
    if not rad.startswith("e^"):
        raise DomainError("ball radius must be written e^k")
    return Ball(parse_laurent(field, center_text), int(rad[2:]), closed)


@dataclass(frozen=True)
class ExactMeasure:
    """Exact rational count * q**-depth, canonical (q does not divide count
    unless depth is 0)."""

    q: int
    count: int
    depth: int

    def __post_init__(self):
        if self.count < 0 or self.depth < 0:
            raise DomainError("measure must be nonnegative with depth >= 0")
        count, depth = self.count, self.depth
        while depth > 0 and count % self.q == 0:
            count //= self.q
            depth -= 1
        if count == 0:
            depth = 0
        object.__setattr__(self, "count", count)
        object.__setattr__(self, "depth", depth)

    @classmethod
    def zero(cls, q: int) -> "ExactMeasure":
        return cls(q, 0, 0)

    def __add__(self, other: "ExactMeasure") -> "ExactMeasure":
        if self.q != other.q:
            raise DomainError("measures over different q")
        d = max(self.depth, other.depth)
        return ExactMeasure(
            self.q,
            self.count * self.q ** (d - self.depth)
            + other.count * self.q ** (d - other.depth),
            d)

    def as_fraction(self) -> Fraction:
        return Fraction(self.count, self.q ** self.depth)

    def __eq__(self, other):
        if isinstance(other, ExactMeasure):
            return self.as_fraction() == other.as_fraction()
        return self.as_fraction() == other

    def __le__(self, other):
        rhs = other.as_fraction() if isinstance(other, ExactMeasure) else other
        return self.as_fraction() <= rhs

    def __lt__(self, other):
        rhs = other.as_fraction() if isinstance(other, ExactMeasure) else other
        return self.as_fraction() < rhs

    def __hash__(self):
        return hash(self.as_fraction())

    def __str__(self):
        if self.depth == 0:
            return str(self.count)
        return f"{self.count}/{self.q}^{self.depth}"


def ball_measure(B: Ball) -> ExactMeasure:
    """Haar measure normalized so the closed unit ball has measure 1."""
    r = B.radius_canonical
    q = B.field.q
    if r >= 0:
        return ExactMeasure(q, q ** r, 0)
    return ExactMeasure(q, 1, -r)


def cylinder_enumerate(B: Ball, depth: int,
                       budget: Optional[int] = None) -> Iterator[Laurent]:
    """One exact representative per radius-e^-depth cylinder partitioning B.

    The count is ball_measure(B) / q**-depth = q**(radius_log + depth).
    """
    return B.representatives(depth, budget=budget)
