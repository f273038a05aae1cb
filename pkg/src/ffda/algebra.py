"""Exact arithmetic in F_q and the polynomial ring F_q[T].

Field elements are stored as integers in [0, q) encoding polynomial-basis
coordinates base p, so the hot kernels can work on plain ints through
precomputed operation tables.  Absolute values take values in the discrete
group e**Z and are represented by their integer exponents (:class:`LogNorm`)
with a ``BOTTOM`` sentinel for |0| = 0; the base e is never materialized
except in human-readable reports.

All values are immutable and all operations are pure functions, so
everything here is safe to evaluate concurrently.
"""

from __future__ import annotations

import functools
from array import array
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Sequence, Union

from . import _kernels as K
from .errors import DomainError, FieldMismatch

# Largest q for which full q x q operation tables are built.
TABLE_LIMIT = 256


# ---------------------------------------------------------------------------
# log-norms

@functools.total_ordering
class LogNorm:
    """Integer exponent of an absolute value |x| = e**value.

    ``BOTTOM`` (value ``None``) represents |0| = 0 and is smaller than every
    integer exponent.  Addition corresponds to multiplying absolute values.
    """

    __slots__ = ("value",)

    def __init__(self, value: Optional[int]):
        self.value = value

    @property
    def is_bottom(self) -> bool:
        return self.value is None

    def __add__(self, other: "LogNorm") -> "LogNorm":
        other = _as_lognorm(other)
        if self.value is None or other.value is None:
            return BOTTOM
        return LogNorm(self.value + other.value)

    def __sub__(self, other: "LogNorm") -> "LogNorm":
        other = _as_lognorm(other)
        if other.value is None:
            raise DomainError("cannot divide by an absolute value of 0")
        if self.value is None:
            return BOTTOM
        return LogNorm(self.value - other.value)

    def __eq__(self, other) -> bool:
        try:
            other = _as_lognorm(other)
        except TypeError:
            return NotImplemented
        return self.value == other.value

    def __lt__(self, other) -> bool:
        other = _as_lognorm(other)
        if self.value is None:
            return other.value is not None
        if other.value is None:
            return False
        return self.value < other.value

    def __hash__(self):
        return hash(("LogNorm", self.value))

    def __int__(self) -> int:
        if self.value is None:
            raise DomainError("BOTTOM has no finite exponent")
        return self.value

    def __repr__(self):
        return "BOTTOM" if self.value is None else f"e^{self.value}"


BOTTOM = LogNorm(None)


def _as_lognorm(x) -> LogNorm:
    if isinstance(x, LogNorm):
        return x
    if isinstance(x, int):
        return LogNorm(x)
    raise TypeError(f"expected LogNorm or int, got {type(x).__name__}")


# ---------------------------------------------------------------------------
# small number-theory helpers (modulus validation only)

def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _zp_trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _zp_mod(a: Sequence[int], b: Sequence[int], p: int) -> list:
    rem = list(a)
    db = len(b) - 1
    binv = pow(b[db], p - 2, p)
    for i in range(len(rem) - 1, db - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        f = (c * binv) % p
        for j in range(db + 1):
            rem[i - db + j] = (rem[i - db + j] - f * b[j]) % p
    return _zp_trim(rem)


def _monic_polys(p: int, deg: int) -> Iterator[list]:
    span = p ** deg
    for low in range(span):
        c, rest = [], low
        for _ in range(deg):
            c.append(rest % p)
            rest //= p
        yield c + [1]


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    r = len(modulus) - 1
    if r < 1 or modulus[r] % p == 0:
        return False
    for deg in range(1, r // 2 + 1):
        for g in _monic_polys(p, deg):
            if not _zp_mod(modulus, g, p):
                return False
    return True


# Default irreducible moduli (ascending coefficients) for q = p^r <= 64.
DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 0, 1),
    (7, 2): (1, 0, 1),
}


# ---------------------------------------------------------------------------
# field descriptors and operation tables

class FieldTables(NamedTuple):
    q: int
    p: int
    r: int
    add: array
    mul: array
    neg: array
    inv: array


def _digits(val: int, p: int, r: int) -> list:
    out = []
    for _ in range(r):
        out.append(val % p)
        val //= p
    return out


def _undigits(digits: Sequence[int], p: int) -> int:
    val = 0
    for d in reversed(digits):
        val = val * p + d
    return val


@functools.lru_cache(maxsize=None)
def _build_tables(p: int, r: int, modulus: Optional[tuple]) -> FieldTables:
    q = p ** r
    if q > TABLE_LIMIT:
        raise DomainError(f"q = {q} exceeds the table limit {TABLE_LIMIT}")
    neg = array("i", (_undigits([(p - c) % p for c in _digits(d, p, r)], p)
                      for d in range(q)))
    add = array("i", (0 for _ in range(q * q)))
    mul_list = [0] * (q * q)
    for a in range(q):
        da = _digits(a, p, r)
        for b in range(q):
            db = _digits(b, p, r)
            add[a * q + b] = _undigits([(x + y) % p for x, y in zip(da, db)], p)
            conv = [0] * (2 * r - 1)
            for i, x in enumerate(da):
                if x:
                    for j, y in enumerate(db):
                        conv[i + j] = (conv[i + j] + x * y) % p
            if r > 1:
                conv = _zp_mod(conv, list(modulus), p)
            conv += [0] * (r - len(conv))
            mul_list[a * q + b] = _undigits(conv[:r], p)
    mul = array("i", mul_list)
    inv = array("i", [0] * q)
    for a in range(1, q):
        for b in range(1, q):
            if mul[a * q + b] == 1:
                inv[a] = b
                break
        else:
            raise DomainError("modulus is not irreducible: zero divisor found")
    return FieldTables(q, p, r, add, mul, neg, inv)


@dataclass(frozen=True)
class FieldDescriptor:
    """The base field F_q, q = p^r, with an explicit modulus when r > 1."""

    p: int
    r: int = 1
    modulus: Optional[tuple] = None

    def __post_init__(self):
        if not _is_prime(self.p):
            raise DomainError(f"p = {self.p} is not prime")
        if self.r < 1:
            raise DomainError("r must be positive")
        if self.r == 1:
            if self.modulus is not None:
                raise DomainError("prime fields take no modulus")
        else:
            mod = self.modulus
            if mod is None:
                mod = DEFAULT_MODULI.get((self.p, self.r))
                if mod is None:
                    raise DomainError(
                        f"no default modulus for q = {self.p}^{self.r}; supply one")
                object.__setattr__(self, "modulus", mod)
                mod = self.modulus
            mod = tuple(c % self.p for c in mod)
            object.__setattr__(self, "modulus", mod)
            if len(mod) != self.r + 1 or mod[-1] != 1:
                raise DomainError("modulus must be monic of degree r")
            if not _is_irreducible(mod, self.p):
                raise DomainError("modulus is reducible over Z/p")

    @classmethod
    def of(cls, q: int, modulus: Optional[Sequence[int]] = None) -> "FieldDescriptor":
        """Descriptor for the field with q elements (q a prime power)."""
        p, r = q, 1
        for cand in range(2, q + 1):
            if _is_prime(cand) and q % cand == 0:
                p, r = cand, 0
                m = q
                while m > 1:
                    if m % cand:
                        raise DomainError(f"q = {q} is not a prime power")
                    m //= cand
                    r += 1
                break
        return cls(p, r, tuple(modulus) if modulus is not None else None)

    @property
    def q(self) -> int:
        return self.p ** self.r

    def tables(self) -> FieldTables:
        return _build_tables(self.p, self.r, self.modulus)

    def element(self, val: Union[int, Sequence[int]]) -> "FqElem":
        if isinstance(val, int):
            if self.r == 1:
                return FqElem(self, val % self.p)
            return FqElem(self, _undigits([val % self.p] + [0] * (self.r - 1), self.p))
        digits = [c % self.p for c in val]
        if len(digits) > self.r:
            raise DomainError("too many coordinates for this field")
        digits += [0] * (self.r - len(digits))
        return FqElem(self, _undigits(digits, self.p))

    @property
    def zero(self) -> "FqElem":
        return FqElem(self, 0)

    @property
    def one(self) -> "FqElem":
        return FqElem(self, 1)

    def __str__(self):
        return f"GF({self.q})"


def _same_field(a: FieldDescriptor, b: FieldDescriptor):
    if a != b:
        raise FieldMismatch(f"mixed fields {a} and {b}")


# ---------------------------------------------------------------------------
# field elements

@dataclass(frozen=True)
class FqElem:
    """Element of F_q in polynomial-basis coordinates, packed into one int."""

    field: FieldDescriptor
    val: int

    @property
    def coeffs(self) -> tuple:
        return tuple(_digits(self.val, self.field.p, self.field.r))

    @property
    def is_zero(self) -> bool:
        return self.val == 0

    def __add__(self, other: "FqElem") -> "FqElem":
        _same_field(self.field, other.field)
        t = self.field.tables()
        return FqElem(self.field, t.add[self.val * t.q + other.val])

    def __sub__(self, other: "FqElem") -> "FqElem":
        _same_field(self.field, other.field)
        t = self.field.tables()
        return FqElem(self.field, t.add[self.val * t.q + t.neg[other.val]])

    def __neg__(self) -> "FqElem":
        t = self.field.tables()
        return FqElem(self.field, t.neg[self.val])

    def __mul__(self, other: "FqElem") -> "FqElem":
        _same_field(self.field, other.field)
        t = self.field.tables()
        return FqElem(self.field, t.mul[self.val * t.q + other.val])

    def inverse(self) -> "FqElem":
        if self.val == 0:
            raise DomainError("inversion of zero")
        t = self.field.tables()
        return FqElem(self.field, t.inv[self.val])

    def __truediv__(self, other: "FqElem") -> "FqElem":
        return self * other.inverse()

    def __str__(self):
        if self.field.r == 1:
            return str(self.val)
        return "(" + ",".join(str(c) for c in self.coeffs) + ")"


def fq_arith(op: str, a: FqElem, b: Optional[FqElem] = None) -> FqElem:
    """Dispatch ``add/sub/mul/inv/neg`` on field elements."""
    if op == "inv":
        return a.inverse()
    if op == "neg":
        return -a
    if b is None:
        raise DomainError(f"operation {op!r} needs two operands")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise DomainError(f"unknown field operation {op!r}")


# ---------------------------------------------------------------------------
# polynomials over F_q

class Poly:
    """Element of F_q[T]: ascending coefficient tuple, no trailing zeros."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldDescriptor, coeffs: Sequence[int] = ()):
        q = field.q
        c = list(coeffs)
        for x in c:
            if not 0 <= x < q:
                raise DomainError(f"coefficient {x} out of range for GF({q})")
        K.poly_trim(c)
        self.field = field
        self.coeffs = tuple(c)

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, field: FieldDescriptor) -> "Poly":
        return cls(field, ())

    @classmethod
    def one(cls, field: FieldDescriptor) -> "Poly":
        return cls(field, (1,))

    @classmethod
    def monomial(cls, field: FieldDescriptor, k: int, c: int = 1) -> "Poly":
        if k < 0:
            raise DomainError("monomial exponent must be >= 0")
        return cls(field, (0,) * k + (c,))

    # basic queries ---------------------------------------------------------
    @property
    def degree(self) -> Optional[int]:
        """Degree as an int, or None for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def lognorm(self) -> LogNorm:
        return BOTTOM if not self.coeffs else LogNorm(len(self.coeffs) - 1)

    def coeff(self, k: int) -> int:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    # ring operations -------------------------------------------------------
    def _t(self):
        return self.field.tables()

    def __add__(self, other: "Poly") -> "Poly":
        _same_field(self.field, other.field)
        t = self._t()
        return Poly(self.field, K.poly_add(list(self.coeffs), list(other.coeffs),
                                           t.q, t.add))

    def __sub__(self, other: "Poly") -> "Poly":
        _same_field(self.field, other.field)
        t = self._t()
        return Poly(self.field, K.poly_sub(list(self.coeffs), list(other.coeffs),
                                           t.q, t.add, t.neg))

    def __neg__(self) -> "Poly":
        t = self._t()
        return Poly(self.field, K.poly_neg(list(self.coeffs), t.q, t.neg))

    def __mul__(self, other: "Poly") -> "Poly":
        _same_field(self.field, other.field)
        t = self._t()
        return Poly(self.field, K.poly_mul(list(self.coeffs), list(other.coeffs),
                                           t.q, t.add, t.mul))

    def __divmod__(self, other: "Poly"):
        _same_field(self.field, other.field)
        if other.is_zero:
            raise DomainError("polynomial division by zero")
        t = self._t()
        quo, rem = K.poly_divmod(list(self.coeffs), list(other.coeffs),
                                 t.q, t.add, t.mul, t.neg, t.inv)
        return Poly(self.field, quo), Poly(self.field, rem)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def scale(self, c: int) -> "Poly":
        t = self._t()
        return Poly(self.field, [t.mul[x * t.q + c] for x in self.coeffs])

    def shift(self, k: int) -> "Poly":
        """Multiply by T^k."""
        if self.is_zero:
            return self
        if k < 0:
            raise DomainError("negative shift leaves the polynomial ring")
        return Poly(self.field, (0,) * k + self.coeffs)

    def monic(self) -> "Poly":
        if self.is_zero:
            return self
        t = self._t()
        return self.scale(t.inv[self.coeffs[-1]])

    @staticmethod
    def gcd(a: "Poly", b: "Poly") -> "Poly":
        while not b.is_zero:
            a, b = b, a % b
        return a.monic()

    # comparison / hashing --------------------------------------------------
    def __eq__(self, other):
        return (isinstance(other, Poly) and self.field == other.field
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field, self.coeffs))

    # text format -----------------------------------------------------------
    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({self.field}, {format_poly(self)!r})"


def poly_arith(op: str, a: Poly, b: Poly):
    """Dispatch ``add/mul/divmod`` on polynomials."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "divmod":
        return divmod(a, b)
    raise DomainError(f"unknown polynomial operation {op!r}")


def poly_lognorm(P: Poly) -> LogNorm:
    """|P| = e**deg(P); BOTTOM for the zero polynomial."""
    return P.lognorm()


# ---------------------------------------------------------------------------
# text formats: terms "c*T^k" joined by "+", descending exponents

def _format_coeff(field: FieldDescriptor, c: int) -> str:
    if field.r == 1:
        return str(c)
    return "(" + ",".join(str(d) for d in _digits(c, field.p, field.r)) + ")"


def _format_term(field: FieldDescriptor, c: int, k: int) -> str:
    if k == 0:
        return _format_coeff(field, c)
    t = "T" if k == 1 else f"T^{k}"
    if c == 1:
        return t
    return f"{_format_coeff(field, c)}*{t}"


def format_poly(P: Poly) -> str:
    if P.is_zero:
        return "0"
    terms = [_format_term(P.field, c, k)
             for k, c in sorted(enumerate(P.coeffs), reverse=True) if c]
    return "+".join(terms)


def _parse_coeff(field: FieldDescriptor, text: str) -> int:
    text = text.strip()
    if text.startswith("("):
        if not text.endswith(")"):
            raise DomainError(f"malformed coefficient {text!r}")
        digits = [int(x) % field.p for x in text[1:-1].split(",")]
        if len(digits) > field.r:
            raise DomainError(f"coefficient {text!r} has too many coordinates")
        digits += [0] * (field.r - len(digits))
        return _undigits(digits, field.p)
    v = int(text)
    if field.r == 1:
        return v % field.p
    return _undigits([v % field.p] + [0] * (field.r - 1), field.p)


def parse_terms(field: FieldDescriptor, text: str) -> dict:
    """Parse "c*T^k" terms into an exponent -> coefficient map.

    Exponents may be negative (shared with the Laurent parser).  A leading
    '-' or term-separating '-' negates the following coefficient.
    """
    t = field.tables()
    text = text.replace(" ", "")
    if not text:
        raise DomainError("empty polynomial literal")
    chunks = []
    sign = 1
    depth = 0
    cur = ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur and cur[-1] != "^":
            chunks.append((sign, cur))
            sign = 1 if ch == "+" else -1
            cur = ""
        elif ch in "+-" and depth == 0 and not cur:
            sign = sign if ch == "+" else -sign
        else:
            cur += ch
    if cur:
        chunks.append((sign, cur))
    out: dict = {}
    for sign, term in chunks:
        if "T" in term:
            head, _, tail = term.partition("T")
            c = _parse_coeff(field, head.rstrip("*")) if head else 1
            if tail.startswith("^"):
                k = int(tail[1:])
            elif tail:
                raise DomainError(f"malformed term {term!r}")
            else:
                k = 1
        else:
            c = _parse_coeff(field, term)
            k = 0
        if sign < 0:
            c = t.neg[c]
        prev = out.get(k, 0)
        out[k] = t.add[prev * t.q + c]
    return {k: c for k, c in out.items() if c}


def parse_poly(field: FieldDescriptor, text: str) -> Poly:
    terms = parse_terms(field, text)
    if not terms:
        return Poly.zero(field)
    if min(terms) < 0:
        raise DomainError("negative exponents are not polynomial")
    coeffs = [0] * (max(terms) + 1)
    for k, c in terms.items():
        coeffs[k] = c
    return Poly(field, coeffs)
