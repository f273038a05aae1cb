"""Exact measure verifiers and the constants pipeline.

The measure machinery leans on one idea: the generic point of a ball is
its center with certification cut at the radius, so any comparison the
precision arithmetic certifies about a value computed from the generic
point holds for every point of the ball at once.  A sublevel or sup scan
therefore keeps a worklist of balls, decides each from its generic point,
and splits a ball into its q children only while undecided.  Every
emitted measure is an exact count * q**-depth.

Sup norms over a ball stabilize at finite depth (the top certified
coefficient of the value is shared by the whole ball), and the goodness
inequality C (eps/||phi||)^alpha nu(B) is checked in real logarithms with
a fixed tolerance and a reported margin, since e-powers and q-powers are
incommensurable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import FieldDescriptor, LogNorm, Poly, _same_field
from .dirichlet import (Epsilon, LinearFormsY, WeightVector, solve_strict,
                        weight_vectors)
from .errors import (BudgetExceeded, DomainError, EpsAboveRho,
                     PrecisionExhausted)
from .lattice import apply_flow, lambda1_lt, tau
from .laurent import Ball, ExactMeasure, Laurent, ball_measure, parse_laurent

_NEG_INF = float("-inf")

#: Node budget for adaptive ball scans unless a caller overrides it.
DEFAULT_BUDGET = 10 ** 6

#: Comparison tolerance (natural logs) for mixed-base inequalities.
LOG_TOL = 1e-9

#: Passes with a smaller margin than this are flagged for manual review.
FLAG_MARGIN = 1e-6


# ---------------------------------------------------------------------------
# polynomials in one variable with Laurent coefficients

class XPoly:
    """Polynomial in x with Laurent coefficients (ascending)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldDescriptor, coeffs: Sequence[Laurent]):
        cs = list(coeffs)
        while cs and cs[-1].top is None and cs[-1].prec is None:
            cs.pop()
        for c in cs:
            _same_field(field, c.field)
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls, field: FieldDescriptor) -> "XPoly":
        return cls(field, ())

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> Optional[int]:
        return len(self.coeffs) - 1 if self.coeffs else None

    def eval(self, x: Laurent) -> Laurent:
        acc = Laurent.zero(self.field)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "XPoly") -> "XPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        z = Laurent.zero(self.field)
        return XPoly(self.field,
                     [(self.coeffs[i] if i < len(self.coeffs) else z)
                      + (other.coeffs[i] if i < len(other.coeffs) else z)
                      for i in range(n)])

    def scale(self, c: Laurent) -> "XPoly":
        return XPoly(self.field, [c * a for a in self.coeffs])

    def __str__(self):
        if self.is_zero:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.top is None and c.prec is None:
                continue
            ctext = str(c)
            if k == 0:
                terms.append(ctext)
            else:
                xpart = "x" if k == 1 else f"x^{k}"
                terms.append(xpart if ctext == "1" else f"({ctext})*{xpart}")
        return "+".join(terms)


def parse_xpoly(field: FieldDescriptor, text: str) -> XPoly:
    """Parse terms like "x", "x^2", "(T^-1+1)*x^2", "2*x+1".

    Compound coefficients must be parenthesized; a sign between terms
    negates the following coefficient.
    """
    text = text.replace(" ", "")
    chunks = []
    cur, depth, sign = "", 0, 1
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and cur and cur[-1] != "^":
            chunks.append((sign, cur))
            sign, cur = (1 if ch == "+" else -1), ""
        elif ch in "+-" and depth == 0 and not cur:
            sign = sign if ch == "+" else -sign
        else:
            cur += ch
    if cur:
        chunks.append((sign, cur))
    terms: dict = {}
    for sign, term in chunks:
        if "x" in term:
            head, _, tail = term.rpartition("x")
            head = head.rstrip("*")
            if tail and not tail.startswith("^"):
                raise DomainError(f"malformed term {term!r}")
            k = int(tail[1:]) if tail else 1
            if head.startswith("(") and head.endswith(")"):
                head = head[1:-1]
            coeff = parse_laurent(field, head) if head else \
                Laurent.from_poly(Poly.one(field))
        else:
            coeff = parse_laurent(field, term)
            k = 0
        if sign < 0:
            coeff = -coeff
        terms[k] = terms.get(k, Laurent.zero(field)) + coeff
    deg = max(terms) if terms else -1
    z = Laurent.zero(field)
    return XPoly(field, [terms.get(k, z) for k in range(deg + 1)])


@dataclass(frozen=True)
class PolyMap:
    """Map x -> (f_1(x), ..., f_n(x)) with polynomial components."""

    field: FieldDescriptor
    components: tuple  # n XPoly values
    domain: Ball

    @property
    def n(self) -> int:
        return len(self.components)

    def image(self, x: Laurent) -> tuple:
        return tuple(f.eval(x) for f in self.components)

    def __str__(self):
        return ",".join(str(f) for f in self.components)


def parse_poly_map(field: FieldDescriptor, text: str,
                   domain: Optional[Ball] = None) -> PolyMap:
    comps = tuple(parse_xpoly(field, c) for c in text.split(",") if c.strip())
    if domain is None:
        domain = Ball(Laurent.zero(field), 0, closed=False)
    return PolyMap(field, comps, domain)


def flow_exponents(t: WeightVector) -> tuple:
    """Audited converter from (m=1, n) weights to the 0-indexed flow tuple
    (t_0, t_1, ..., t_n) with t_0 the sum of the rest."""
    if t.m != 1:
        raise DomainError("flow conversion is defined for one linear form")
    return (t.t[0],) + tuple(t.t[1:])


# ---------------------------------------------------------------------------
# adaptive ball scans

class _Budget:
    __slots__ = ("left",)

    def __init__(self, budget: Optional[int]):
        self.left = DEFAULT_BUDGET if budget is None else budget

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded("adaptive scan exceeded its node budget")


def _scan_measure(B: Ball, decide, budget: Optional[int]) -> ExactMeasure:
    """Exact measure of {x in B : property}, where decide(ball) certifies
    the property for a whole ball (True/False) or returns None to split."""
    bud = _Budget(budget)
    total = ExactMeasure.zero(B.field.q)
    stack = [B.canonical()]
    while stack:
        ball = stack.pop()
        bud.spend()
        verdict = decide(ball)
        if verdict is None:
            stack.extend(ball.children())
        elif verdict:
            total = total + ball_measure(ball)
    return total


def sublevel_measure(phi: XPoly, B: Ball, eps: Epsilon,
                     budget: Optional[int] = None) -> ExactMeasure:
    """Exact measure of {x in B : |phi(x)| < eps}."""
    s = eps.s

    def decide(ball):
        val = phi.eval(ball.generic_point())
        if val.top is not None:
            return val.top <= -s - 1
        if val.prec is None:
            return True
        if -val.prec - 1 <= -s - 1:
            return True
        return None

    return _scan_measure(B, decide, budget)


def sublevel_measures(phi: XPoly, B: Ball, eps_list: Sequence[Epsilon],
                      budget: Optional[int] = None) -> dict:
    """Exact sublevel measures for several thresholds in one scan."""
    svals = sorted({e.s for e in eps_list})
    bud = _Budget(budget)
    totals = {s: ExactMeasure.zero(B.field.q) for s in svals}
    stack = [(B.canonical(), tuple(svals))]
    while stack:
        ball, pending = stack.pop()
        bud.spend()
        val = phi.eval(ball.generic_point())
        if val.top is not None:
            bound = val.top  # |phi| constant on the ball
        elif val.prec is None:
            bound = None  # identically below every threshold
        else:
            bound = -val.prec - 1 if -val.prec - 1 > -min(pending) - 1 else None
            if bound is not None:
                # undecided for the deepest thresholds only when the
                # uncertified tail could still straddle them
                pass
        if val.top is not None:
            inside = [s for s in pending if bound <= -s - 1]
            for s in inside:
                totals[s] = totals[s] + ball_measure(ball)
            continue
        if val.prec is None:
            for s in pending:
                totals[s] = totals[s] + ball_measure(ball)
            continue
        ub = -val.prec - 1
        decided = [s for s in pending if ub <= -s - 1]
        for s in decided:
            totals[s] = totals[s] + ball_measure(ball)
        rest = tuple(s for s in pending if s not in decided)
        if rest:
            stack.extend((child, rest) for child in ball.children())
    return {s: totals[s] for s in svals}


def sublevel_measure_all(phis: Sequence[XPoly], B: Ball, eps: Epsilon,
                         budget: Optional[int] = None) -> ExactMeasure:
    """Exact measure of {x in B : max_i |phi_i(x)| < eps}."""
    s = eps.s

    def decide(ball):
        g = ball.generic_point()
        verdict = True
        for phi in phis:
            val = phi.eval(g)
            if val.top is not None:
                if val.top > -s - 1:
                    return False
            elif val.prec is not None and -val.prec - 1 > -s - 1:
                verdict = None
        return verdict

    return _scan_measure(B, decide, budget)


@dataclass(frozen=True)
class SupResult:
    exact: bool
    log: int  # exact sup exponent, or the floor marker (sup <= e**log)

    def __str__(self):
        return f"e^{self.log}" if self.exact else f"<=e^{self.log}"


def sup_norm_log(phi: XPoly, B: Ball, floor: int,
                 budget: Optional[int] = None) -> SupResult:
    """Exact sup of |phi| over B when it exceeds e**-floor, else a marker.

    The top certified coefficient of phi at a ball's generic point is
    shared by the whole ball, so |phi| is constant there and the search
    is a plain branch-and-bound over balls.
    """
    bud = _Budget(budget)
    best: Optional[int] = None
    floor_pruned = False
    cutoff = -floor
    stack = [B.canonical()]
    while stack:
        ball = stack.pop()
        bud.spend()
        val = phi.eval(ball.generic_point())
        if val.top is not None:
            if best is None or val.top > best:
                best = val.top
            continue
        if val.prec is None:
            continue  # identically zero on the ball
        upper = -val.prec - 1
        if best is not None and upper <= best:
            continue
        if upper <= cutoff:
            floor_pruned = True
            continue
        stack.extend(ball.children())
    if best is not None and (best >= cutoff or not floor_pruned):
        return SupResult(True, best)
    return SupResult(False, cutoff)


# ---------------------------------------------------------------------------
# goodness checks

def cg_good_check(cases: Sequence, C: Fraction, alpha: Fraction,
                  eps_list: Sequence[Epsilon],
                  sup_floor: int = 24,
                  tol: float = LOG_TOL,
                  flag_margin: float = FLAG_MARGIN,
                  budget: Optional[int] = None) -> dict:
    """Verify nu{|phi| < eps} <= C (eps/||phi||)^alpha nu(B) over a grid.

    ``cases`` is an iterable of (label, phi, ball).  Comparison happens in
    natural logs of the exact quantities; each pass carries a margin and
    small margins are flagged."""
    lnq = None
    violations, flagged = [], []
    n_cases = 0
    min_margin = None
    for label, phi, ball in cases:
        if lnq is None:
            lnq = math.log(ball.field.q)
        sup = sup_norm_log(phi, ball, sup_floor, budget=budget)
        if not sup.exact:
            raise PrecisionExhausted(
                f"sup of {label} below the floor e^-{sup_floor}; raise the floor")
        nu_ball = ball_measure(ball)
        ln_ball = math.log(nu_ball.count) - nu_ball.depth * lnq
        measures = sublevel_measures(phi, ball, eps_list, budget=budget)
        for e in eps_list:
            mu = measures[e.s]
            n_cases += 1
            rhs_ln = math.log(float(C)) + float(alpha) * (-e.s - sup.log) + ln_ball
            if mu.count == 0:
                continue
            lhs_ln = math.log(mu.count) - mu.depth * lnq
            margin = rhs_ln - lhs_ln
            if min_margin is None or margin < min_margin:
                min_margin = margin
            rec = {"phi": label, "ball": str(ball), "eps": str(e),
                   "sup_log": sup.log, "measure": str(mu), "margin": margin}
            if margin < -tol:
                violations.append(rec)
            elif margin < flag_margin:
                flagged.append(rec)
    return {"C": str(C), "alpha": str(alpha), "cases": n_cases,
            "tol": tol, "flag_margin": flag_margin,
            "min_margin": min_margin,
            "violations": violations, "flagged": flagged}


def federer_ratio(B: Ball, steps: int) -> Fraction:
    """Exact nu(3**steps B) / nu(B); tripling is one canonical radius step."""
    if steps < 0:
        raise DomainError("steps must be >= 0")
    grown = ball_measure(B.grow(steps))
    return grown.as_fraction() / ball_measure(B).as_fraction()


def federer_report(field: FieldDescriptor, D, steps: int = 1) -> dict:
    """One-step doubling report against a bound D (an EConst).

    The exact one-step ratio is q; the D-verdict is reported per q, and
    ratios exceeding the bound are flagged rather than reinterpreted.
    """
    B = Ball(Laurent.zero(field), 0, closed=True)
    ratio = federer_ratio(B, steps)
    ln_ratio = math.log(ratio)
    ln_D = econst_ln(D)
    verdict = ln_ratio <= ln_D + LOG_TOL
    return {"q": field.q, "steps": steps, "ratio": str(ratio),
            "D": format_econst(D), "verdict": verdict,
            "flagged": not verdict,
            "note": None if verdict else
            "exact ratio exceeds the bound for this q; verdict reported, not hidden"}


def nonplanar_margin(f: PolyMap, B: Ball, depth: int,
                     budget: Optional[int] = None) -> dict:
    """Certified margin delta, threshold M, and s = n*M.

    delta is the min over normalized coefficient tuples (max |c_i| = 1,
    discretized at the given depth) of sup |c_0 + sum c_i f_i| over B.
    Replacing a coefficient tuple by its depth-d representative changes
    the linear combination by at most e**(Mf - d) on B, so when the
    discretized minimum exceeds that bound it equals delta exactly.
    """
    field = f.field
    q = field.q
    n = f.n
    sup_floor = depth + 8
    comp_sups = []
    for comp in f.components:
        s = sup_norm_log(comp, B, sup_floor, budget=budget)
        comp_sups.append(s.log if s.exact else -sup_floor)
    Mf = max([0] + comp_sups)

    unit = Ball(Laurent.zero(field), 0, closed=True)
    reps = list(unit.representatives(depth - 1)) if depth >= 1 else \
        [Laurent.zero(field)]
    delta: Optional[int] = None
    witness = None
    one = XPoly(field, (Laurent.from_poly(Poly.one(field)),))
    for combo in itertools.product(range(len(reps)), repeat=n + 1):
        cs = [reps[i] for i in combo]
        if not any(c.top == 0 for c in cs):
            continue  # not normalized: no coefficient of absolute value 1
        phi = one.scale(cs[0])
        for i in range(n):
            phi = phi + f.components[i].scale(cs[i + 1])
        if phi.is_zero:
            return {"nonplanar": False, "exact": True, "delta_log": None,
                    "M": None, "s": None, "depth": depth,
                    "witness": ",".join(str(c) for c in cs),
                    "component_sups": comp_sups}
        sup = sup_norm_log(phi, B, sup_floor, budget=budget)
        val = sup.log if sup.exact else -sup_floor
        if delta is None or val < delta:
            delta = val
            witness = ",".join(str(c) for c in cs)
    certified = delta is not None and delta > Mf - depth
    M = max(0, -delta) if delta is not None else None
    return {"nonplanar": True, "exact": certified,
            "delta_log": delta, "M": M if certified else None,
            "s": n * M if certified and M is not None else None,
            "depth": depth, "witness_min": witness,
            "component_sups": comp_sups,
            "note": None if certified else
            "discretization too coarse to certify delta; increase depth"}


# ---------------------------------------------------------------------------
# symbolic constants coeff * e**k

@dataclass(frozen=True)
class EConst:
    coeff: Fraction
    e_exp: Fraction = Fraction(0)

    def __mul__(self, other: "EConst") -> "EConst":
        return EConst(self.coeff * other.coeff, self.e_exp + other.e_exp)

    def __truediv__(self, other: "EConst") -> "EConst":
        return EConst(self.coeff / other.coeff, self.e_exp - other.e_exp)

    def pow_int(self, k: int) -> "EConst":
        return EConst(self.coeff ** k, self.e_exp * k)

    def pow_rational(self, r: Fraction) -> Optional["EConst"]:
        """Exact rational power, or None when the coefficient root is
        irrational (the e-exponent is always exact)."""
        if self.coeff <= 0:
            raise DomainError("constants must be positive")
        num, den = r.numerator, r.denominator
        cn = _nth_root(self.coeff.numerator, den)
        cd = _nth_root(self.coeff.denominator, den)
        if cn is None or cd is None:
            return None
        base = Fraction(cn, cd)
        return EConst(base ** num, self.e_exp * r)

    def __float__(self) -> float:
        return float(self.coeff) * math.exp(float(self.e_exp))


def _nth_root(v: int, n: int) -> Optional[int]:
    if v < 0:
        return None
    if v in (0, 1) or n == 1:
        return v
    r = round(v ** (1.0 / n))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** n == v:
            return cand
    return None


def econst_ln(c: EConst) -> float:
    return math.log(float(c.coeff)) + float(c.e_exp)


def econst_le(a: EConst, b: EConst) -> bool:
    if a.e_exp == b.e_exp:
        return a.coeff <= b.coeff
    return econst_ln(a) <= econst_ln(b) + LOG_TOL


def format_econst(c: EConst) -> str:
    num, den = c.coeff.numerator, c.coeff.denominator
    k = c.e_exp
    e_text = None
    if k != 0:
        mag = abs(k)
        e_text = f"e^{mag}" if mag.denominator == 1 else f"e^({mag})"
    num_parts = [] if num == 1 else [str(num)]
    den_parts = [] if den == 1 else [str(den)]
    if e_text:
        (num_parts if k > 0 else den_parts).append(e_text)
    top = "*".join(num_parts) if num_parts else "1"
    if not den_parts:
        return top
    bottom = "*".join(den_parts)
    if len(den_parts) > 1:
        bottom = f"({bottom})"
    return f"{top}/{bottom}"


def parse_econst(text: str) -> EConst:
    """Parse "a/b", "e^k", "a/b*e^k" (also with a negative exponent)."""
    text = text.replace(" ", "")
    coeff = Fraction(1)
    e_exp = Fraction(0)
    for part in text.split("*"):
        if part.startswith("e^"):
            e_exp += Fraction(part[2:])
        elif part:
            coeff *= Fraction(part)
    if coeff <= 0:
        raise DomainError("constants must be positive")
    return EConst(coeff, e_exp)


@dataclass(frozen=True)
class GoodnessParams:
    C: Fraction
    alpha: Fraction
    D: EConst
    rho: EConst = dc_field(default_factory=lambda: EConst(Fraction(1)))
    N_X: int = 1


def epsilon0(n: int, C: Fraction, alpha: Fraction, D: EConst) -> dict:
    """The constants C~ = (n+1) C D^(2(n+1)) and eps_0 = C~^(-1/alpha)."""
    Ctilde = EConst(Fraction(n + 1) * C) * D.pow_int(2 * (n + 1))
    eps0 = Ctilde.pow_rational(Fraction(-1) / alpha)
    eps0_float = float(Ctilde) ** float(Fraction(-1) / alpha)
    capped = None
    if eps0 is not None:
        eps0_float = float(eps0)
        if econst_le(EConst(Fraction(1), Fraction(-1)), eps0):
            capped = "e^-1"  # the standing hypothesis eps <= 1/e caps reports
    return {
        "n": n, "C": str(C), "alpha": str(alpha), "D": format_econst(D),
        "Ctilde": format_econst(Ctilde),
        "Ctilde_float": float(Ctilde),
        "eps0": format_econst(eps0) if eps0 is not None else None,
        "eps0_expression": f"({format_econst(Ctilde)})^(-{1 / alpha})"
        if eps0 is None else format_econst(eps0),
        "eps0_float": eps0_float,
        "eps0_capped": capped,
    }


def nondivergence_bound(m: int, params: GoodnessParams, eps: Epsilon) -> dict:
    """The bound coefficient m C (N_X D^2)^m (eps/rho)^alpha."""
    eps_const = EConst(Fraction(1), Fraction(-eps.s))
    if not econst_le(eps_const, params.rho):
        raise EpsAboveRho("the bound requires eps <= rho")
    base = EConst(Fraction(m) * params.C) * \
        (EConst(Fraction(params.N_X)) * params.D.pow_int(2)).pow_int(m)
    ratio = (eps_const / params.rho).pow_rational(params.alpha)
    if ratio is not None:
        val = base * ratio
        return {"exact": format_econst(val), "float": float(val),
                "expression": format_econst(val)}
    expr = (f"{format_econst(base)}*({format_econst(eps_const / params.rho)})"
            f"^({params.alpha})")
    val_float = float(base) * float(eps_const / params.rho) ** float(params.alpha)
    return {"exact": None, "float": val_float, "expression": expr}


# ---------------------------------------------------------------------------
# measure probes

def di_measure_probe(f: PolyMap, eps: Epsilon, windows: Sequence[int],
                     depth: int, B: Optional[Ball] = None,
                     budget: Optional[int] = None) -> dict:
    """Exact fraction of depth-d cylinder representatives x of B whose
    image forms solve the strict system for every balanced t with
    eps.s+1 <= ||t|| <= S, per window top S.

    Representatives are exact points, so each verdict is exact; the curve
    is non-increasing in S by construction.
    """
    if B is None:
        B = f.domain
    smin = eps.s + 1
    smax = max(windows)
    by_norm: dict = {}
    for t in weight_vectors(1, f.n, smax):
        if smin <= t.norm <= smax:
            by_norm.setdefault(t.norm, []).append(t)
    total = 0
    fail_counts = {S: 0 for S in windows}  # reps failing at norm <= S
    for x in B.representatives(depth - 1, budget=budget):
        total += 1
        Y = LinearFormsY(f.field, 1, f.n, (f.image(x),))
        fail_norm = None
        for norm in range(smin, smax + 1):
            for t in by_norm.get(norm, ()):
                if not solve_strict(Y, eps, t, budget=budget).solvable:
                    fail_norm = norm
                    break
            if fail_norm is not None:
                break
        for S in windows:
            if fail_norm is not None and fail_norm <= S:
                fail_counts[S] += 1
    rows = []
    for S in sorted(windows):
        good = total - fail_counts[S]
        rows.append({"S": S, "count": good, "total": total,
                     "fraction": str(Fraction(good, total))})
    return {"eps": str(eps), "depth": depth, "ball": str(B),
            "map": str(f), "rows": rows}


def prop_instance_check(f: PolyMap, B: Ball, t: WeightVector, eps: Epsilon,
                        Ctilde: EConst, alpha: Fraction,
                        budget: Optional[int] = None,
                        tol: float = LOG_TOL) -> dict:
    """Exact nu{x in B : lambda_1 of the flowed lattice of f(x) < eps},
    compared against Ctilde eps^alpha nu(B)."""
    field = f.field

    def decide(ball):
        g = ball.generic_point()
        Y = LinearFormsY(field, 1, f.n, (f.image(g),))
        basis = apply_flow(tau(Y), t)
        try:
            return lambda1_lt(basis, -eps.s)
        except PrecisionExhausted:
            return None

    lhs = _scan_measure(B, decide, budget)
    nu_B = ball_measure(B)
    lnq = math.log(field.q)
    rhs_ln = econst_ln(Ctilde) + float(alpha) * (-eps.s) \
        + math.log(nu_B.count) - nu_B.depth * lnq
    if lhs.count == 0:
        margin = math.inf
        passed = True
    else:
        lhs_ln = math.log(lhs.count) - lhs.depth * lnq
        margin = rhs_ln - lhs_ln
        passed = margin >= -tol
    return {"t": str(t), "eps": str(eps), "ball": str(B),
            "lhs": str(lhs), "rhs_ln": rhs_ln, "margin": margin,
            "passed": passed}
