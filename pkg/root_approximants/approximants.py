"""
Self-similar root approximants and additive approximants.

A nest of depth k in the build variable u reads

    f*(u) = f0(u) * P_k(u),   P_0 = 1,   P_j = (P_{j-1} + A_j u^{e_j} [ln(1 + u^{q_j})])^{n_j}

where f0 = prefactor_amp * u^prefactor_pow. Expansion at infinity is done in t = 1/u.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .common import (
    DegeneratePivot, LogAtLead, NegativeBase, NonPositiveLead, ZeroOuter, fmt_rational,
)
from .series import (
    GeneralizedSeries, add, constant, frac_gcd, from_terms, monomial, normalize, powr,
    scale, truncate,
)

Term = Tuple[Fraction, int, float]  # (exponent, logpow, value)


class Side(str, Enum):
    ZERO = "zero"
    INFINITY = "inf"


@dataclass(frozen=True)
class MatchCondition:
    """
    One matching requirement on the ratio f*/f0.

    ZERO: coefficient of u^exponent [ln u] of the ratio series equals target.
    INFINITY, exponent 0: leading amplitude of the ratio equals target (B/A).
    INFINITY, exponent e > 0: coefficient at t^(lead+e), divided by the amplitude.
    """
    side: Side
    exponent: Fraction
    logpow: int = 0
    target: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        if self.exponent < 0:
            raise ValueError(f"condition exponent must be >= 0, got {self.exponent}")
        if self.logpow not in (0, 1):
            raise ValueError(f"condition logpow must be 0 or 1, got {self.logpow}")

    @property
    def is_amplitude(self) -> bool:
        return self.side is Side.INFINITY and self.exponent == 0 and self.logpow == 0

    def sort_key(self) -> Tuple[int, Fraction, int]:
        # small side first; within one power the log term counts as the lower order
        return (0 if self.side is Side.ZERO else 1, self.exponent, -self.logpow)

    def label(self) -> str:
        return f"{self.side.value}:{fmt_rational(self.exponent)}{'L' if self.logpow else ''}"


def _check_terms(terms: Sequence[Term], what: str, step: Optional[Fraction] = None) -> Tuple[Term, ...]:
    out = tuple((Fraction(e), int(lp), float(v)) for e, lp, v in terms)
    keys = [(e, -lp) for e, lp, _ in out]
    if any(b <= a for a, b in zip(keys, keys[1:])):
        raise ValueError(f"{what} exponents must be strictly increasing")
    for e, lp, _ in out:
        if e <= 0:
            raise ValueError(f"{what} exponents must be positive, got {e}")
        if step is not None and (e / step).denominator != 1:
            raise ValueError(f"{what} exponent {e} is not on the grid of step {step}")
    return out


@dataclass(frozen=True)
class AsymptoticCase:
    """
    Asymptotic data in ratio form:
      u -> 0:   f ~ small_amp u^small_pow (1 + sum a u^e [ln u])
      u -> oo:  f ~ large_amp u^large_pow (1 + sum b t^e [ln t]),  t = 1/u
    """
    small_amp: float
    small_pow: Fraction
    small_step: Fraction
    small_coeffs: Tuple[Term, ...]
    large_amp: Optional[float] = None
    large_pow: Optional[Fraction] = None
    large_coeffs: Tuple[Term, ...] = ()
    variable_note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "small_pow", Fraction(self.small_pow))
        object.__setattr__(self, "small_step", Fraction(self.small_step))
        object.__setattr__(self, "small_coeffs",
                           _check_terms(self.small_coeffs, "small_coeffs", self.small_step))
        if self.large_pow is not None:
            object.__setattr__(self, "large_pow", Fraction(self.large_pow))
        object.__setattr__(self, "large_coeffs", _check_terms(self.large_coeffs, "large_coeffs"))
        if self.small_amp == 0:
            raise ValueError("small_amp must be nonzero")

    @property
    def has_large(self) -> bool:
        return self.large_amp is not None and self.large_pow is not None

    @property
    def total_pow(self) -> Fraction:
        if self.large_pow is None:
            raise ValueError("case has no large-variable power")
        return self.large_pow - self.small_pow

    @property
    def amplitude_ratio(self) -> float:
        if self.large_amp is None:
            raise ValueError("case has no large-variable amplitude")
        return self.large_amp / self.small_amp

    def target(self, side: Side, exponent: Fraction, logpow: int = 0) -> float:
        side, exponent = Side(side), Fraction(exponent)
        if side is Side.INFINITY and exponent == 0 and logpow == 0:
            return self.amplitude_ratio
        table = self.small_coeffs if side is Side.ZERO else self.large_coeffs
        for e, lp, v in table:
            if e == exponent and lp == logpow:
                return v
        if side is Side.ZERO and logpow == 0 and (exponent / self.small_step).denominator == 1:
            last = self.small_coeffs[-1][0] if self.small_coeffs else Fraction(0)
            if 0 < exponent <= last:
                return 0.0
        raise KeyError(f"case has no {side.value}-side coefficient at exponent {exponent}"
                       f"{' (log)' if logpow else ''}")

    def condition(self, side: Side, exponent, logpow: int = 0) -> MatchCondition:
        return MatchCondition(Side(side), Fraction(exponent), logpow, self.target(side, exponent, logpow))

    def small_conditions(self, count: int) -> List[MatchCondition]:
        """First `count` grid orders of the small side (gaps count as zero targets)."""
        return [self.condition(Side.ZERO, m * self.small_step) for m in range(1, count + 1)]


@dataclass(frozen=True)
class Offset:
    """Closed-form term amp * u^pow added outside the nest."""
    amp: float
    pow: Fraction

    def __call__(self, u: float) -> float:
        if u == 0.0 and self.pow < 0:
            return math.copysign(math.inf, self.amp)
        return self.amp * u ** float(self.pow)


@dataclass(frozen=True)
class NestSpec:
    term_exps: Tuple[Fraction, ...]
    level_pows: Tuple[Fraction, ...]
    log_slots: Tuple[Tuple[int, Fraction], ...] = ()  # (1-based level, q)
    prefactor_amp: float = 1.0
    prefactor_pow: Fraction = Fraction(0)
    additive_offset: Optional[Offset] = None

    def __post_init__(self):
        exps = tuple(Fraction(e) for e in self.term_exps)
        pows = tuple(Fraction(n) for n in self.level_pows)
        slots = tuple(sorted((int(j), Fraction(q)) for j, q in dict(self.log_slots).items()))
        object.__setattr__(self, "term_exps", exps)
        object.__setattr__(self, "level_pows", pows)
        object.__setattr__(self, "log_slots", slots)
        object.__setattr__(self, "prefactor_pow", Fraction(self.prefactor_pow))
        if not exps or len(exps) != len(pows):
            raise ValueError("term_exps and level_pows must be nonempty and of equal length")
        if pows[-1] == 0:
            raise ZeroOuter("outer power of the nest is zero")
        for i in range(1, len(exps)):
            if exps[i] < exps[i - 1]:
                raise ValueError("term_exps must be non-decreasing")
            if exps[i] == exps[i - 1] and self.log_q(i) is None and self.log_q(i - 1) is None:
                raise ValueError(f"repeated term exponent {exps[i]} needs a log slot")
        for j, q in slots:
            if not 1 <= j <= len(exps) or q <= 0:
                raise ValueError(f"bad log slot {j}:{q}")

    @property
    def k(self) -> int:
        return len(self.term_exps)

    def log_q(self, j: int) -> Optional[Fraction]:
        """q of the 0-based level j when it is a log slot."""
        for idx, q in self.log_slots:
            if idx == j + 1:
                return q
        return None

    @property
    def step(self) -> Fraction:
        h = Fraction(0)
        for e in self.term_exps:
            h = frac_gcd(h, e)
        for _, q in self.log_slots:
            h = frac_gcd(h, q)
        return h

    @property
    def growth(self) -> Fraction:
        """Exponent of the leading growth of P_k at infinity (ratio power)."""
        g = Fraction(0)
        for j, (e, n) in enumerate(zip(self.term_exps, self.level_pows)):
            if e > g and self.log_q(j) is None:
                g = e
            g = g * n
        return g

    def with_prefactor(self, amp: float, pow: Fraction) -> "NestSpec":
        return replace(self, prefactor_amp=float(amp), prefactor_pow=Fraction(pow))

    def describe(self) -> str:
        parts = []
        for j, (e, n) in enumerate(zip(self.term_exps, self.level_pows)):
            q = self.log_q(j)
            term = f"A{j + 1} u^{fmt_rational(e)}" + (f" ln(1+u^{fmt_rational(q)})" if q else "")
            parts.append(f"[{term}]^{fmt_rational(n)}")
        return " -> ".join(parts)


@dataclass(frozen=True)
class RootApproximant:
    spec: NestSpec
    params: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(a) for a in self.params))
        if len(self.params) != self.spec.k:
            raise ValueError(f"expected {self.spec.k} parameters, got {len(self.params)}")

    def __call__(self, u: float) -> float:
        return evaluate(self, u)

    def expand_at_zero(self, order) -> GeneralizedSeries:
        return expand_at_zero(self, order)

    def expand_at_infinity(self, order) -> GeneralizedSeries:
        return expand_at_infinity(self, order)

    def amplitude(self) -> float:
        return amplitude_at_infinity(self)


# =========================
# Schedule
# =========================

def standard_schedule(k: int, sigma=1, step=1, total_pow=None) -> NestSpec:
    """
    term_exps = (step, ..., k*step); n_j = (j + sigma)/j for j < k and
    n_k = total_pow/(k*step), so the nest grows as u^total_pow at infinity.
    """
    if k < 1:
        raise ValueError("nest depth k must be >= 1")
    sigma, step = Fraction(sigma), Fraction(step)
    if step <= 0:
        raise ValueError("schedule step must be positive")
    if total_pow is None or Fraction(total_pow) == 0:
        raise ZeroOuter("total power beta - alpha is zero; the outer power degenerates")
    exps = tuple(j * step for j in range(1, k + 1))
    pows = tuple((j + sigma) / j for j in range(1, k)) + (Fraction(total_pow) / (k * step),)
    return NestSpec(exps, pows)


def _unpack(r, params=None) -> Tuple[NestSpec, Tuple[float, ...]]:
    if isinstance(r, RootApproximant):
        return r.spec, r.params
    if params is None:
        raise TypeError("pass a RootApproximant or (NestSpec, params)")
    return r, tuple(float(a) for a in params)


# =========================
# Expansion
# =========================

def expand_at_zero(r, order, params=None) -> GeneralizedSeries:
    """Ratio series P_k(u) through u^order (prefactor and offset excluded)."""
    spec, A = _unpack(r, params)
    order = Fraction(order)
    h = spec.step
    P = constant(1.0, h, order)
    for j, (e, n) in enumerate(zip(spec.term_exps, spec.level_pows)):
        q = spec.log_q(j)
        if e <= order and A[j] != 0.0:
            if q is None:
                term = monomial(A[j], e, h, order, lead=0)
            else:
                items = []
                m = 1
                while e + m * q <= order:
                    items.append((e + m * q, 0, A[j] * (-1.0) ** (m + 1) / m))
                    m += 1
                term = from_terms(items, h, 0, order)
            P = add(P, term)
        P = powr(P, n)
    return P


def _infinity_term(a: float, e: Fraction, q: Optional[Fraction], step: Fraction,
                   lead: Fraction, upto: Fraction) -> Optional[GeneralizedSeries]:
    """A u^e [ln(1+u^q)] written in t = 1/u on the grid starting at `lead`."""
    if a == 0.0 or -e > upto:
        return None
    step = frac_gcd(step, -e - lead)
    if q is None:
        return monomial(a, -e, step, upto, lead=lead)
    items: List[Term] = [(-e, 1, -float(q) * a)]
    m = 1
    while -e + m * q <= upto:
        items.append((-e + m * q, 0, a * (-1.0) ** (m + 1) / m))
        m += 1
    return from_terms(items, frac_gcd(step, q), lead, upto)


def expand_at_infinity(r, order, params=None) -> GeneralizedSeries:
    """
    Ratio P_k as a series in t = 1/u, carrying `order` relative orders past its
    leading term. Each level factors out its dominant term before the binomial step.
    """
    spec, A = _unpack(r, params)
    E = Fraction(order)
    P = constant(1.0, spec.step, E)
    for j, (e, n) in enumerate(zip(spec.term_exps, spec.level_pows)):
        q = spec.log_q(j)
        P = normalize(P)
        lead = P.lead
        if A[j] != 0.0 and -e < lead:
            lead = -e
        upto = lead + E
        term = _infinity_term(A[j], e, q, P.step, lead, upto)
        if P.lead > upto:
            base = term
        elif term is None:
            base = truncate(P, upto)
        else:
            base = add(truncate(P, upto), term)
        base = normalize(base)
        try:
            P = powr(base, n)
        except NonPositiveLead as err:
            raise NonPositiveLead(f"level {j + 1}: {err}") from err
    return normalize(P)


def amplitude_at_infinity(r, params=None) -> float:
    """Closed-form leading amplitude of the ratio at infinity."""
    spec, A = _unpack(r, params)
    return _partial_amplitude(spec, A, spec.k)[1]


def _partial_amplitude(spec: NestSpec, A: Sequence[float], levels: int) -> Tuple[Fraction, float]:
    """(growth exponent, amplitude) of P_levels at infinity."""
    g, D = Fraction(0), 1.0
    for j in range(levels):
        e, n, a = spec.term_exps[j], spec.level_pows[j], A[j]
        q = spec.log_q(j)
        if a != 0.0 and e > g:
            if q is not None:
                raise LogAtLead(f"level {j + 1}: log term dominates at infinity")
            base, gb = a, e
        elif a != 0.0 and e == g:
            if q is not None:
                raise LogAtLead(f"level {j + 1}: log term ties the leading power")
            base, gb = D + a, g
        else:
            base, gb = D, g
        if n == 1:
            # plain addition; a later dominant term may still take over
            D = base
        elif not base > 0.0:
            raise NonPositiveLead(f"level {j + 1}: dominant amplitude {base!r} is not positive")
        else:
            D = base ** float(n)
        g = gb * n
    return g, D


def outer_pivot(spec: NestSpec, A: Sequence[float], target: float) -> float:
    """
    Value of A_k for which the leading amplitude at infinity equals `target`,
    holding A_1..A_{k-1} fixed.
    """
    k = spec.k
    if spec.log_q(k - 1) is not None:
        raise DegeneratePivot("outer level is a log slot; the amplitude does not fix it")
    g, D = _partial_amplitude(spec, A, k - 1)
    e, n = spec.term_exps[-1], spec.level_pows[-1]
    if not target > 0.0:
        raise NonPositiveLead(f"amplitude target {target!r} is not positive")
    base = target ** (1.0 / float(n))
    if e > g:
        return base
    if e == g:
        return base - D
    raise DegeneratePivot(f"outer term u^{e} is subdominant to u^{g}; amplitude does not fix A_{k}")


# =========================
# Evaluation
# =========================

def nest_value(spec: NestSpec, A: Sequence[float], u: float) -> float:
    """P_k(u), innermost level first."""
    P = 1.0
    for j, (e, n) in enumerate(zip(spec.term_exps, spec.level_pows)):
        term = A[j] * u ** float(e)
        q = spec.log_q(j)
        if q is not None:
            term *= math.log1p(u ** float(q))
        base = P + term
        if not base > 0.0:
            raise NegativeBase(f"nest level {j + 1} has base {base!r} at u={u:.6g}", level=j + 1, x=u)
        P = base ** float(n)
    return P


def evaluate(r, u: float, params=None) -> float:
    spec, A = _unpack(r, params)
    u = float(u)
    if u < 0.0:
        raise ValueError(f"evaluate needs u >= 0, got {u}")
    P = nest_value(spec, A, u)
    pp = spec.prefactor_pow
    if u == 0.0 and pp < 0:
        f0 = math.copysign(math.inf, spec.prefactor_amp)
    else:
        f0 = spec.prefactor_amp * u ** float(pp)
    value = f0 * P
    if spec.additive_offset is not None:
        value += spec.additive_offset(u)
    return value


# =========================
# Additive approximants
# =========================

@dataclass(frozen=True)
class AdditiveApproximant:
    """sum_i A_i (1 + B_i x)^n_i"""
    terms: Tuple[Tuple[float, float, Fraction], ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "terms",
                           tuple((float(a), float(b), Fraction(n)) for a, b, n in self.terms))

    def __call__(self, x: float) -> float:
        return evaluate_additive(self, x)


def evaluate_additive(a: AdditiveApproximant, x: float) -> float:
    total = 0.0
    for i, (A, B, n) in enumerate(a.terms):
        base = 1.0 + B * x
        if not base > 0.0:
            raise NegativeBase(f"additive term {i + 1} has base {base!r} at x={x:.6g}", level=i + 1, x=x)
        total += A * base ** float(n)
    return total


def expand_additive(a: AdditiveApproximant, side: Side, order) -> GeneralizedSeries:
    """
    Side.ZERO: series in x through x^order.
    Side.INFINITY: series in t = 1/x, each term carried `order` orders past its lead.
    """
    side, order = Side(side), Fraction(order)
    total: Optional[GeneralizedSeries] = None
    for A, B, n in a.terms:
        if side is Side.ZERO:
            s = powr(from_terms([(0, 0, 1.0), (1, 0, B)], 1, 0, order), n)
        else:
            s = powr(from_terms([(-1, 0, B), (0, 0, 1.0)], 1, -1, order - 1), n)
        s = scale(s, A)
        total = s if total is None else add(total, s)
    if total is None:
        raise ValueError("additive approximant has no terms")
    return total

