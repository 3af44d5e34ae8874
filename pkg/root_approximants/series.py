"""
Truncated series on a rational exponent grid.

A GeneralizedSeries holds the terms x^(lead + m*step) * (c_m + l_m ln x), m = 0..order.
Exponents are exact Fractions, coefficients are floats. Every operation keeps the
smallest truncation exponent of its operands; nothing is extended silently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .common import (
    BeyondTruncation, LogAtLead, LogOverflow, NonPositiveLead, OffGrid, ZeroPower,
)

Rational = Fraction
Power = Union[Fraction, int, float]


def frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    """gcd of two rationals: the largest r with a/r and b/r both integers."""
    a, b = abs(Fraction(a)), abs(Fraction(b))
    if a == 0:
        return b
    if b == 0:
        return a
    num = math.gcd(a.numerator * b.denominator, b.numerator * a.denominator)
    return Fraction(num, a.denominator * b.denominator)


@dataclass(frozen=True)
class GeneralizedSeries:
    lead: Fraction
    step: Fraction
    coeffs: Tuple[float, ...]
    logcoeffs: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "lead", Fraction(self.lead))
        object.__setattr__(self, "step", Fraction(self.step))
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if self.step <= 0:
            raise ValueError(f"series step must be positive, got {self.step}")
        if not self.coeffs:
            raise ValueError("series needs at least one coefficient")
        if self.logcoeffs is not None:
            logs = tuple(float(c) for c in self.logcoeffs)
            if len(logs) != len(self.coeffs):
                raise ValueError("logcoeffs and coeffs must have equal length")
            object.__setattr__(self, "logcoeffs", logs if any(logs) else None)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def trunc(self) -> Fraction:
        """Exponent of the last retained grid slot."""
        return self.lead + self.order * self.step

    @property
    def has_log(self) -> bool:
        return self.logcoeffs is not None

    def logs(self) -> Tuple[float, ...]:
        return self.logcoeffs if self.logcoeffs is not None else (0.0,) * len(self.coeffs)

    def exponents(self) -> list[Fraction]:
        return [self.lead + m * self.step for m in range(len(self.coeffs))]

    def terms(self) -> Iterable[Tuple[Fraction, int, float]]:
        """Nonzero (exponent, logpow, value) triples."""
        for e, c, l in zip(self.exponents(), self.coeffs, self.logs()):
            if c != 0.0:
                yield e, 0, c
            if l != 0.0:
                yield e, 1, l

    def __add__(self, other: "GeneralizedSeries") -> "GeneralizedSeries":
        return add(self, other)

    def __sub__(self, other: "GeneralizedSeries") -> "GeneralizedSeries":
        return sub(self, other)

    def __mul__(self, other):
        if isinstance(other, GeneralizedSeries):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__


# =========================
# Construction helpers
# =========================

def _slot(e: Fraction, lead: Fraction, step: Fraction) -> Optional[int]:
    idx = (Fraction(e) - lead) / step
    return int(idx) if idx.denominator == 1 else None


def from_terms(terms: Iterable[Tuple[Power, int, float]], step: Power, lead: Power,
               upto: Power) -> GeneralizedSeries:
    """
    Place (exponent, logpow, value) triples on the grid lead + m*step, keeping slots
    up to the largest grid exponent not above `upto`. Terms past `upto` are dropped.
    """
    step, lead, upto = Fraction(step), Fraction(lead), Fraction(upto)
    n = max(int(math.floor((upto - lead) / step)), 0) + 1
    c = np.zeros(n)
    l = np.zeros(n)
    for e, logpow, value in terms:
        e = Fraction(e)
        if e > upto:
            continue
        m = _slot(e, lead, step)
        if m is None or m < 0:
            raise OffGrid(f"exponent {e} is not on the grid {lead} + m*{step}")
        if logpow == 0:
            c[m] += value
        elif logpow == 1:
            l[m] += value
        else:
            raise LogOverflow(f"log power {logpow} is not supported")
    return GeneralizedSeries(lead, step, tuple(c), tuple(l))


def monomial(coef: float, exp: Power, step: Power, upto: Power,
             lead: Optional[Power] = None) -> GeneralizedSeries:
    """coef * x^exp, padded with explicit zeros up to `upto`."""
    return from_terms([(exp, 0, coef)], step, exp if lead is None else lead, upto)


def constant(value: float, step: Power, upto: Power) -> GeneralizedSeries:
    return monomial(value, 0, step, upto)


def truncate(s: GeneralizedSeries, upto: Power) -> GeneralizedSeries:
    upto = Fraction(upto)
    if upto >= s.trunc:
        return s
    keep = int(math.floor((upto - s.lead) / s.step)) + 1
    if keep < 1:
        raise BeyondTruncation(f"truncation at {upto} removes the leading term {s.lead}")
    logs = None if s.logcoeffs is None else s.logcoeffs[:keep]
    return GeneralizedSeries(s.lead, s.step, s.coeffs[:keep], logs)


def shift(s: GeneralizedSeries, e: Power) -> GeneralizedSeries:
    """Multiply by x^e."""
    return GeneralizedSeries(s.lead + Fraction(e), s.step, s.coeffs, s.logcoeffs)


def scale(s: GeneralizedSeries, c: float) -> GeneralizedSeries:
    logs = None if s.logcoeffs is None else tuple(c * v for v in s.logcoeffs)
    return GeneralizedSeries(s.lead, s.step, tuple(c * v for v in s.coeffs), logs)


def normalize(s: GeneralizedSeries) -> GeneralizedSeries:
    """Drop exactly-zero leading slots (both plain and log parts)."""
    logs = s.logs()
    m = 0
    while m < s.order and s.coeffs[m] == 0.0 and logs[m] == 0.0:
        m += 1
    if m == 0:
        return s
    tail_logs = None if s.logcoeffs is None else s.logcoeffs[m:]
    return GeneralizedSeries(s.lead + m * s.step, s.step, s.coeffs[m:], tail_logs)


def regrid(s: GeneralizedSeries, step: Power, lead: Optional[Power] = None,
           upto: Optional[Power] = None) -> GeneralizedSeries:
    """Re-express s on a finer grid (and optionally a lower lead / lower truncation)."""
    step = Fraction(step)
    lead = s.lead if lead is None else Fraction(lead)
    upto = s.trunc if upto is None else min(Fraction(upto), s.trunc)
    if lead > s.lead:
        raise ValueError("regrid cannot raise the leading exponent")
    return from_terms(s.terms(), step, lead, upto)


def value_at(s: GeneralizedSeries, x: float) -> float:
    """Partial sum of the retained terms at x > 0."""
    lnx = math.log(x)
    total = 0.0
    for e, c, l in zip(s.exponents(), s.coeffs, s.logs()):
        xe = x ** float(e)
        total += c * xe + l * xe * lnx
    return total


# =========================
# Grid alignment
# =========================

def common_step(*series: GeneralizedSeries) -> Fraction:
    h = Fraction(0)
    base = series[0].lead
    for s in series:
        h = frac_gcd(h, s.step)
        h = frac_gcd(h, s.lead - base)
    return h


def align(s1: GeneralizedSeries, s2: GeneralizedSeries) -> Tuple[GeneralizedSeries, GeneralizedSeries]:
    """
    Put both series on a common grid: lead = min of leads, step = gcd of the steps
    (and of the lead offset), truncation = min of the truncation exponents.
    """
    if s1.lead == s2.lead and s1.step == s2.step and s1.order == s2.order:
        return s1, s2
    h = common_step(s1, s2)
    lead = min(s1.lead, s2.lead)
    upto = min(s1.trunc, s2.trunc)
    if upto < lead:
        upto = lead
    return from_terms(s1.terms(), h, lead, upto), from_terms(s2.terms(), h, lead, upto)


# =========================
# Ring operations
# =========================

def _combine(s1: GeneralizedSeries, s2: GeneralizedSeries, sign: float) -> GeneralizedSeries:
    a, b = align(s1, s2)
    c = np.asarray(a.coeffs) + sign * np.asarray(b.coeffs)
    l = np.asarray(a.logs()) + sign * np.asarray(b.logs())
    return GeneralizedSeries(a.lead, a.step, tuple(c), tuple(l))


def add(s1: GeneralizedSeries, s2: GeneralizedSeries) -> GeneralizedSeries:
    return _combine(s1, s2, 1.0)


def sub(s1: GeneralizedSeries, s2: GeneralizedSeries) -> GeneralizedSeries:
    return _combine(s1, s2, -1.0)


def mul(s1: GeneralizedSeries, s2: GeneralizedSeries) -> GeneralizedSeries:
    """
    Truncated Cauchy product. The result keeps as many relative orders as the
    shorter operand; a ln^2 term inside that window raises LogOverflow.
    """
    h = frac_gcd(s1.step, s2.step)
    a = regrid(s1, h)
    b = regrid(s2, h)
    n = min(a.order, b.order) + 1
    ca, cb = np.asarray(a.coeffs[:n]), np.asarray(b.coeffs[:n])
    la, lb = np.asarray(a.logs()[:n]), np.asarray(b.logs()[:n])

    c = np.convolve(ca, cb)[:n]
    l = (np.convolve(ca, lb) + np.convolve(la, cb))[:n]
    if a.has_log and b.has_log:
        ll = np.convolve(la, lb)[:n]
        if np.any(ll != 0.0):
            m = int(np.flatnonzero(ll)[0])
            raise LogOverflow(
                f"ln^2 term needed at exponent {a.lead + b.lead + m * h} within the retained order"
            )
    return GeneralizedSeries(a.lead + b.lead, h, tuple(c), tuple(l))


def _as_power(p: Power) -> Union[Fraction, float]:
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    return float(p)


def powr(s: GeneralizedSeries, p: Power) -> GeneralizedSeries:
    """
    s**p = c0^p x^(p*lead) (1 + w)^p, expanded by the generalized binomial series
    through the retained relative order.
    """
    p = _as_power(p)
    if p == 1:
        return s
    logs = s.logs()
    if logs[0] != 0.0:
        raise LogAtLead(f"log term sits at the leading exponent {s.lead}")
    c0 = s.coeffs[0]
    if not c0 > 0.0:
        raise NonPositiveLead(f"leading coefficient {c0!r} at x^{s.lead} is not positive")
    if isinstance(p, float):
        if s.lead != 0:
            raise ValueError("real (non-rational) powers need a series with lead 0")
        new_lead = Fraction(0)
    else:
        new_lead = p * s.lead

    K = s.order
    w = GeneralizedSeries(
        0, s.step,
        (0.0,) + tuple(c / c0 for c in s.coeffs[1:]),
        tuple(l / c0 for l in logs),
    )
    total_c = np.zeros(K + 1)
    total_l = np.zeros(K + 1)
    total_c[0] = 1.0

    # non-negative integer powers terminate
    nmax = K
    if not isinstance(p, float) and p.denominator == 1 and p >= 0:
        nmax = min(K, int(p))

    binom = 1.0
    wn = constant(1.0, s.step, K * s.step)
    for n in range(1, nmax + 1):
        binom *= (float(p) - n + 1) / n
        wn = mul(wn, w)
        if binom == 0.0:
            break
        total_c += binom * np.asarray(wn.coeffs)
        total_l += binom * np.asarray(wn.logs())
    amp = c0 ** float(p)
    return GeneralizedSeries(new_lead, s.step, tuple(amp * total_c), tuple(amp * total_l))


# =========================
# Special series
# =========================

def log1p_series(order: int, step: Power = 1, at_infinity: bool = False) -> GeneralizedSeries:
    """
    ln(1 + u^step) through u^(order*step).

    at_infinity=True returns the same function as a series in t = 1/u:
    -step*ln t + sum (-1)^(m+1) t^(m*step)/m.
    """
    if order < 1:
        raise ValueError("log1p_series needs order >= 1")
    step = Fraction(step)
    c = [0.0] + [(-1.0) ** (m + 1) / m for m in range(1, order + 1)]
    logs = None
    if at_infinity:
        logs = [-float(step)] + [0.0] * order
    return GeneralizedSeries(0, step, tuple(c), None if logs is None else tuple(logs))


def reframe_reciprocal(s: GeneralizedSeries, s_pow: Power) -> GeneralizedSeries:
    """
    Re-express s in t = 1/x^s_pow: x^e -> t^(-e/s_pow), ln x -> -(1/s_pow) ln t.
    reframe_reciprocal(reframe_reciprocal(s, p), 1/p) restores s.
    """
    s_pow = Fraction(s_pow)
    if s_pow == 0:
        raise ZeroPower("reframe_reciprocal needs a nonzero power")
    new_step = s.step / abs(s_pow)
    exps = [-e / s_pow for e in s.exponents()]
    lf = -1.0 / float(s_pow)
    coeffs, logs = list(s.coeffs), [lf * l for l in s.logs()]
    if s_pow > 0:
        exps.reverse()
        coeffs.reverse()
        logs.reverse()
    return GeneralizedSeries(exps[0], new_step, tuple(coeffs), tuple(logs))


# =========================
# Coefficient access
# =========================

def coeff(s: GeneralizedSeries, e: Power, logpow: int = 0) -> float:
    e = Fraction(e)
    m = _slot(e, s.lead, s.step)
    if m is None:
        raise OffGrid(f"exponent {e} is not on the grid {s.lead} + m*{s.step}")
    if e > s.trunc:
        raise BeyondTruncation(f"exponent {e} lies beyond the truncation {s.trunc}")
    if m < 0:
        return 0.0
    if logpow == 0:
        return s.coeffs[m]
    if logpow == 1:
        return s.logs()[m]
    raise ValueError(f"log power must be 0 or 1, got {logpow}")


def leading(s: GeneralizedSeries) -> Tuple[Fraction, float]:
    """(exponent, coefficient) of the first nonzero plain slot."""
    n = normalize(s)
    return n.lead, n.coeffs[0]


def from_coefficients(coeffs: Sequence[float], step: Power = 1, lead: Power = 0,
                      logcoeffs: Optional[Sequence[float]] = None) -> GeneralizedSeries:
    return GeneralizedSeries(Fraction(lead), Fraction(step), tuple(coeffs),
                             None if logcoeffs is None else tuple(logcoeffs))
