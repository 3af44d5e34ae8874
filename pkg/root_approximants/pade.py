"""
Padé and two-point Padé baselines.

A PadeApproximant is P(y)/Q(y) in the build variable y = x^var_pow, times x^shift_pow.
Q has constant term 1.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, optimize

from .common import InconsistentPowers, OffGrid, PoleAt, SingularSystem
from .oracles import ErrorReport, ScanGrid, error_scan
from .series import GeneralizedSeries, from_coefficients, from_terms, mul, powr

PIVOT_EPS = 1e-12
POLE_EPS = 1e-14


@dataclass(frozen=True)
class PadeApproximant:
    num_coeffs: Tuple[float, ...]
    den_coeffs: Tuple[float, ...]
    var_pow: Fraction = Fraction(1)
    shift_pow: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "num_coeffs", tuple(float(c) for c in self.num_coeffs))
        object.__setattr__(self, "den_coeffs", tuple(float(c) for c in self.den_coeffs))
        object.__setattr__(self, "var_pow", Fraction(self.var_pow))
        object.__setattr__(self, "shift_pow", Fraction(self.shift_pow))
        if not self.den_coeffs or self.den_coeffs[0] != 1.0:
            raise ValueError("denominator constant term must be 1")
        if self.var_pow <= 0:
            raise ValueError("var_pow must be positive")

    @property
    def M(self) -> int:
        return len(self.num_coeffs) - 1

    @property
    def N(self) -> int:
        return len(self.den_coeffs) - 1

    @property
    def name(self) -> str:
        return f"P{self.M}/{self.N}"

    def __call__(self, x: float) -> float:
        return evaluate_pade(self, x)


# =========================
# Linear algebra
# =========================

def solve_linear(A: np.ndarray, b: np.ndarray, pivot_eps: float = PIVOT_EPS) -> np.ndarray:
    """LU solve; a diagonal entry of U below pivot_eps * max|A| raises SingularSystem."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if b.size == 0:
        return np.zeros(0)
    scale = max(float(np.max(np.abs(A))), 1e-300)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        lu, piv = linalg.lu_factor(A)
    diag = np.abs(np.diag(lu))
    k = int(np.argmin(diag))
    if diag[k] <= pivot_eps * scale:
        raise SingularSystem(f"pivot {diag[k]:.3g} in column {k} below threshold")
    return linalg.lu_solve((lu, piv), b)


# =========================
# Input series
# =========================

def _integer_coeffs(s: GeneralizedSeries, lead: int, count: int, what: str) -> np.ndarray:
    """count coefficients of s on the integer grid starting at `lead`."""
    if s.has_log:
        raise InconsistentPowers(f"{what} series carries log terms")
    if s.lead < lead:
        raise InconsistentPowers(f"{what} series starts at {s.lead}, below {lead}")
    try:
        g = from_terms(s.terms(), 1, lead, s.trunc)
    except OffGrid as e:
        raise InconsistentPowers(f"{what} series is not on an integer grid of the build variable") from e
    if count and g.trunc < lead + count - 1:
        raise ValueError(f"{what} series supplies {g.order + 1} coefficients, {count} needed")
    out = np.zeros(count)
    n = min(count, g.order + 1)
    out[:n] = g.coeffs[:n]
    return out


# =========================
# Construction
# =========================

def pade_from_series(s: GeneralizedSeries, M: int, N: int, var_pow=1, shift_pow=0) -> PadeApproximant:
    """Accuracy through order M+N: denominator from the Toeplitz block, then numerator."""
    c = _integer_coeffs(s, 0, M + N + 1, "small")
    if N:
        A = np.array([[c[i - j] if i - j >= 0 else 0.0 for j in range(1, N + 1)]
                      for i in range(M + 1, M + N + 1)])
        q = np.concatenate([[1.0], solve_linear(A, -c[M + 1:M + N + 1])])
    else:
        q = np.array([1.0])
    p = [sum(q[j] * c[i - j] for j in range(min(i, N) + 1)) for i in range(M + 1)]
    return PadeApproximant(tuple(p), tuple(q), var_pow, shift_pow)


def two_point_pade(small: GeneralizedSeries, large: Optional[GeneralizedSeries], M: int, N: int,
                   split: Tuple[int, int], var_pow=1, shift_pow=0) -> PadeApproximant:
    """
    p conditions from the expansion at y = 0 and q from the expansion at infinity.
    `large` is a series in tau = 1/y whose leading exponent must be N - M.
    Unknowns are ordered (p_0..p_M, q_1..q_N).
    """
    p_cnt, q_cnt = split
    if p_cnt + q_cnt != M + N + 1 or p_cnt < 0 or q_cnt < 0:
        raise ValueError(f"split {split} does not add up to M+N+1 = {M + N + 1}")
    c = _integer_coeffs(small, 0, p_cnt, "small") if p_cnt else np.zeros(0)
    d = np.zeros(0)
    if q_cnt:
        if large is None:
            raise ValueError("large-side conditions need a large series")
        L = large.lead
        if L.denominator != 1 or L != N - M:
            raise InconsistentPowers(
                f"large-side power {-L} does not match the degree difference {M - N}")
        d = _integer_coeffs(large, int(L), q_cnt, "large")

    n = M + N + 1
    A = np.zeros((n, n))
    b = np.zeros(n)
    row = 0
    for i in range(p_cnt):
        for j in range(1, N + 1):
            if i - j >= 0:
                A[row, M + j] = c[i - j]
        if i <= M:
            A[row, i] = -1.0
        b[row] = -c[i]
        row += 1
    for r in range(q_cnt):
        e = -M + r  # tau exponent
        for j in range(1, N + 1):
            m = r - N + j
            if 0 <= m < q_cnt:
                A[row, M + j] = d[m]
        if 0 <= -e <= M:
            A[row, -e] = -1.0
        m0 = r - N
        b[row] = -d[m0] if 0 <= m0 < q_cnt else 0.0
        row += 1

    x = solve_linear(A, b)
    return PadeApproximant(tuple(x[:M + 1]), (1.0, *x[M + 1:]), var_pow, shift_pow)


# =========================
# Evaluation
# =========================

def _build_var(p: PadeApproximant, x: float) -> float:
    if x < 0:
        raise ValueError("Padé evaluation needs x >= 0")
    return x ** float(p.var_pow)


def _shift(p: PadeApproximant, x: float) -> float:
    if p.shift_pow == 0:
        return 1.0
    if x == 0.0 and p.shift_pow < 0:
        return math.inf
    return x ** float(p.shift_pow)


def evaluate_pade(p: PadeApproximant, x: float) -> float:
    """Horner evaluation of P and Q."""
    y = _build_var(p, x)
    num = np.polynomial.polynomial.polyval(y, p.num_coeffs)
    den = np.polynomial.polynomial.polyval(y, p.den_coeffs)
    size = sum(abs(q) * y ** j for j, q in enumerate(p.den_coeffs))
    if abs(den) <= POLE_EPS * size:
        raise PoleAt(x)
    return float(num / den) * _shift(p, x)


def evaluate_pade_direct(p: PadeApproximant, x: float) -> float:
    """Term-by-term power sums; cross-check for evaluate_pade."""
    y = _build_var(p, x)
    num = math.fsum(c * y ** i for i, c in enumerate(p.num_coeffs))
    den = math.fsum(c * y ** i for i, c in enumerate(p.den_coeffs))
    if den == 0.0:
        raise PoleAt(x)
    return num / den * _shift(p, x)


def poles_on_ray(p: PadeApproximant, xmax: float, samples: int = 4000) -> List[float]:
    """Real zeros of Q in (0, xmax], by sign scan and bisection to 1e-10."""
    ymax = xmax ** float(p.var_pow)
    Q = np.polynomial.Polynomial(p.den_coeffs)
    ys = np.linspace(0.0, ymax, samples + 1)
    vals = Q(ys)
    roots: List[float] = []
    for y0, y1, v0, v1 in zip(ys[:-1], ys[1:], vals[:-1], vals[1:]):
        if v1 == 0.0 and y1 > 0:
            roots.append(float(y1))
        elif v0 * v1 < 0:
            roots.append(float(optimize.bisect(Q, y0, y1, xtol=1e-10)))
    inv = 1.0 / float(p.var_pow)
    return [y ** inv for y in roots]


def expand_pade(p: PadeApproximant, at_infinity: bool, order: int) -> GeneralizedSeries:
    """
    Series of P/Q in the build variable: in y through y^order, or in tau = 1/y
    carrying `order` orders past the leading term. x^shift_pow is left out.
    """
    num, den = list(p.num_coeffs), list(p.den_coeffs)
    if not at_infinity:
        P = from_coefficients(num + [0.0] * max(0, order + 1 - len(num)))
        Q = from_coefficients(den + [0.0] * max(0, order + 1 - len(den)))
        P = from_terms(P.terms(), 1, 0, order)
        Q = from_terms(Q.terms(), 1, 0, order)
        return mul(P, powr(Q, -1))
    while len(den) > 1 and den[-1] == 0.0:
        den.pop()
    while len(num) > 1 and num[-1] == 0.0:
        num.pop()
    M, N = len(num) - 1, len(den) - 1
    sign = 1.0 if den[-1] > 0 else -1.0
    P = from_terms([(-i, 0, sign * c) for i, c in enumerate(num)], 1, -M, -M + order)
    Q = from_terms([(-j, 0, sign * c) for j, c in enumerate(den)], 1, -N, -N + order)
    return mul(P, powr(Q, -1))


def best_pade(candidates: Sequence[PadeApproximant], oracle: Callable[[float], float],
              grid: ScanGrid) -> Optional[Tuple[PadeApproximant, ErrorReport]]:
    """Pole-free candidate with the smallest max relative error on the grid."""
    best: Optional[Tuple[PadeApproximant, ErrorReport]] = None
    for cand in candidates:
        if poles_on_ray(cand, grid.hi):
            continue
        rep = error_scan(cand, oracle, grid)
        if best is None or rep.max_rel_err < best[1].max_rel_err:
            best = (cand, rep)
    return best


def pade_table(s: GeneralizedSeries, order: int, var_pow=1, shift_pow=0) -> List[PadeApproximant]:
    """All P_{M/N} with M+N+1 = order that can be built from s."""
    out = []
    for N in range(order):
        M = order - 1 - N
        try:
            out.append(pade_from_series(s, M, N, var_pow, shift_pow))
        except SingularSystem:
            continue
    return out
