"""
Reference functions and error scans.

Quadrature-backed oracles go through quad_adaptive (vectorized Gauss-Kronrod 7/15
with bisection of the worst interval); closed forms use scipy.special directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import special

from .common import ApproximantError, NoConvergence, NonFinite

REL_FLOOR = 1e-300

# =========================
# Adaptive quadrature
# =========================

# Kronrod nodes on [0, 1]; even positions are the 7-point Gauss nodes
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])  # 15 nodes, ascending
_WK15 = np.concatenate([_WK[:-1], _WK[::-1]])
_WG15 = np.zeros(15)
_WG15[[1, 3, 5]] = _WG[:3]
_WG15[7] = _WG[3]
_WG15[[9, 11, 13]] = _WG[2::-1]


def _gk15(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> Tuple[float, float]:
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(f(mid + half * _NODES), dtype=float)
    if fx.shape != _NODES.shape:
        fx = np.broadcast_to(fx, _NODES.shape)
    if not np.all(np.isfinite(fx)):
        raise NonFinite(f"integrand is not finite on [{a:.6g}, {b:.6g}]")
    k = half * float(_WK15 @ fx)
    g = half * float(_WG15 @ fx)
    return k, abs(k - g)


def quad_adaptive(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                  tol: float = 1e-10, limit: int = 2000) -> float:
    """
    Integral of f over [a, b]; b may be +inf (mapped with t = a + u/(1-u)).
    f must accept numpy arrays. Stops when the summed error estimate falls
    below tol * max(1, |I|).
    """
    if b == a:
        return 0.0
    if math.isinf(b):
        if b < 0:
            raise ValueError("lower-infinite ranges are not supported")
        g = f

        def f(u, g=g, a=a):
            u = np.asarray(u, dtype=float)
            return g(a + u / (1.0 - u)) / (1.0 - u) ** 2

        a, b = 0.0, 1.0
    if b < a:
        return -quad_adaptive(f, b, a, tol, limit)

    intervals: List[Tuple[float, float, float, float]] = []
    I, err = _gk15(f, a, b)
    intervals.append((a, b, I, err))
    while True:
        total = sum(iv[2] for iv in intervals)
        errsum = sum(iv[3] for iv in intervals)
        if errsum <= tol * max(1.0, abs(total)):
            return total
        if len(intervals) >= limit:
            raise NoConvergence(f"quadrature did not converge in {limit} intervals",
                                estimate=total, best_residual=errsum)
        worst = max(range(len(intervals)), key=lambda i: intervals[i][3])
        lo, hi, _, _ = intervals[worst]
        mid = 0.5 * (lo + hi)
        Il, el = _gk15(f, lo, mid)
        Ir, er = _gk15(f, mid, hi)
        intervals[worst] = (lo, mid, Il, el)
        intervals.append((mid, hi, Ir, er))


# =========================
# Bernoulli / Debye
# =========================

@lru_cache(maxsize=None)
def bernoulli_numbers(m: int) -> Tuple[Fraction, ...]:
    """B_0..B_m exactly, from sum_{j<=n} C(n+1, j) B_j = 0 (B_1 = -1/2)."""
    B = [Fraction(1)]
    for n in range(1, m + 1):
        s = sum(Fraction(math.comb(n + 1, j)) * B[j] for j in range(n))
        B.append(-s / (n + 1))
    return tuple(B)


def debye_small_coeffs(order: int, n: int = 3) -> List[Fraction]:
    """
    a_1..a_order of D(n, x) = 1 + sum a_m x^m:
    a_1 = -n/(2(n+1)), a_2k = n B_2k / ((2k+n)(2k)!), odd m > 1 vanish.
    """
    if not 1 <= order <= 20:
        raise ValueError("debye_small_coeffs supports orders 1..20")
    B = bernoulli_numbers(order)
    out = [Fraction(-n, 2 * (n + 1))]
    for m in range(2, order + 1):
        if m % 2:
            out.append(Fraction(0))
        else:
            out.append(n * B[m] / ((m + n) * math.factorial(m)))
    return out


def debye_constant(n: int) -> float:
    """lim x^n D(n, x) = n Gamma(n+1) zeta(n+1)."""
    return float(n * special.gamma(n + 1) * special.zeta(n + 1))


def debye(n: int, x: float, tol: float = 1e-10) -> float:
    """D(n, x) = n/x^n int_0^x t^n/(e^t - 1) dt"""
    if x < 0:
        raise ValueError("debye needs x >= 0")
    if x == 0:
        return 1.0

    def integrand(t):
        t = np.asarray(t, dtype=float)
        return t ** n / np.expm1(t)

    # beyond t ~ 200 the integrand is below double precision of the total
    upper = min(float(x), 200.0 + 10.0 * n)
    return n / x ** n * quad_adaptive(integrand, 0.0, upper, tol)


def debye3(x: float) -> float:
    return debye(3, x)


# =========================
# Closed forms
# =========================

def fermi_dirac0(x: float) -> float:
    """F(0, x) = ln(1 + e^x), overflow safe."""
    return max(x, 0.0) + math.log1p(math.exp(-abs(x)))


def fekete_f(x: float) -> float:
    """Bound on (0, 1): 1 + 2 exp(-2x/(1-x))."""
    if not 0.0 <= x < 1.0:
        raise ValueError("fekete_f needs 0 <= x < 1")
    return 1.0 + 2.0 * math.exp(-2.0 * x / (1.0 - x))


def fekete(z: float) -> float:
    """fekete_f(z/(1+z)) on z >= 0."""
    if z < 0:
        raise ValueError("fekete needs z >= 0")
    return 1.0 + 2.0 * math.exp(-2.0 * z)


# series of x[sqrt(1+x^2) - x^2 asinh(1/x)] in y = 1/x
_NJL_LARGE = (2.0 / 3.0, -1.0 / 5.0, 3.0 / 28.0, -5.0 / 72.0, 35.0 / 704.0)


def njl_f(x: float) -> float:
    if x < 0:
        raise ValueError("njl_f needs x >= 0")
    if x == 0:
        return 0.0
    if x >= 20.0:
        y2 = 1.0 / (x * x)
        return sum(c * y2 ** m for m, c in enumerate(_NJL_LARGE))
    return x * (math.sqrt(1.0 + x * x) - x * x * math.asinh(1.0 / x))


def njl_f_z(z: float) -> float:
    """njl_f in z = 1/x^2."""
    if z <= 0:
        raise ValueError("njl_f_z needs z > 0")
    return njl_f(z ** -0.5)


GORI_GIORGI_2D = {
    "A0": -0.1925, "B0": 0.0863136, "C0": 0.057234, "D0": 0.003362896,
    "E0": 1.0022, "F0": -0.02069, "G0": 0.34, "H0": 0.01747,
}


def gori_giorgi_2d(rs: float) -> float:
    """Fitted 2D electron-gas correlation energy per particle."""
    if rs <= 0:
        raise ValueError("gori_giorgi_2d needs r_s > 0")
    p = GORI_GIORGI_2D
    poly = p["B0"] * rs + p["C0"] * rs ** 2 + p["D0"] * rs ** 3
    inner = p["E0"] * rs + p["F0"] * rs ** 1.5 + p["G0"] * rs ** 2 + p["H0"] * rs ** 3
    return p["A0"] + poly * math.log1p(1.0 / inner)


# =========================
# Quadrature oracles
# =========================

def _j1_over_t(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    small = t < 0.1
    out = np.empty_like(t)
    ts = t[small] ** 2
    out[small] = 1.0 / 3.0 - ts / 30.0 + ts ** 2 / 840.0 - ts ** 3 / 45360.0
    tl = t[~small]
    out[~small] = special.spherical_jn(1, tl) / tl
    return out


def scattering_S(x: float, tol: float = 1e-10) -> float:
    """S(x) = int_0^x (sin t/t^3 - cos t/t^2)^2 dt; S(oo) = pi/15."""
    if x < 0:
        raise ValueError("scattering_S needs x >= 0")
    if math.isinf(x):
        return math.pi / 15.0
    if x > 1000.0:
        tail = 1.0 / (6.0 * x ** 3) - math.sin(2.0 * x) / (4.0 * x ** 4)
        return math.pi / 15.0 - tail
    return quad_adaptive(lambda t: _j1_over_t(t) ** 2, 0.0, x, tol)


def phi4_I(x: float, tol: float = 1e-10) -> float:
    """(1/sqrt(pi)) int exp(-p^2 - x p^4) dp over the real line."""
    if x < 0:
        raise ValueError("phi4_I needs x >= 0")

    def integrand(p):
        p = np.asarray(p, dtype=float)
        return np.exp(-p * p - x * p ** 4)

    return 2.0 / math.sqrt(math.pi) * quad_adaptive(integrand, 0.0, math.inf, tol)


def phi4_I_bessel(x: float) -> float:
    """Closed form exp(1/8x) K_{1/4}(1/8x) / (2 sqrt(pi x))."""
    if x < 0:
        raise ValueError("phi4_I_bessel needs x >= 0")
    if x == 0:
        return 1.0
    z = 1.0 / (8.0 * x)
    return float(special.kve(0.25, z)) / (2.0 * math.sqrt(math.pi * x))


def phi4_weak_coeffs(n: int) -> List[float]:
    """a_1..a_n of the weak-coupling series: (-1)^m Gamma(2m + 1/2)/(sqrt(pi) m!)."""
    return [(-1) ** m * math.exp(math.lgamma(2 * m + 0.5) - math.lgamma(m + 1)) / math.sqrt(math.pi)
            for m in range(1, n + 1)]


def phi4_strong_coeffs(n: int) -> List[Tuple[Fraction, float]]:
    """(exponent, coefficient) of the strong-coupling series in x, leading term first."""
    return [(Fraction(-(2 * m + 1), 4),
             (-1) ** m * math.gamma((2 * m + 1) / 4) / (2.0 * math.sqrt(math.pi) * math.factorial(m)))
            for m in range(n)]


ORACLES: Dict[str, Callable[[float], float]] = {
    "scattering_S": scattering_S,
    "debye3": debye3,
    "fermi_dirac0": fermi_dirac0,
    "fekete": fekete,
    "phi4_I": phi4_I,
    "njl_f": njl_f,
    "njl_f_z": njl_f_z,
    "gori_giorgi_2d": gori_giorgi_2d,
}


# =========================
# Error scans
# =========================

@dataclass(frozen=True)
class ScanGrid:
    lo: float
    hi: float
    n: int = 400
    spacing: str = "log"

    def __post_init__(self):
        if self.spacing not in ("log", "linear"):
            raise ValueError(f"unknown spacing {self.spacing!r}")
        if not self.hi > self.lo or self.n < 2:
            raise ValueError("scan grid needs lo < hi and n >= 2")
        if self.spacing == "log" and self.lo <= 0:
            raise ValueError("log spacing needs lo > 0")

    def points(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)

    def describe(self) -> Dict[str, object]:
        return {"lo": self.lo, "hi": self.hi, "n": self.n, "spacing": self.spacing}


@dataclass
class ErrorReport:
    max_rel_err: float
    argmax_x: float
    grid: ScanGrid
    per_point: List[Tuple[float, float, float, float]] = field(default_factory=list)
    failures: List[Tuple[float, str]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {
            "max_rel_err": self.max_rel_err,
            "argmax_x": self.argmax_x,
            "grid": self.grid.describe(),
            "per_point": [list(p) for p in self.per_point],
            "failures": [list(f) for f in self.failures],
        }


SCAN_ERRORS = (ApproximantError, ValueError, OverflowError, ZeroDivisionError)


def error_scan(approx_eval: Callable[[float], float], oracle_eval: Callable[[float], float],
               grid: ScanGrid, keep_points: bool = True) -> ErrorReport:
    """Max relative error of approx against oracle; per-point failures are collected."""
    points: List[Tuple[float, float, float, float]] = []
    failures: List[Tuple[float, str]] = []
    worst, where = 0.0, math.nan
    for x in grid.points():
        x = float(x)
        try:
            a = float(approx_eval(x))
            o = float(oracle_eval(x))
        except SCAN_ERRORS as e:
            failures.append((x, f"{type(e).__name__}: {e}"))
            continue
        rel = abs(a - o) / max(abs(o), REL_FLOOR)
        points.append((x, a, o, rel))
        if rel > worst or math.isnan(where):
            worst, where = rel, x
    return ErrorReport(worst, where, grid, points if keep_points else [], failures)


def max_rel_err(report: Optional[ErrorReport]) -> float:
    return math.nan if report is None else report.max_rel_err
