"""
Builders: fix the nest parameters A_1..A_k from asymptotic data.

- small_only:  k orders at zero, one affine solve per order
- amplitude:   k-1 orders at zero, then A_k in closed form from B/A
- two_point:   any k conditions on both sides, triangular seed + damped Newton
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .approximants import (
    AsymptoticCase, MatchCondition, NestSpec, RootApproximant, Side,
    expand_at_infinity, expand_at_zero, outer_pivot,
)
from .common import (
    ApproximantError, DegeneratePivot, LogAtLead, NegativeBase, NoConvergence,
    NonPositiveLead, log_info, log_warn,
)
from .series import coeff, leading

PIVOT_EPS = 1e-12
ROUND_TRIP_TOL = 1e-8

# errors that only mean "this trial point is outside the nest's domain"
DOMAIN_ERRORS = (NonPositiveLead, LogAtLead, NegativeBase, OverflowError, ZeroDivisionError)


class Mode(str, Enum):
    SMALL_ONLY = "small_only"
    AMPLITUDE = "amplitude"
    TWO_POINT = "two_point"


@dataclass(frozen=True)
class NewtonSettings:
    max_iter: int = 200
    tol: float = 1e-10
    fd_step: float = 1e-6
    min_damping: float = 2.0 ** -40


DEFAULT_SETTINGS = NewtonSettings()


# =========================
# Condition evaluation
# =========================

def condition_values(spec: NestSpec, params: Sequence[float],
                     conditions: Sequence[MatchCondition]) -> np.ndarray:
    zero = [c.exponent for c in conditions if c.side is Side.ZERO]
    inf = [c.exponent for c in conditions if c.side is Side.INFINITY]
    s0 = expand_at_zero(spec, max(zero), params) if zero else None
    sinf, lead, amp = None, None, None
    if inf:
        sinf = expand_at_infinity(spec, max(inf), params)
        lead, amp = leading(sinf)

    out = np.empty(len(conditions))
    for i, c in enumerate(conditions):
        if c.side is Side.ZERO:
            out[i] = coeff(s0, c.exponent, c.logpow)
        elif c.is_amplitude:
            out[i] = amp
        else:
            out[i] = coeff(sinf, lead + c.exponent, c.logpow) / amp
    return out


def residuals(spec: NestSpec, params: Sequence[float],
              conditions: Sequence[MatchCondition]) -> np.ndarray:
    """(value - target) / max(1, |target|) per condition."""
    targets = np.array([c.target for c in conditions])
    values = condition_values(spec, params, conditions)
    return (values - targets) / np.maximum(1.0, np.abs(targets))


def condition_residuals(r: RootApproximant, conditions: Sequence[MatchCondition]) -> float:
    """Largest relative mismatch of r against the given conditions."""
    if not conditions:
        return 0.0
    return float(np.max(np.abs(residuals(r.spec, r.params, conditions))))


# =========================
# Damped Newton
# =========================

def _jacobian(fun: Callable[[np.ndarray], np.ndarray], x: np.ndarray, r: np.ndarray,
              settings: NewtonSettings) -> np.ndarray:
    J = np.empty((r.size, x.size))
    for j in range(x.size):
        h = settings.fd_step * max(1.0, abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        try:
            rp = fun(xp)
        except DOMAIN_ERRORS:
            rp = None
        try:
            rm = fun(xm)
        except DOMAIN_ERRORS:
            rm = None
        if rp is not None and rm is not None:
            J[:, j] = (rp - rm) / (2.0 * h)
        elif rp is not None:
            J[:, j] = (rp - r) / h
        elif rm is not None:
            J[:, j] = (r - rm) / h
        else:
            raise NoConvergence(f"parameter {j + 1} cannot be perturbed inside the domain",
                                float(np.max(np.abs(r))), x)
    return J


def damped_newton(fun: Callable[[np.ndarray], np.ndarray], x0: Sequence[float],
                  settings: NewtonSettings = DEFAULT_SETTINGS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Newton iteration on fun(x) = 0 with a central-difference Jacobian.
    The step is halved while the residual norm does not decrease or the trial
    point leaves the domain.
    """
    x = np.asarray(x0, dtype=float).copy()
    try:
        r = fun(x)
    except DOMAIN_ERRORS as e:
        raise NoConvergence(f"starting point is outside the domain: {e}", best_params=x) from e

    for _ in range(settings.max_iter):
        if np.max(np.abs(r)) < settings.tol:
            return x, r
        J = _jacobian(fun, x, r, settings)
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            dx = np.linalg.lstsq(J, -r, rcond=None)[0]

        norm0 = float(np.linalg.norm(r))
        lam = 1.0
        while True:
            if lam < settings.min_damping:
                raise NoConvergence("line search stalled", float(np.max(np.abs(r))), x)
            xt = x + lam * dx
            try:
                rt = fun(xt)
            except DOMAIN_ERRORS:
                lam *= 0.5
                continue
            if np.all(np.isfinite(rt)) and np.linalg.norm(rt) < norm0:
                break
            lam *= 0.5
        x, r = xt, rt

    if np.max(np.abs(r)) < settings.tol:
        return x, r
    raise NoConvergence(f"no convergence after {settings.max_iter} iterations",
                        float(np.max(np.abs(r))), x)


# =========================
# Sequential pieces
# =========================

def _affine_solve(spec: NestSpec, A: np.ndarray, j: int, cond: MatchCondition) -> None:
    """Set A[j] from a condition in which it enters affinely."""
    lo, hi = A.copy(), A.copy()
    lo[j], hi[j] = 0.0, 1.0
    c0 = condition_values(spec, lo, [cond])[0]
    c1 = condition_values(spec, hi, [cond])[0]
    if abs(c1 - c0) < PIVOT_EPS:
        raise DegeneratePivot(f"A_{j + 1} does not enter the {cond.label()} coefficient")
    A[j] = (cond.target - c0) / (c1 - c0)


def _amplitude_target(case: AsymptoticCase, spec: NestSpec) -> float:
    if case.large_amp is None:
        raise ValueError("case has no large-variable amplitude")
    return case.large_amp / spec.prefactor_amp


def _check_small(case: AsymptoticCase, spec: NestSpec, count: int) -> List[MatchCondition]:
    have = len(case.small_coeffs) and case.small_coeffs[-1][0] / case.small_step
    if have < count:
        raise ValueError(f"case supplies {int(have)} small-side orders, {count} needed")
    return case.small_conditions(count)


def _finish(spec: NestSpec, A: Sequence[float], conditions: Sequence[MatchCondition],
            what: str) -> RootApproximant:
    r = RootApproximant(spec, tuple(A))
    dev = condition_residuals(r, conditions)
    if dev > ROUND_TRIP_TOL:
        raise NoConvergence(f"{what}: re-expansion misses the conditions by {dev:.3g}", dev, A)
    log_info(f"{what}: k={spec.k} A=({', '.join(f'{a:.8g}' for a in A)}) residual={dev:.2g}")
    return r


# =========================
# Builders
# =========================

def solve_small_only(case: AsymptoticCase, spec: NestSpec) -> RootApproximant:
    conds = _check_small(case, spec, spec.k)
    A = np.zeros(spec.k)
    for j, c in enumerate(conds):
        _affine_solve(spec, A, j, c)
    return _finish(spec, A, conds, "small_only")


def solve_with_amplitude(case: AsymptoticCase, spec: NestSpec) -> RootApproximant:
    k = spec.k
    conds = _check_small(case, spec, k - 1)
    A = np.zeros(k)
    for j, c in enumerate(conds):
        _affine_solve(spec, A, j, c)
    A[k - 1] = outer_pivot(spec, A, _amplitude_target(case, spec))
    amp = MatchCondition(Side.INFINITY, 0, 0, _amplitude_target(case, spec))
    return _finish(spec, A, [*conds, amp], "amplitude")


def _with_pivot(spec: NestSpec, amp: Optional[MatchCondition]) -> Callable[[np.ndarray], np.ndarray]:
    """Fill in A_k from the amplitude condition, when there is one."""
    def fill(A: np.ndarray) -> np.ndarray:
        if amp is not None:
            A = A.copy()
            A[-1] = outer_pivot(spec, A, amp.target)
        return A
    return fill


def _triangular_seed(spec: NestSpec, conds: Sequence[MatchCondition],
                     settings: NewtonSettings) -> np.ndarray:
    k = spec.k
    A = np.ones(k)
    zero = [c for c in conds if c.side is Side.ZERO]
    large = [c for c in conds if c.side is Side.INFINITY]
    for j, c in enumerate(zero):
        _affine_solve(spec, A, j, c)

    amp = next((c for c in large if c.is_amplitude), None)
    fill = _with_pivot(spec, amp)
    try:
        A = fill(A)
        idx = k - 1
        for c in large:
            if not c.is_amplitude:
                def fun(x, idx=idx, c=c):
                    trial = A.copy()
                    trial[idx] = x[0]
                    return residuals(spec, fill(trial), [c])
                x, _ = damped_newton(fun, [A[idx]], settings)
                A[idx] = x[0]
                A = fill(A)
            idx -= 1
    except (ApproximantError, *DOMAIN_ERRORS) as e:
        log_warn(f"triangular seed failed ({e}); seeding remaining parameters with 1")
        A = np.ones(k)
        for j, c in enumerate(zero):
            _affine_solve(spec, A, j, c)
    return A


def solve_two_point(case: AsymptoticCase, spec: NestSpec, conditions: Sequence[MatchCondition],
                    settings: NewtonSettings = DEFAULT_SETTINGS) -> RootApproximant:
    k = spec.k
    if len(conditions) != k:
        raise ValueError(f"{len(conditions)} conditions given for {k} parameters")
    if any(c.logpow for c in conditions) and not spec.log_slots:
        raise ValueError("log conditions need a nest with a log slot")
    conds = sorted(conditions, key=MatchCondition.sort_key)

    A = _triangular_seed(spec, conds, settings)

    amp = next((c for c in conds if c.is_amplitude), None)
    if amp is not None and spec.log_q(k - 1) is None:
        # A_k follows from the amplitude; iterate on the rest
        others = [c for c in conds if c is not amp]
        fill = _with_pivot(spec, amp)

        def reduced(x: np.ndarray) -> np.ndarray:
            return residuals(spec, fill(np.append(x, 0.0)), others)

        try:
            x, _ = damped_newton(reduced, A[:-1], settings) if others else (A[:-1], None)
            A = fill(np.append(x, 0.0))
        except (NoConvergence, DegeneratePivot) as e:
            log_warn(f"reduced Newton failed ({e}); iterating on all {k} parameters")
            A, _ = damped_newton(lambda a: residuals(spec, a, conds), A, settings)
    else:
        A, _ = damped_newton(lambda a: residuals(spec, a, conds), A, settings)

    return _finish(spec, A, conds, "two_point")


def build(case: AsymptoticCase, spec: NestSpec, mode: Mode,
          conditions: Optional[Sequence[MatchCondition]] = None,
          settings: NewtonSettings = DEFAULT_SETTINGS) -> RootApproximant:
    mode = Mode(mode)
    if mode is Mode.SMALL_ONLY:
        return solve_small_only(case, spec)
    if mode is Mode.AMPLITUDE:
        return solve_with_amplitude(case, spec)
    if not conditions:
        raise ValueError("two_point mode needs a condition list")
    return solve_two_point(case, spec, conditions, settings)
