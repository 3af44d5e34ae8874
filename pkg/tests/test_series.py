from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import numpy.testing as npt
import pytest

from root_approximants.common import (
    BeyondTruncation, LogAtLead, LogOverflow, NonPositiveLead, OffGrid, ZeroPower,
)
from root_approximants.series import (
    GeneralizedSeries, add, align, coeff, frac_gcd, from_coefficients, from_terms, leading,
    log1p_series, monomial, mul, normalize, powr, reframe_reciprocal, scale, shift, truncate,
    value_at,
)


def test_frac_gcd():
    assert frac_gcd(F(1, 2), F(1, 3)) == F(1, 6)
    assert frac_gcd(F(0), F(3, 4)) == F(3, 4)
    assert frac_gcd(F(3, 2), F(9, 4)) == F(3, 4)


def test_from_terms_places_and_drops():
    s = from_terms([(1, 0, 2.0), (F(3, 2), 1, 0.5), (5, 0, 9.0)], F(1, 2), 0, 2)
    assert s.lead == 0 and s.step == F(1, 2) and s.order == 4
    assert s.coeffs == (0.0, 0.0, 2.0, 0.0, 0.0)
    assert s.logs()[3] == 0.5
    assert coeff(s, F(3, 2), 1) == 0.5


def test_from_terms_off_grid():
    with pytest.raises(OffGrid):
        from_terms([(F(1, 3), 0, 1.0)], F(1, 2), 0, 2)


def test_zero_logs_are_dropped():
    s = GeneralizedSeries(0, 1, (1.0, 2.0), (0.0, 0.0))
    assert s.logcoeffs is None and not s.has_log


def test_mul_truncates_to_shorter_operand():
    a = from_coefficients([1.0, 1.0, 0.0])
    b = from_coefficients([1.0, -1.0, 0.0, 5.0])
    p = mul(a, b)
    assert p.order == 2
    npt.assert_allclose(p.coeffs, [1.0, 0.0, -1.0])


def test_mul_mixed_steps():
    a = from_coefficients([1.0, 1.0, 0.0], step=F(1, 2))
    b = from_coefficients([1.0, 1.0, 0.0, 0.0], step=F(1, 3))
    p = mul(a, b)
    assert p.step == F(1, 6) and p.trunc == 1
    assert coeff(p, F(1, 3)) == 1.0
    assert coeff(p, F(1, 2)) == 1.0
    assert coeff(p, F(5, 6)) == 1.0


def test_add_with_offset_leads():
    s = add(monomial(1.0, F(1, 2), 1, 3), monomial(2.0, 1, 1, 3))
    assert s.step == F(1, 2) and s.lead == F(1, 2)
    assert coeff(s, 1) == 2.0


def test_align_keeps_smaller_truncation():
    a, b = align(from_coefficients([1.0, 2.0, 3.0]), from_coefficients([1.0, 1.0], step=F(1, 2)))
    assert a.trunc == b.trunc == F(1, 2)


def test_powr_integer_and_binomial():
    s = from_coefficients([1.0, 1.0, 0.0, 0.0])
    npt.assert_allclose(powr(s, 2).coeffs, [1.0, 2.0, 1.0, 0.0])
    npt.assert_allclose(powr(s, F(1, 2)).coeffs, [1.0, 0.5, -0.125, 0.0625])
    npt.assert_allclose(powr(scale(s, 4.0), F(1, 2)).coeffs, [2.0, 1.0, -0.25, 0.125])


def test_powr_moves_lead():
    s = shift(from_coefficients([1.0, 1.0, 0.0]), 2)
    r = powr(s, F(1, 2))
    assert r.lead == 1
    npt.assert_allclose(r.coeffs, [1.0, 0.5, -0.125])


def test_powr_errors():
    with pytest.raises(NonPositiveLead):
        powr(from_coefficients([-1.0, 1.0]), F(1, 2))
    with pytest.raises(LogAtLead):
        powr(from_coefficients([1.0, 1.0], logcoeffs=[1.0, 0.0]), 2)


def test_powr_exponent_law():
    rng = np.random.default_rng(11)
    exps = [F(1, 2), F(-1, 3), F(3, 4), F(2), F(-3, 2), F(5, 6)]
    for _ in range(100):
        K = int(rng.integers(2, 6))
        c = np.concatenate([[rng.uniform(0.5, 2.0)], rng.uniform(-1.0, 1.0, K)])
        s = from_coefficients(c, step=F(1, int(rng.integers(1, 4))), lead=F(int(rng.integers(-2, 3))))
        p, q = exps[int(rng.integers(len(exps)))], exps[int(rng.integers(len(exps)))]
        lhs = mul(powr(s, p), powr(s, q))
        rhs = powr(s, p + q)
        assert lhs.lead == rhs.lead
        npt.assert_allclose(lhs.coeffs, rhs.coeffs, rtol=1e-9, atol=1e-9)


def test_powr_matches_numeric_power():
    rng = np.random.default_rng(5)
    x = 1e-3
    for _ in range(100):
        c = np.concatenate([[rng.uniform(0.5, 2.0)], rng.uniform(-1.0, 1.0, 5)])
        s = from_coefficients(c)
        p = F(int(rng.integers(-5, 6)), int(rng.integers(1, 5)))
        npt.assert_allclose(value_at(powr(s, p), x), value_at(s, x) ** float(p), rtol=1e-10)


def test_mul_associative_and_commutative():
    rng = np.random.default_rng(7)

    def draw():
        K = int(rng.integers(1, 6))
        return from_coefficients(rng.uniform(-2.0, 2.0, K + 1), step=F(1, int(rng.integers(1, 4))),
                                 lead=F(int(rng.integers(-2, 3))))

    for _ in range(100):
        a, b, c = draw(), draw(), draw()
        lhs, rhs = mul(mul(a, b), c), mul(a, mul(b, c))
        assert (lhs.lead, lhs.step, lhs.order) == (rhs.lead, rhs.step, rhs.order)
        npt.assert_allclose(lhs.coeffs, rhs.coeffs, rtol=1e-12, atol=1e-12)
        npt.assert_allclose(mul(a, b).coeffs, mul(b, a).coeffs, rtol=1e-12, atol=1e-12)


def test_mul_log_overflow():
    s = from_coefficients([1.0, 0.0, 0.0], logcoeffs=[0.0, 1.0, 0.0])
    with pytest.raises(LogOverflow):
        mul(s, s)


def test_log1p_series_values():
    s = log1p_series(6)
    npt.assert_allclose(value_at(s, 0.01), math.log1p(0.01), rtol=0, atol=1e-14)
    t = 0.01
    s_inf = log1p_series(6, at_infinity=True)
    assert coeff(s_inf, 0, 1) == -1.0
    npt.assert_allclose(value_at(s_inf, t), math.log1p(1.0 / t), rtol=1e-12)


def test_reframe_reciprocal_involution():
    s = from_coefficients([0.3, -1.0, 2.0], lead=-2)
    back = reframe_reciprocal(reframe_reciprocal(s, 1), 1)
    assert back == s


def test_reframe_reciprocal_half_power():
    s = GeneralizedSeries(F(-5, 4), F(1, 2), (0.127846, -0.345684, 1.022765), (0.0, 0.5, 0.0))
    r = reframe_reciprocal(s, F(1, 2))
    assert r.lead == F(1, 2) and r.step == 1
    assert r.coeffs == (1.022765, -0.345684, 0.127846)
    assert coeff(r, F(3, 2), 1) == -1.0
    back = reframe_reciprocal(r, 2)
    assert back.lead == s.lead and back.step == s.step
    npt.assert_allclose(back.coeffs, s.coeffs)
    npt.assert_allclose(back.logs(), s.logs())


def test_reframe_reciprocal_zero_power():
    with pytest.raises(ZeroPower):
        reframe_reciprocal(from_coefficients([1.0]), 0)


def test_coeff_edges():
    s = from_coefficients([1.0, 2.0], lead=1)
    assert coeff(s, 0) == 0.0
    with pytest.raises(BeyondTruncation):
        coeff(s, 3)
    with pytest.raises(OffGrid):
        coeff(s, F(3, 2))


def test_truncate_and_normalize():
    s = from_coefficients([0.0, 0.0, 3.0, 4.0])
    n = normalize(s)
    assert n.lead == 2 and n.coeffs == (3.0, 4.0)
    assert leading(s) == (2, 3.0)
    assert truncate(s, 2).order == 2
    with pytest.raises(BeyondTruncation):
        truncate(n, 1)
