from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import numpy.testing as npt
import pytest

from root_approximants.approximants import (
    AdditiveApproximant, AsymptoticCase, MatchCondition, NestSpec, Offset, RootApproximant, Side,
    amplitude_at_infinity, evaluate, evaluate_additive, expand_additive, expand_at_infinity,
    expand_at_zero, nest_value, outer_pivot, standard_schedule,
)
from root_approximants.common import DegeneratePivot, NegativeBase, ZeroOuter
from root_approximants.series import coeff, leading, value_at


def test_standard_schedule():
    spec = standard_schedule(3, total_pow=F(-1, 2))
    assert spec.term_exps == (1, 2, 3)
    assert spec.level_pows == (2, F(3, 2), F(-1, 6))
    assert spec.growth == F(-1, 2)
    half = standard_schedule(4, sigma=F(-1, 2), total_pow=1)
    assert half.level_pows == (F(1, 2), F(3, 4), F(5, 6), F(1, 4))


def test_standard_schedule_zero_outer():
    with pytest.raises(ZeroOuter):
        standard_schedule(3, total_pow=0)
    with pytest.raises(ZeroOuter):
        NestSpec((F(1),), (F(0),))


def test_repeated_exponent_needs_log_slot():
    with pytest.raises(ValueError):
        NestSpec((F(1), F(1)), (F(2), F(1)))
    spec = NestSpec((F(1), F(1)), (F(2), F(1)), log_slots=((2, F(1)),))
    assert spec.log_q(1) == 1 and spec.log_q(0) is None


def test_condition_ordering():
    conds = [
        MatchCondition(Side.INFINITY, 1, 0),
        MatchCondition(Side.INFINITY, 1, 1),
        MatchCondition(Side.INFINITY, 0, 0),
        MatchCondition(Side.ZERO, 2, 0),
        MatchCondition(Side.ZERO, 1, 0),
    ]
    labels = [c.label() for c in sorted(conds, key=MatchCondition.sort_key)]
    assert labels == ["zero:1", "zero:2", "inf:0", "inf:1L", "inf:1"]


def test_case_targets():
    case = AsymptoticCase(2.0, 0, 1, ((F(1), 0, 0.5), (F(3), 0, -1.0)), large_amp=6.0, large_pow=1,
                          large_coeffs=((F(1), 1, 0.25),))
    assert case.target(Side.INFINITY, 0) == 3.0
    assert case.target(Side.ZERO, 2) == 0.0
    assert case.target(Side.INFINITY, 1, 1) == 0.25
    with pytest.raises(KeyError):
        case.target(Side.ZERO, 4)
    assert [c.target for c in case.small_conditions(3)] == [0.5, 0.0, -1.0]
    assert case.total_pow == 1


def test_evaluate_single_level():
    spec = standard_schedule(1, total_pow=F(-1, 2))
    assert evaluate(RootApproximant(spec, (1.0,)), 3.0) == pytest.approx(0.5)


def test_evaluate_prefactor_and_offset():
    spec = NestSpec((F(1),), (F(1),), prefactor_amp=2.0, prefactor_pow=F(-1),
                    additive_offset=Offset(1.0, F(-1)))
    # 2/u (1 + u) + 1/u at u = 2
    assert evaluate(spec, 2.0, (1.0,)) == pytest.approx(3.5)
    assert math.isinf(evaluate(spec, 0.0, (1.0,)))


def test_negative_base_reports_level():
    spec = standard_schedule(2, total_pow=1)
    with pytest.raises(NegativeBase) as info:
        nest_value(spec, (-1.0, 1.0), 2.0)
    assert info.value.level == 1 and info.value.x == 2.0


def test_expand_at_zero_matches_evaluation():
    rng = np.random.default_rng(3)
    u = 1e-3
    for _ in range(100):
        k = int(rng.integers(1, 5))
        spec = standard_schedule(k, sigma=F(int(rng.integers(-1, 3)), 2) or 1,
                                 total_pow=F(int(rng.integers(-3, 4)) or 1, 2))
        A = rng.uniform(0.1, 1.0, k)
        s = expand_at_zero(spec, 5, A)
        npt.assert_allclose(value_at(s, u), nest_value(spec, A, u), rtol=1e-10)


def test_expand_at_infinity_matches_evaluation():
    rng = np.random.default_rng(17)
    u = 1e4
    for _ in range(100):
        k = int(rng.integers(1, 5))
        spec = standard_schedule(k, total_pow=F(int(rng.integers(-3, 4)) or 1, 2))
        A = rng.uniform(0.5, 2.0, k)
        s = expand_at_infinity(spec, 4, A)
        npt.assert_allclose(value_at(s, 1.0 / u), nest_value(spec, A, u), rtol=1e-10)
        lead, amp = leading(s)
        assert lead == -spec.growth
        npt.assert_allclose(amp, amplitude_at_infinity(spec, A), rtol=1e-12)


def test_expand_at_infinity_with_log_slot():
    spec = NestSpec((F(1), F(2), F(2), F(3)), (F(2), F(3, 2), F(1), F(-1, 6)), log_slots=((3, F(1)),))
    A = (0.6, -0.35, 0.25, 0.09)
    # the log term sits one order below the lead, so t^2 ln^2 t stays out of reach
    s = expand_at_infinity(spec, 1, A)
    lead, amp = leading(s)
    assert lead == F(1, 2)
    u = 1e8
    npt.assert_allclose(value_at(s, 1.0 / u), nest_value(spec, A, u), rtol=1e-9)
    assert coeff(s, lead + 1, 1) != 0.0


def test_amplitude_and_outer_pivot():
    spec = standard_schedule(2, total_pow=F(1, 2))
    A = np.array([0.7, 0.0])
    A[1] = outer_pivot(spec, A, 1.3)
    # ((1 + A1 u)^2 + A2 u^2)^(1/4) ~ (A1^2 + A2)^(1/4) u^(1/2)
    npt.assert_allclose(A[1], 1.3 ** 4 - 0.49)
    npt.assert_allclose(amplitude_at_infinity(spec, A), 1.3)


def test_outer_pivot_subdominant():
    spec = NestSpec((F(1), F(2)), (F(3), F(1, 6)))
    with pytest.raises(DegeneratePivot):
        outer_pivot(spec, (1.0, 0.0), 1.0)


def test_additive():
    a = AdditiveApproximant(((1.0, 2.0, F(-1)), (0.5, 1.0, F(1, 2))))
    assert evaluate_additive(a, 1.0) == pytest.approx(1 / 3 + 0.5 * math.sqrt(2))
    s0 = expand_additive(a, Side.ZERO, 2)
    assert coeff(s0, 0) == pytest.approx(1.5)
    assert coeff(s0, 1) == pytest.approx(-2.0 + 0.25)
    sinf = expand_additive(a, Side.INFINITY, 2)
    # 0.5 x^(1/2) dominates; 1/(2x) appears at t^1
    assert leading(sinf) == (F(-1, 2), pytest.approx(0.5))
    assert coeff(sinf, 1) == pytest.approx(0.5)
    assert coeff(sinf, F(1, 2)) == pytest.approx(0.25)
    with pytest.raises(NegativeBase):
        evaluate_additive(a, -1.0)
