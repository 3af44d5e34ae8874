from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import numpy.testing as npt
import pytest

from root_approximants.common import InconsistentPowers, PoleAt, SingularSystem
from root_approximants.oracles import ScanGrid
from root_approximants.pade import (
    PadeApproximant, best_pade, evaluate_pade, evaluate_pade_direct, expand_pade, solve_linear,
    pade_from_series, pade_table, poles_on_ray, two_point_pade,
)
from root_approximants.registry import get_case
from root_approximants.series import coeff, from_coefficients, from_terms

LN2 = math.log(2.0)


def test_solve_linear():
    A = np.array([[0.0, 2.0, 1.0], [1.0, 1.0, 0.0], [3.0, 0.0, 1.0]])
    b = np.array([3.0, 2.0, 4.0])
    npt.assert_allclose(solve_linear(A, b), np.linalg.solve(A, b))
    with pytest.raises(SingularSystem):
        solve_linear(np.array([[1.0, 2.0], [2.0, 4.0]]), np.array([1.0, 2.0]))


def test_pade_of_exponential():
    s = from_coefficients([1.0, 1.0, 0.5, 1 / 6, 1 / 24])
    p = pade_from_series(s, 2, 2)
    npt.assert_allclose(p.num_coeffs, [1.0, 0.5, 1 / 12], rtol=1e-12)
    npt.assert_allclose(p.den_coeffs, [1.0, -0.5, 1 / 12], rtol=1e-12)
    assert p.name == "P2/2"
    npt.assert_allclose(p(0.1), math.exp(0.1), rtol=1e-7)


def test_two_point_fermi_dirac_reexpands():
    small = from_coefficients([LN2, 0.5, 0.125, 0.0, -1 / 192])
    large = from_terms([(-1, 0, 1.0)], 1, -1, -1)
    p = two_point_pade(small, large, 3, 2, (5, 1))
    s0 = expand_pade(p, False, 4)
    npt.assert_allclose([coeff(s0, m) for m in range(5)], small.coeffs, rtol=1e-9, atol=1e-12)
    sinf = expand_pade(p, True, 0)
    assert sinf.lead == -1
    npt.assert_allclose(coeff(sinf, -1), 1.0, rtol=1e-10)


def test_two_point_njl_closed_form():
    small = from_coefficients([2 / 3, 0.0, -0.2])
    large = from_terms([(1, 0, 1.0)], 1, 1, 1)
    p = two_point_pade(small, large, 1, 2, (3, 1), var_pow=F(1, 2))
    npt.assert_allclose(p.num_coeffs, [2 / 3, 0.3], rtol=1e-12)
    npt.assert_allclose(p.den_coeffs, [1.0, 0.45, 0.3], rtol=1e-12)
    # evaluated in z: y = sqrt(z)
    npt.assert_allclose(p(4.0), (2 / 3 + 0.6) / (1 + 0.9 + 1.2), rtol=1e-12)


def test_two_point_rejects_mismatched_powers():
    small = from_coefficients([1.0, 1.0, 0.0])
    with pytest.raises(InconsistentPowers):
        two_point_pade(small, from_terms([(0, 0, 1.0)], 1, 0, 0), 1, 2, (2, 2))
    with pytest.raises(ValueError):
        two_point_pade(small, from_terms([(1, 0, 1.0)], 1, 1, 1), 1, 2, (2, 2))


def test_harmonium_baseline_is_inapplicable():
    b = get_case("harmonium_k6").baselines[0]
    with pytest.raises(InconsistentPowers):
        b.build()


def test_evaluation_strategies_agree():
    rng = np.random.default_rng(23)
    for _ in range(100):
        M, N = int(rng.integers(0, 5)), int(rng.integers(0, 5))
        num = rng.uniform(-2.0, 2.0, M + 1)
        den = np.concatenate([[1.0], rng.uniform(0.0, 2.0, N)])
        p = PadeApproximant(num, den, var_pow=F(int(rng.integers(1, 4)), 2))
        x = float(rng.uniform(0.0, 5.0))
        npt.assert_allclose(evaluate_pade(p, x), evaluate_pade_direct(p, x), rtol=1e-10, atol=1e-9)


def test_shift_pow_and_pole():
    p = PadeApproximant((1.0,), (1.0,), shift_pow=-1)
    assert p(2.0) == 0.5
    q = PadeApproximant((1.0,), (1.0, -1.0))
    with pytest.raises(PoleAt):
        evaluate_pade(q, 1.0)
    npt.assert_allclose(poles_on_ray(q, 2.0), [1.0], atol=1e-9)
    assert poles_on_ray(PadeApproximant((1.0,), (1.0, 1.0)), 10.0) == []


def test_table_and_best():
    s = from_coefficients([1.0, -1.0, 1.0, -1.0, 1.0])  # 1/(1+x)
    table = pade_table(s, 5)
    assert {p.name for p in table} >= {"P4/0", "P0/4"}
    best = best_pade(table, lambda x: 1.0 / (1.0 + x), ScanGrid(0.01, 10.0, 50))
    assert best is not None
    npt.assert_allclose(best[1].max_rel_err, 0.0, atol=1e-10)


def test_pade_approximant_validation():
    with pytest.raises(ValueError):
        PadeApproximant((1.0,), (2.0, 1.0))
    with pytest.raises(ValueError):
        PadeApproximant((1.0,), (1.0,), var_pow=0)


def test_phi4_two_point_closed_form():
    d1, d3 = 1.022765, -0.345684
    b = get_case("phi4_k3").baselines[0]
    p = b.build()
    assert p.name == "P1/2" and p.var_pow == F(1, 4)
    q2 = -d1 / d3
    npt.assert_allclose(p.num_coeffs, [1.0, d1 * q2], rtol=1e-12)
    npt.assert_allclose(p.den_coeffs, [1.0, 1 / d1, q2], rtol=1e-12)
    assert poles_on_ray(p, 1e3) == []
    npt.assert_allclose(p(1e8) * 1e8 ** 0.25, d1, rtol=1e-2)


def test_two_point_without_large_side_is_plain_pade():
    rng = np.random.default_rng(31)
    for _ in range(120):
        M, N = int(rng.integers(0, 4)), int(rng.integers(0, 4))
        s = from_coefficients(rng.normal(size=M + N + 1))
        one = pade_from_series(s, M, N)
        two = two_point_pade(s, None, M, N, (M + N + 1, 0))
        npt.assert_allclose(two.num_coeffs, one.num_coeffs, rtol=1e-8, atol=1e-8)
        npt.assert_allclose(two.den_coeffs, one.den_coeffs, rtol=1e-8, atol=1e-8)
