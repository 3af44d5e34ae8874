from __future__ import annotations

import math
from dataclasses import replace
from fractions import Fraction as F

import numpy as np
import numpy.testing as npt
import pytest

from root_approximants.approximants import (
    AsymptoticCase, MatchCondition, NestSpec, Side, evaluate, expand_at_zero, standard_schedule,
)
from root_approximants.bench import param_deviation
from root_approximants.common import DegeneratePivot, NoConvergence
from root_approximants.registry import GAS1D_B1, GAS1D_C, GAS2D_B, GAS2D_C0, get_case
from root_approximants.series import coeff
from root_approximants.solver import (
    Mode, build, condition_residuals, damped_newton, residuals, solve_two_point,
)


def _build(name: str):
    d = get_case(name)
    return d, build(d.case, d.nest_spec(), d.mode, d.match_conditions())


def test_damped_newton_wellbehaved_system():
    def fun(x):
        return np.array([x[0] ** 2 + x[1] ** 2 - 4.0, x[0] - x[1]])

    x, r = damped_newton(fun, [1.0, 0.5])
    npt.assert_allclose(x, [math.sqrt(2.0), math.sqrt(2.0)], rtol=1e-9)
    assert np.max(np.abs(r)) < 1e-10


def test_damped_newton_no_root():
    with pytest.raises(NoConvergence) as info:
        damped_newton(lambda x: np.array([x[0] ** 2 + 1.0]), [0.5])
    assert info.value.best_residual >= 1.0


@pytest.mark.parametrize("k, expected", [
    (3, (0.133333333, 0.012952381, 0.0169072674)),
    (4, (0.133333333, 0.012952381, 0.00275736961, 0.00463605715)),
    (5, (0.133333333, 0.012952381, 0.00275736961, 0.000577513304, 0.00128515995)),
    (6, (0.133333333, 0.012952381, 0.00275736961, 0.000577513304, 0.000137179024, 0.000356042109)),
])
def test_scattering_amplitude_build(k, expected):
    d, r = _build(f"scattering_k{k}")
    npt.assert_allclose(r.params, expected, rtol=1e-6)
    assert param_deviation(r.params, d.expected_params) <= d.param_tol
    npt.assert_allclose(r.amplitude(), (math.pi / 15) / (1 / 9), rtol=1e-10)


def test_fermi_dirac_amplitude_build():
    d, r = _build("fermi_dirac_k5")
    npt.assert_allclose(r.params, (0.721347708, 0.360673854, 0.390256887, 0.410334542, 4.29451739),
                        rtol=1e-6)
    assert param_deviation(r.params, d.expected_params) <= 1e-3


def test_debye_amplitude_build():
    _, r = _build("debye_k5")
    npt.assert_allclose(r.params, (0.125, 7 / 240, 0.0078125, 0.0019438244, 0.00527386486), rtol=1e-6)


def test_phi4_amplitude_build():
    _, r = _build("phi4_k3")
    npt.assert_allclose(r.params, (0.67597933, 0.185420614, 0.629758666), rtol=1e-6)


def test_small_only_reproduces_coefficients():
    d = get_case("fermi_dirac_k5")
    spec3 = standard_schedule(3, total_pow=d.case.total_pow).with_prefactor(d.case.small_amp, 0)
    r = build(d.case, spec3, Mode.SMALL_ONLY)
    s = expand_at_zero(r, 3)
    targets = [c.target for c in d.case.small_conditions(3)]
    npt.assert_allclose([coeff(s, m) for m in (1, 2, 3)], targets, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("name", ["gas_1d_k3", "spherium_k5", "harmonium_k6", "gas_2d_k5"])
def test_two_point_printed_parameters(name):
    d, r = _build(name)
    assert condition_residuals(r, d.match_conditions()) < 1e-8
    assert param_deviation(r.params, d.expected_params) <= d.param_tol


def test_spherium_outer_parameter_closed_form():
    d, r = _build("spherium_k5")
    c0 = d.case.small_amp
    npt.assert_allclose(r.params[-1], (-2.0 * c0) ** 5, rtol=1e-6)


def test_njl_two_point_with_log_condition():
    d, r = _build("njl_k4")
    npt.assert_allclose(r.params[0], 0.6, rtol=1e-8)
    npt.assert_allclose(r.amplitude(), 1.5, rtol=1e-8)
    assert np.max(np.abs(residuals(r.spec, r.params, d.match_conditions()))) < 1e-8


def test_two_point_argument_checks():
    d = get_case("gas_1d_k3")
    conds = d.match_conditions()
    with pytest.raises(ValueError):
        solve_two_point(d.case, d.nest_spec(), conds[:2])
    log_cond = MatchCondition(Side.INFINITY, F(1, 2), 1, 0.0)
    with pytest.raises(ValueError):
        solve_two_point(d.case, d.nest_spec(), [*conds[:2], log_cond])


def test_outer_parameters_in_closed_form():
    _, r = _build("harmonium_k6")
    npt.assert_allclose(r.params[-1], 256.0, rtol=1e-6)
    _, r = _build("gas_1d_k3")
    npt.assert_allclose(GAS1D_C * r.params[-1] ** (-1 / 3), GAS1D_B1, rtol=1e-6)
    _, r = _build("gas_2d_k5")
    npt.assert_allclose(r.params[-1], (GAS2D_B[0] / GAS2D_C0) ** 2, rtol=1e-6)


def test_zero_power_level_is_a_degenerate_pivot():
    # n_1 = 0 wipes A_1 out of every coefficient
    case = AsymptoticCase(1.0, F(0), F(1), ((F(1), 0, 0.5), (F(2), 0, 0.1)),
                          large_amp=1.0, large_pow=F(1))
    spec = NestSpec((F(1), F(2)), (F(0), F(1, 2)))
    for mode in (Mode.SMALL_ONLY, Mode.AMPLITUDE):
        with pytest.raises(DegeneratePivot) as info:
            build(case, spec, mode)
        assert "A_1" in str(info.value)


def test_small_only_round_trip_random():
    rng = np.random.default_rng(19)
    for _ in range(100):
        k = int(rng.integers(1, 6))
        step = F(1, int(rng.integers(1, 3)))
        targets = rng.uniform(-1.0, 1.0, k)
        case = AsymptoticCase(1.0, F(0), step,
                              tuple((m * step, 0, float(v)) for m, v in enumerate(targets, 1)),
                              large_amp=1.0, large_pow=F(int(rng.integers(1, 4)), 2))
        spec = standard_schedule(k, step=step, total_pow=case.total_pow)
        r = build(case, spec, Mode.SMALL_ONLY)
        s = expand_at_zero(r, k * step)
        npt.assert_allclose([coeff(s, m * step) for m in range(1, k + 1)], targets,
                            rtol=1e-9, atol=1e-9)


def test_amplitude_build_is_scale_covariant():
    rng = np.random.default_rng(13)
    d = get_case("fermi_dirac_k5")
    ref = build(d.case, d.nest_spec(), d.mode)
    for _ in range(100):
        lam = float(rng.uniform(0.1, 10.0)) * (1.0 if rng.random() < 0.5 else -1.0)
        case = replace(d.case, small_amp=lam * d.case.small_amp, large_amp=lam * d.case.large_amp)
        spec = standard_schedule(5, total_pow=case.total_pow)
        spec = spec.with_prefactor(case.small_amp, case.small_pow)
        r = build(case, spec, Mode.AMPLITUDE)
        npt.assert_allclose(r.params, ref.params, rtol=1e-10)
        u = float(rng.uniform(0.1, 10.0))
        npt.assert_allclose(evaluate(r, u), lam * evaluate(ref, u), rtol=1e-10)
