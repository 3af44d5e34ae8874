"""
Built-in cases: asymptotic data, nest layouts, printed parameters and baselines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from .approximants import (
    AdditiveApproximant, AsymptoticCase, MatchCondition, NestSpec, Offset, RootApproximant,
    Side, evaluate, standard_schedule,
)
from .common import ValidationError
from .oracles import ORACLES, ScanGrid, debye_constant, debye_small_coeffs
from .pade import PadeApproximant, pade_from_series, pade_table, two_point_pade
from .series import GeneralizedSeries, from_coefficients, from_terms, reframe_reciprocal
from .solver import Mode

F = Fraction
LN2 = math.log(2.0)
CATALAN = 0.91596559

ConditionKey = Tuple[Side, Fraction, int]


@dataclass(frozen=True)
class Schedule:
    k: int
    sigma: Fraction = F(1)
    step: Fraction = F(1)
    offset: Optional[Offset] = None
    total_pow: Optional[Fraction] = None  # defaults to large_pow - small_pow


@dataclass(frozen=True)
class BaselineSpec:
    """Padé baseline in y = x^var_pow; `large` is a series in 1/y."""
    name: str
    M: int
    N: int
    small: GeneralizedSeries
    split: Optional[Tuple[int, int]] = None
    large: Optional[GeneralizedSeries] = None
    var_pow: Fraction = F(1)
    shift_pow: Fraction = F(0)
    table: bool = False  # pick the best P_{M'/N'} with M'+N' = M+N

    def build(self) -> PadeApproximant:
        if self.split is None or self.split[1] == 0:
            return pade_from_series(self.small, self.M, self.N, self.var_pow, self.shift_pow)
        return two_point_pade(self.small, self.large, self.M, self.N, self.split,
                              self.var_pow, self.shift_pow)

    def candidates(self) -> List[PadeApproximant]:
        return pade_table(self.small, self.M + self.N + 1, self.var_pow, self.shift_pow)


@dataclass(frozen=True)
class CaseDescriptor:
    name: str
    case: AsymptoticCase
    mode: Mode
    schedule: Optional[Schedule] = None
    nest: Optional[NestSpec] = None
    conditions: Tuple[ConditionKey, ...] = ()
    var_pow: Fraction = F(1)  # build variable u = x^var_pow
    expected_params: Optional[Tuple[float, ...]] = None
    param_tol: float = 1e-3
    oracle: Optional[str] = None
    scan: Optional[ScanGrid] = None
    baselines: Tuple[BaselineSpec, ...] = ()
    citation: str = ""
    variable: str = "x"
    # scan variable -> physical x, when the case is scanned in another variable
    to_physical: Optional[Callable[[float], float]] = None
    additive: Optional[AdditiveApproximant] = None
    # (label, side, exponent, target) checked against the additive re-expansion
    additive_checks: Tuple[Tuple[str, Side, Fraction, float], ...] = ()

    def __post_init__(self):
        if (self.schedule is None) == (self.nest is None):
            raise ValidationError("schedule", "give exactly one of schedule / explicit nest")
        k = self.nest.k if self.nest is not None else self.schedule.k
        if self.expected_params is not None:
            if len(self.expected_params) != k:
                raise ValidationError("expected_params", f"{len(self.expected_params)} values for k={k}")
            if not self.citation:
                raise ValidationError("citation", "printed parameters need a citation")
        if self.oracle is not None and self.oracle not in ORACLES:
            raise ValidationError("oracle", f"unknown oracle {self.oracle!r}")
        if self.mode is Mode.TWO_POINT and len(self.conditions) != k:
            raise ValidationError("conditions", f"{len(self.conditions)} conditions for k={k}")

    @property
    def k(self) -> int:
        return self.nest.k if self.nest is not None else self.schedule.k

    def nest_spec(self) -> NestSpec:
        """Explicit nest, or the standard schedule with the case prefactor (may raise ZeroOuter)."""
        if self.nest is not None:
            return self.nest
        s = self.schedule
        total = s.total_pow if s.total_pow is not None else self.case.total_pow
        spec = standard_schedule(s.k, s.sigma, s.step, total)
        spec = spec.with_prefactor(self.case.small_amp, self.case.small_pow)
        if s.offset is not None:
            spec = replace(spec, additive_offset=s.offset)
        return spec

    def match_conditions(self) -> List[MatchCondition]:
        return [self.case.condition(side, e, lp) for side, e, lp in self.conditions]

    def to_build_var(self, x: float) -> float:
        if x == 0.0 and self.var_pow < 0:
            return math.inf
        return x ** float(self.var_pow)

    def physical_x(self, v: float) -> float:
        return float(v) if self.to_physical is None else float(self.to_physical(v))

    def evaluator(self, r: RootApproximant) -> Callable[[float], float]:
        return lambda x: evaluate(r, self.to_build_var(x))

    def oracle_fn(self) -> Optional[Callable[[float], float]]:
        return None if self.oracle is None else ORACLES[self.oracle]


def condition_keys(*items: str) -> Tuple[ConditionKey, ...]:
    """'zero:1', 'inf:1/2', 'inf:2L' -> condition keys."""
    out = []
    for item in items:
        side, _, exp = item.partition(":")
        log = exp.endswith("L")
        out.append((Side(side), F(exp.rstrip("L")), int(log)))
    return tuple(out)


def _ratio(terms, amp: float) -> Tuple[Tuple[Fraction, int, float], ...]:
    return tuple((F(e), lp, v / amp) for e, lp, v in terms)


# =========================
# Printed constants
# =========================

@dataclass(frozen=True)
class PrintedConstant:
    name: str
    printed: float
    exact: float
    citation: str


PRINTED_CONSTANTS: Tuple[PrintedConstant, ...] = (
    PrintedConstant("debye_C3", 19.481818, math.pi ** 4 / 5, "large-x Debye limit C3 = pi^4/5"),
    PrintedConstant("gas1d_C", -0.027416, -math.pi ** 2 / 360, "1D gas high-density C = -pi^2/360"),
    PrintedConstant("gas1d_b1", -0.168939, -(math.log(math.sqrt(2 * math.pi)) - 0.75),
                    "1D gas low-density b1 = -(ln sqrt(2 pi) - 3/4)"),
    PrintedConstant("gas2d_c1p", -0.0863136, -math.sqrt(2) * (10 / (3 * math.pi) - 1),
                    "2D gas high-density c1' = -sqrt(2)(10/(3 pi) - 1)"),
    PrintedConstant("harmonium_c0", 1.19055, 3 / 2 ** (4 / 3), "harmonium small-omega c0 = 3/2^(4/3)"),
    PrintedConstant("harmonium_c1", 2.36603, (3 + math.sqrt(3)) / 2, "harmonium c1 = (3 + sqrt 3)/2"),
    PrintedConstant("harmonium_c2", 0.122492, 7 / 36 * 2 ** (-2 / 3), "harmonium c2 = (7/36) 2^(-2/3)"),
    PrintedConstant("harmonium_b1", 0.797885, math.sqrt(2 / math.pi), "harmonium large-omega b1 = sqrt(2/pi)"),
    PrintedConstant("harmonium_b2", -0.077891, -(2 / math.pi) * (1 - math.pi / 2 + LN2),
                    "harmonium b2 = -(2/pi)(1 - pi/2 + ln 2)"),
    PrintedConstant("harmonium_b3", 0.0112528,
                    (2 / math.pi) ** 1.5 * (2 - 2 * CATALAN - 1.5 * math.pi + (math.pi + 3) * LN2
                                            + 1.5 * LN2 ** 2 - math.pi ** 2 / 24),
                    "harmonium b3 with Catalan G = 0.91596559"),
    PrintedConstant("spherium_c0", -0.22741128, 4 * LN2 - 3, "spherium small-R c0 = 4 ln 2 - 3"),
    PrintedConstant("spherium_c1", 0.11773689, 8 * LN2 ** 2 - 40 * LN2 + 24,
                    "spherium c1 = 8 (ln 2)^2 - 40 ln 2 + 24"),
)

_P = {c.name: c.printed for c in PRINTED_CONSTANTS}


# =========================
# Case builders
# =========================

_SCATTERING_X = (F(-1, 135), F(1, 2625), F(-4, 297675), F(2, 5893965), F(-1, 166080925),
                 F(1, 10672286625))
_SCATTERING_PRINTED = {
    3: (0.133333, 0.012952, 0.016907),
    4: (0.133333, 0.012952, 0.002757, 0.004636),
    5: (0.133333, 0.012952, 0.002757, 0.000578, 0.001285),
    6: (0.133333, 0.012952, 0.002757, 0.000578, 0.000137, 0.000356),
}


def scattering_case() -> AsymptoticCase:
    # S(x) = x/9 (1 + sum 9 s_m x^(2m)), built in u = x^2
    return AsymptoticCase(
        small_amp=1 / 9, small_pow=F(1, 2), small_step=F(1),
        small_coeffs=tuple((F(m), 0, float(9 * s)) for m, s in enumerate(_SCATTERING_X, 1)),
        large_amp=math.pi / 15, large_pow=F(0),
        variable_note="u = x^2",
    )


def scattering(k: int) -> CaseDescriptor:
    return CaseDescriptor(
        name=f"scattering_k{k}", case=scattering_case(), mode=Mode.AMPLITUDE,
        schedule=Schedule(k), var_pow=F(2),
        expected_params=_SCATTERING_PRINTED[k],
        # the printed A_4.. carry three significant digits
        param_tol=1e-3 if k <= 4 else 5e-3,
        oracle="scattering_S", scan=ScanGrid(0.01, 100.0),
        citation="hard-core scattering integral: small-x series x/9 - x^3/135 + ..., limit pi/15",
    )


def debye_case() -> AsymptoticCase:
    a = debye_small_coeffs(4)
    return AsymptoticCase(
        small_amp=1.0, small_pow=F(0), small_step=F(1),
        small_coeffs=tuple((F(m), 0, float(c)) for m, c in enumerate(a, 1)),
        large_amp=debye_constant(3), large_pow=F(-3),
    )


def debye_k5() -> CaseDescriptor:
    a = [1.0] + [float(c) for c in debye_small_coeffs(4)]
    C3 = debye_constant(3)
    return CaseDescriptor(
        name="debye_k5", case=debye_case(), mode=Mode.AMPLITUDE, schedule=Schedule(5),
        oracle="debye3", scan=ScanGrid(0.01, 50.0),
        baselines=(BaselineSpec("P1/4 two-point", 1, 4, from_coefficients(a), (5, 1),
                                from_terms([(3, 0, C3)], 1, 3, 3)),),
        citation="Debye D(3,x): 1 - 3x/8 + sum a_2k x^2k, C3 = pi^4/5",
    )


def fermi_dirac_case() -> AsymptoticCase:
    return AsymptoticCase(
        small_amp=LN2, small_pow=F(0), small_step=F(1),
        small_coeffs=_ratio([(1, 0, 0.5), (2, 0, 0.125), (3, 0, 0.0), (4, 0, -1 / 192)], LN2),
        large_amp=1.0, large_pow=F(1),
    )


def fermi_dirac_k5() -> CaseDescriptor:
    return CaseDescriptor(
        name="fermi_dirac_k5", case=fermi_dirac_case(), mode=Mode.AMPLITUDE, schedule=Schedule(5),
        expected_params=(0.721348, 0.360674, 0.390257, 0.410334, 4.294519),
        oracle="fermi_dirac0", scan=ScanGrid(0.01, 100.0),
        baselines=(BaselineSpec("P3/2 two-point", 3, 2,
                                from_coefficients([LN2, 0.5, 0.125, 0.0, -1 / 192]), (5, 1),
                                from_terms([(-1, 0, 1.0)], 1, -1, -1)),),
        citation="F(0,x) = ln(1 + e^x): ln 2 + x/2 + x^2/8 - x^4/192, F ~ x",
    )


def fekete_case() -> AsymptoticCase:
    s = [F(-4), F(4), F(-8, 3), F(4, 3), F(-8, 15)]
    return AsymptoticCase(
        small_amp=3.0, small_pow=F(0), small_step=F(1),
        small_coeffs=tuple((F(m), 0, float(c) / 3) for m, c in enumerate(s, 1)),
        large_amp=1.0, large_pow=F(0), variable_note="z = x/(1-x)",
    )


def fekete_k3() -> CaseDescriptor:
    return CaseDescriptor(
        name="fekete_k3", case=fekete_case(), mode=Mode.AMPLITUDE, schedule=Schedule(3),
        oracle="fekete", scan=ScanGrid(0.01, 100.0), variable="z",
        to_physical=lambda z: z / (1.0 + z),
        baselines=(BaselineSpec("P2/2 two-point", 2, 2,
                                from_coefficients([3.0, -4.0, 4.0, -8 / 3, 4 / 3]), (4, 1),
                                from_terms([(0, 0, 1.0)], 1, 0, 0)),),
        citation="Fekete-Szego bound F(z) = 1 + 2 exp(-2z): 3 - 4z + 4z^2 - ..., F -> 1",
    )


def phi4_case() -> AsymptoticCase:
    # strong coupling in x becomes the small side in u = x^(-1/2)
    strong = GeneralizedSeries(F(-5, 4), F(1, 2), (0.127846, -0.345684, 1.022765))
    small = reframe_reciprocal(strong, F(1, 2))
    amp = small.coeffs[0]
    weak = reframe_reciprocal(from_coefficients([1.0, -0.75, 105 / 32]), F(-1, 2))
    return AsymptoticCase(
        small_amp=amp, small_pow=small.lead, small_step=small.step,
        small_coeffs=tuple((e - small.lead, 0, c / amp) for e, _, c in small.terms() if e > small.lead),
        large_amp=1.0, large_pow=F(0),
        large_coeffs=tuple((e, 0, c) for e, _, c in weak.terms() if e > 0),
        variable_note="u = x^(-1/2)",
    )


def phi4_k3() -> CaseDescriptor:
    weak = from_coefficients([1.0, -0.75, 105 / 32, -3465 / 128])
    # in y = x^(1/4): 1 - 3y^4/4 at zero, 1.022765/y - 0.345684/y^3 at infinity
    two_point = BaselineSpec("P1/2(x^1/4) two-point", 1, 2,
                             from_coefficients([1.0, 0.0, 0.0, 0.0, -0.75]), (1, 3),
                             from_terms([(1, 0, 1.022765), (3, 0, -0.345684)], 1, 1, 3), var_pow=F(1, 4))
    return CaseDescriptor(
        name="phi4_k3", case=phi4_case(), mode=Mode.AMPLITUDE, schedule=Schedule(3),
        var_pow=F(-1, 2), oracle="phi4_I", scan=ScanGrid(1e-3, 1e3),
        baselines=(two_point,
                   BaselineSpec("best P(M/N), M+N=3", 1, 2, weak, table=True)),
        citation="zero-dimensional phi^4: 1.022765 x^(-1/4) - 0.345684 x^(-3/4) + 0.127846 x^(-5/4)",
    )


def njl_case() -> AsymptoticCase:
    # z = 1/x^2: f = 2/3 - z/5 + 3z^2/28 at small z; z^(-1/2)(1 + (1/2 - ln 2)t + t ln t/2), t = 1/z
    return AsymptoticCase(
        small_amp=2 / 3, small_pow=F(0), small_step=F(1),
        small_coeffs=_ratio([(1, 0, -0.2), (2, 0, 3 / 28)], 2 / 3),
        large_amp=1.0, large_pow=F(-1, 2),
        large_coeffs=((F(1), 1, 0.5), (F(1), 0, 0.5 - LN2)),
        variable_note="z = 1/x^2",
    )


def njl_k4() -> CaseDescriptor:
    nest = NestSpec((F(1), F(2), F(2), F(3)), (F(2), F(3, 2), F(1), F(-1, 6)),
                    log_slots=((3, F(1)),), prefactor_amp=2 / 3)
    return CaseDescriptor(
        name="njl_k4", case=njl_case(), mode=Mode.TWO_POINT, nest=nest,
        conditions=condition_keys("zero:1", "inf:0", "inf:1L", "inf:1"),
        oracle="njl_f_z", scan=ScanGrid(0.01, 100.0), variable="z",
        to_physical=lambda z: z ** -0.5,
        baselines=(BaselineSpec("P1/2 two-point", 1, 2,
                                from_coefficients([2 / 3, 0.0, -0.2]), (3, 1),
                                from_terms([(1, 0, 1.0)], 1, 1, 1), var_pow=F(1, 2)),),
        citation="NJL-type f(x) = x[sqrt(1+x^2) - x^2 ln((1+sqrt(1+x^2))/x)]",
    )


GAS1D_C = -math.pi ** 2 / 360
GAS1D_B1 = -(math.log(math.sqrt(2 * math.pi)) - 0.75)
GAS1D_B2 = 0.359933


def gas_1d_case() -> AsymptoticCase:
    return AsymptoticCase(
        small_amp=GAS1D_C, small_pow=F(0), small_step=F(1),
        small_coeffs=((F(1), 0, 0.00845 / GAS1D_C),),
        large_amp=GAS1D_B1, large_pow=F(-1),
        large_coeffs=((F(1, 2), 0, GAS1D_B2 / GAS1D_B1),),
    )


GAS1D_ADDITIVE = AdditiveApproximant(((-0.044941, 0.266023, F(-1)), (0.017526, 0.133344, F(-3, 2))))


def gas_1d_k3() -> CaseDescriptor:
    return CaseDescriptor(
        name="gas_1d_k3", case=gas_1d_case(), mode=Mode.TWO_POINT, schedule=Schedule(3, F(1, 2)),
        conditions=condition_keys("zero:1", "inf:0", "inf:1/2"),
        expected_params=(0.493150, 0.056122, 0.004274), scan=ScanGrid(0.01, 20.0), variable="r_s",
        baselines=(BaselineSpec("P1/3(sqrt r_s) two-point", 1, 3,
                                from_coefficients([GAS1D_C, 0.0, 0.00845]), (3, 2),
                                from_terms([(2, 0, GAS1D_B1), (3, 0, GAS1D_B2)], 1, 2, 3),
                                var_pow=F(1, 2)),),
        citation="1D electron gas: C + 0.00845 r_s; b1/r_s + b2/r_s^(3/2), b2 = 0.359933",
        additive=GAS1D_ADDITIVE,
        additive_checks=(("value at r_s = 0", Side.ZERO, F(0), GAS1D_C),
                         ("1/r_s coefficient", Side.INFINITY, F(1), GAS1D_B1),
                         ("1/r_s^(3/2) coefficient", Side.INFINITY, F(3, 2), GAS1D_B2)),
    )



GAS2D_B = (-0.472189, 0.4964, 0.5297)
GAS2D_C0 = -0.192495
GAS2D_C1P = -math.sqrt(2) * (10 / (3 * math.pi) - 1)


def gas_2d_case() -> AsymptoticCase:
    b1, b2, b3 = GAS2D_B
    return AsymptoticCase(
        small_amp=b1, small_pow=F(2), small_step=F(1),
        small_coeffs=((F(1), 0, b2 / b1), (F(2), 0, b3 / b1)),
        large_amp=GAS2D_C0, large_pow=F(0),
        # no r_s^(1/2) term at high density; r_s ln r_s = 2 t^2 ln t
        large_coeffs=((F(1), 0, 0.0), (F(2), 1, 2 * GAS2D_C1P / GAS2D_C0)),
        variable_note="u = r_s^(-1/2)",
    )


def gas_2d_k5() -> CaseDescriptor:
    nest = NestSpec((F(1), F(2), F(2), F(3), F(4)), (F(2), F(3, 2), F(1), F(1), F(-1, 2)),
                    log_slots=((3, F(1)),), prefactor_amp=GAS2D_B[0], prefactor_pow=F(2))
    return CaseDescriptor(
        name="gas_2d_k5", case=gas_2d_case(), mode=Mode.TWO_POINT, nest=nest,
        conditions=condition_keys("zero:1", "zero:2", "inf:0", "inf:1", "inf:2L"),
        var_pow=F(-1, 2),
        expected_params=(0.700849, 2.723702, 10.792193, -5.764339, 6.017150),
        oracle="gori_giorgi_2d", scan=ScanGrid(0.01, 100.0), variable="r_s",
        citation="2D electron gas: c0 = -0.192495, c1' r_s ln r_s; b1..b3 = -0.472189, 0.4964, 0.5297",
    )


def harmonium_case() -> AsymptoticCase:
    c0, c1, c2 = (3 / 2 ** (4 / 3), (3 + math.sqrt(3)) / 2, 7 / 36 * 2 ** (-2 / 3))
    b0, b1, b2, b3 = (3.0, _P["harmonium_b1"], _P["harmonium_b2"], _P["harmonium_b3"])
    return AsymptoticCase(
        small_amp=c0, small_pow=F(2), small_step=F(1),
        small_coeffs=((F(1), 0, c1 / c0), (F(2), 0, c2 / c0)),
        large_amp=b0, large_pow=F(3),
        large_coeffs=((F(3, 2), 0, b1 / b0), (F(3), 0, b2 / b0), (F(9, 2), 0, b3 / b0)),
        variable_note="u = omega^(1/3)",
    )


def harmonium_k6() -> CaseDescriptor:
    c = harmonium_case()
    small = from_coefficients([0.0, 0.0, c.small_amp, c.small_amp * c.small_coeffs[0][2]])
    large = from_terms([(-3, 0, 3.0), (F(-3, 2), 0, _P["harmonium_b1"]), (0, 0, _P["harmonium_b2"])],
                       F(1, 2), -3, 0)
    return CaseDescriptor(
        name="harmonium_k6", case=c, mode=Mode.TWO_POINT, schedule=Schedule(6, F(-1, 2)),
        conditions=condition_keys("zero:1", "zero:2", "inf:0", "inf:3/2", "inf:3", "inf:9/2"),
        var_pow=F(1, 3), variable="omega",
        expected_params=(48.4532, 564.108, 1088.39, 1221.08, 796.791, 256.0),
        scan=ScanGrid(0.01, 100.0),
        baselines=(BaselineSpec("P4/1(omega^1/3) two-point", 4, 1, small, (4, 2), large,
                                var_pow=F(1, 3)),),
        citation="two-electron harmonium: c0..c2 small-omega, b0..b3 large-omega (Catalan G)",
    )


SPHERIUM_C = (4 * LN2 - 3, 8 * LN2 ** 2 - 40 * LN2 + 24, -0.05027560, 0.01395783)


def spherium_case() -> AsymptoticCase:
    c0, c1, c2, c3 = SPHERIUM_C
    return AsymptoticCase(
        small_amp=c0, small_pow=F(0), small_step=F(1),
        small_coeffs=((F(1), 0, c1 / c0), (F(2), 0, c2 / c0), (F(3), 0, c3 / c0)),
        large_amp=-0.5, large_pow=F(-1),
        large_coeffs=((F(1, 2), 0, -1.0), (F(1), 0, 0.25), (F(3, 2), 0, 1 / 64)),
        variable_note="correlation part E - 1/R",
    )


def spherium_k5() -> CaseDescriptor:
    c0, c1, c2, c3 = SPHERIUM_C
    # R E(R) in y = sqrt(R)
    small = from_coefficients([1.0, 0.0, c0, 0.0, c1, 0.0, c2, 0.0, c3])
    large = from_coefficients([0.5, 0.5, -0.125, -1 / 128])
    return CaseDescriptor(
        name="spherium_k5", case=spherium_case(), mode=Mode.TWO_POINT,
        schedule=Schedule(5, F(1, 2), offset=Offset(1.0, F(-1))),
        conditions=condition_keys("zero:1", "zero:2", "zero:3", "inf:0", "inf:1/2"),
        expected_params=(1.05188915, 0.56453530, 0.36000617, 0.12606787, 0.01946301),
        scan=ScanGrid(0.01, 100.0), variable="R",
        baselines=(BaselineSpec("P5/5(sqrt R) two-point", 5, 5, small, (7, 4), large,
                                var_pow=F(1, 2), shift_pow=F(-1)),),
        citation="two-electron spherium: 1/R + c0 + c1 R + ...; 1/(2R) + 1/(2R^(3/2)) - ...",
    )


def all_cases() -> Dict[str, CaseDescriptor]:
    cases = [
        *(scattering(k) for k in (3, 4, 5, 6)),
        debye_k5(), fermi_dirac_k5(), fekete_k3(), phi4_k3(), njl_k4(),
        gas_1d_k3(), gas_2d_k5(), harmonium_k6(), spherium_k5(),
    ]
    return {d.name: d for d in cases}


def get_case(name: str) -> CaseDescriptor:
    cases = all_cases()
    if name not in cases:
        raise ValidationError("case", f"unknown case {name!r}; known: {', '.join(sorted(cases))}")
    return cases[name]
