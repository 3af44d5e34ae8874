"""
.case file loader.

    # comment
    [case]
    name = fermi_dirac_k5
    small_amp = 0.6931471805599453
    small_coeffs = 1:0.7213475204444817, 2:0.18033688011112042
    [schedule]
    k = 5
    [mode]
    kind = amplitude

Flat sections, `key = value` lines, fixed key set. Exponents are exact rationals;
coefficient items are `exponent:value`, with an `L` suffix marking a log term.
"""
from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from .approximants import AsymptoticCase, NestSpec, Term
from .common import (
    ApproximantError, ParseError, ValidationError, case_path, log_info, parse_number,
    parse_rational, read_text_lines,
)
from .oracles import ScanGrid
from .registry import CaseDescriptor, Schedule, condition_keys
from .solver import Mode

SECTION_RE = re.compile(r"^\[\s*([A-Za-z_]\w*)\s*\]$")
KEY_RE = re.compile(r"^([A-Za-z_]\w*)\s*=\s*(.*)$")

KEYS: Dict[str, Tuple[str, ...]] = {
    "case": ("name", "variable_note", "var_pow", "small_amp", "small_pow", "small_step",
             "small_coeffs", "large_amp", "large_pow", "large_coeffs", "oracle",
             "expected_params", "param_tol", "citation"),
    "schedule": ("k", "sigma", "step", "total_pow", "n_k", "term_exps", "level_pows",
                 "log_slots", "prefactor_amp", "prefactor_pow"),
    "mode": ("kind", "conditions"),
    "scan": ("lo", "hi", "n", "spacing", "x_pow"),
}

Section = Dict[str, Tuple[str, int]]  # key -> (raw value, line)


# ----------------------------- parsing --------------------------------------

def parse_sections(lines: List[str]) -> Dict[str, Section]:
    """Split lines into sections; syntax errors carry line and column."""
    out: Dict[str, Section] = {}
    current: Optional[str] = None
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        col = len(raw) - len(raw.lstrip()) + 1
        m = SECTION_RE.match(line)
        if m:
            current = m.group(1)
            if current not in KEYS:
                raise ValidationError(current, f"unknown section (line {no})")
            if current in out:
                raise ParseError(f"section [{current}] repeated", no, col)
            out[current] = {}
            continue
        if line.startswith("["):
            raise ParseError("malformed section header", no, col)
        m = KEY_RE.match(line)
        if not m:
            raise ParseError("expected `key = value`", no, col)
        if current is None:
            raise ParseError("key outside of any section", no, col)
        key, value = m.group(1), m.group(2).strip()
        if key not in KEYS[current]:
            raise ValidationError(key, f"unknown key in [{current}] (line {no})")
        if key in out[current]:
            raise ValidationError(key, f"given twice (line {no})")
        if not value:
            raise ParseError(f"empty value for {key}", no, col + len(raw.strip()))
        out[current][key] = (value, no)
    return out


def _get(sec: Section, key: str, conv: Callable[[str], Any], default: Any = None,
         required: bool = False) -> Any:
    if key not in sec:
        if required:
            raise ValidationError(key, "required")
        return default
    value, no = sec[key]
    try:
        return conv(value)
    except (ValueError, ZeroDivisionError, ApproximantError) as e:
        raise ValidationError(key, f"{e} (line {no})") from e


def _split(value: str) -> List[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def parse_terms(value: str) -> Tuple[Term, ...]:
    """`1:0.5, 2L:-0.17` -> ((1, 0, 0.5), (2, 1, -0.17))"""
    out = []
    for item in _split(value):
        exp, sep, val = item.partition(":")
        if not sep:
            raise ValueError(f"coefficient item {item!r} is not exponent:value")
        exp = exp.strip()
        log = exp.endswith("L")
        out.append((parse_rational(exp.rstrip("L")), int(log), parse_number(val)))
    return tuple(out)


def parse_rationals(value: str) -> Tuple[Fraction, ...]:
    return tuple(parse_rational(v) for v in _split(value))


def parse_numbers(value: str) -> Tuple[float, ...]:
    return tuple(parse_number(v) for v in _split(value))


def parse_log_slots(value: str) -> Tuple[Tuple[int, Fraction], ...]:
    out = []
    for item in _split(value):
        idx, sep, q = item.partition(":")
        if not sep:
            raise ValueError(f"log slot {item!r} is not index:q")
        out.append((int(idx), parse_rational(q)))
    return tuple(out)


# ----------------------------- descriptor --------------------------------------

def _build_case(sec: Section) -> AsymptoticCase:
    try:
        return AsymptoticCase(
            small_amp=_get(sec, "small_amp", parse_number, required=True),
            small_pow=_get(sec, "small_pow", parse_rational, Fraction(0)),
            small_step=_get(sec, "small_step", parse_rational, Fraction(1)),
            small_coeffs=_get(sec, "small_coeffs", parse_terms, ()),
            large_amp=_get(sec, "large_amp", parse_number),
            large_pow=_get(sec, "large_pow", parse_rational),
            large_coeffs=_get(sec, "large_coeffs", parse_terms, ()),
            variable_note=_get(sec, "variable_note", str, ""),
        )
    except ValueError as e:
        raise ValidationError("case", str(e)) from e


def _build_schedule(sec: Section, case: AsymptoticCase) -> Tuple[Optional[Schedule], Optional[NestSpec]]:
    explicit = [k for k in ("term_exps", "level_pows", "log_slots") if k in sec]
    standard = [k for k in ("k", "sigma", "step", "total_pow", "n_k") if k in sec]
    if explicit and standard:
        raise ValidationError(explicit[0], f"cannot be combined with {standard[0]}")

    if explicit:
        exps = _get(sec, "term_exps", parse_rationals, required=True)
        pows = _get(sec, "level_pows", parse_rationals, required=True)
        try:
            nest = NestSpec(exps, pows,
                            log_slots=_get(sec, "log_slots", parse_log_slots, ()),
                            prefactor_amp=_get(sec, "prefactor_amp", parse_number, case.small_amp),
                            prefactor_pow=_get(sec, "prefactor_pow", parse_rational, case.small_pow))
        except ValueError as e:
            raise ValidationError("level_pows", str(e)) from e
        if case.has_large:
            total = nest.prefactor_pow + nest.growth
            if total != case.large_pow:
                raise ValidationError("level_pows", f"power mismatch: nest grows as u^{total}, "
                                                    f"large side is u^{case.large_pow}")
        return None, nest

    k = _get(sec, "k", int, required=True)
    step = _get(sec, "step", parse_rational, Fraction(1))
    total = _get(sec, "total_pow", parse_rational)
    if case.has_large:
        if total is not None and total != case.total_pow:
            raise ValidationError("total_pow", f"power mismatch: {total} vs large_pow - small_pow = "
                                               f"{case.total_pow}")
        total = case.total_pow
    n_k = _get(sec, "n_k", parse_rational)
    if n_k is not None:
        if total is None:
            total = n_k * k * step
        elif n_k * k * step != total:
            raise ValidationError("n_k", f"power mismatch: n_k*k*step = {n_k * k * step}, "
                                         f"beta - alpha = {total}")
    if "prefactor_amp" in sec or "prefactor_pow" in sec:
        raise ValidationError("prefactor_amp" if "prefactor_amp" in sec else "prefactor_pow",
                              "prefactor only applies to an explicit nest")
    return Schedule(k, _get(sec, "sigma", parse_rational, Fraction(1)), step, total_pow=total), None


def descriptor_from_sections(sections: Dict[str, Section]) -> CaseDescriptor:
    for required in ("case", "schedule", "mode"):
        if required not in sections:
            raise ValidationError(required, "section missing")
    c, s, m = sections["case"], sections["schedule"], sections["mode"]
    case = _build_case(c)
    schedule, nest = _build_schedule(s, case)

    mode = _get(m, "kind", Mode, required=True)
    conditions = _get(m, "conditions", lambda v: condition_keys(*_split(v)), ())
    if conditions and mode is not Mode.TWO_POINT:
        raise ValidationError("conditions", f"only used by two_point, kind is {mode.value}")

    scan, x_pow = None, None
    if "scan" in sections:
        g = sections["scan"]
        x_pow = _get(g, "x_pow", parse_rational)
        try:
            scan = ScanGrid(_get(g, "lo", parse_number, required=True),
                            _get(g, "hi", parse_number, required=True),
                            _get(g, "n", int, 400), _get(g, "spacing", str, "log"))
        except ValueError as e:
            raise ValidationError("scan", str(e)) from e

    return CaseDescriptor(
        name=_get(c, "name", str, required=True),
        case=case, mode=mode, schedule=schedule, nest=nest, conditions=conditions,
        var_pow=_get(c, "var_pow", parse_rational, Fraction(1)),
        expected_params=_get(c, "expected_params", parse_numbers),
        param_tol=_get(c, "param_tol", parse_number, 1e-3),
        oracle=_get(c, "oracle", str),
        scan=scan,
        citation=_get(c, "citation", str, ""),
        to_physical=None if x_pow is None else (lambda v: v ** float(x_pow)),
    )


def load_config(path) -> CaseDescriptor:
    """Read a .case file (a bare name is looked up in CASES_DIR)."""
    p = Path(path)
    if not p.suffix and not p.exists():
        p = case_path(str(path))
    try:
        lines = read_text_lines(p)
    except OSError as e:
        raise ValidationError("config", f"cannot read {p}: {e}") from e
    d = descriptor_from_sections(parse_sections(lines))
    log_info(f"Loaded case {d.name} from {p}")
    return d
