"""
Per-case benchmark: build, parameter check, error scan, Padé baselines, reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .approximants import RootApproximant, Side, expand_additive
from .common import (
    SCHEMA_VERSION, ApproximantError, InconsistentPowers, SingularSystem, ValidationError,
    ZeroOuter, fmt_rational, log_info, log_warn, read_json, write_json,
)
from .oracles import ErrorReport, ScanGrid, error_scan
from .pade import PadeApproximant, best_pade, poles_on_ray
from .registry import BaselineSpec, CaseDescriptor
from .series import coeff
from .solver import DEFAULT_SETTINGS, NewtonSettings, build, condition_residuals

CSV_COLUMNS = [
    "case", "k", "mode", "param_max_dev", "scan_max_rel_err", "scan_argmax", "baseline_name",
    "baseline_max_rel_err", "baseline_argmax", "baseline_status", "status", "schema_version",
]


@dataclass
class BaselineResult:
    name: str
    status: str  # ok | no_oracle | inapplicable | singular | pole
    pade: Optional[PadeApproximant] = None
    report: Optional[ErrorReport] = None
    poles: List[float] = field(default_factory=list)
    detail: str = ""
    argmax_x: float = math.nan  # worst point in the physical variable

    @property
    def max_rel_err(self) -> float:
        return math.nan if self.report is None else self.report.max_rel_err

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status,
            "label": None if self.pade is None else self.pade.name,
            "num_coeffs": None if self.pade is None else list(self.pade.num_coeffs),
            "den_coeffs": None if self.pade is None else list(self.pade.den_coeffs),
            "poles": self.poles,
            "max_rel_err": _num(self.max_rel_err),
            "argmax_x": _num(self.argmax_x),
            "scan": None if self.report is None else _clean(self.report.to_dict()),
            "detail": self.detail,
        }


@dataclass
class CaseResult:
    name: str
    k: int
    mode: str
    status: str  # ok | param_mismatch | zero_outer
    approximant: Optional[RootApproximant] = None
    expected: Optional[Tuple[float, ...]] = None
    param_max_dev: float = math.nan
    round_trip: float = math.nan
    scan: Optional[ErrorReport] = None
    scan_argmax_x: float = math.nan
    baselines: List[BaselineResult] = field(default_factory=list)
    additive: List[Dict[str, Any]] = field(default_factory=list)
    detail: str = ""

    @property
    def params(self) -> Tuple[float, ...]:
        return () if self.approximant is None else self.approximant.params

    def to_dict(self) -> Dict[str, Any]:
        nest = None
        if self.approximant is not None:
            spec = self.approximant.spec
            nest = {
                "term_exps": [fmt_rational(e) for e in spec.term_exps],
                "level_pows": [fmt_rational(n) for n in spec.level_pows],
                "log_slots": [[j, fmt_rational(q)] for j, q in spec.log_slots],
                "prefactor_amp": spec.prefactor_amp,
                "prefactor_pow": fmt_rational(spec.prefactor_pow),
                "describe": spec.describe(),
            }
        return {
            "case": self.name,
            "k": self.k,
            "mode": self.mode,
            "status": self.status,
            "params": list(self.params),
            "expected_params": None if self.expected is None else list(self.expected),
            "param_max_dev": _num(self.param_max_dev),
            "round_trip": _num(self.round_trip),
            "nest": nest,
            "scan": None if self.scan is None else _clean(self.scan.to_dict()),
            "scan_argmax_x": _num(self.scan_argmax_x),
            "baselines": [b.to_dict() for b in self.baselines],
            "additive": self.additive,
            "detail": self.detail,
        }


def _num(x: Optional[float]) -> Optional[float]:
    return None if x is None or not math.isfinite(x) else float(x)


def _clean(obj: Any) -> Any:
    """Non-finite floats become None so the JSON stays standard."""
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


# ----------------------------- running --------------------------------------

def param_deviation(params: Sequence[float], expected: Sequence[float]) -> float:
    """Largest relative deviation |A - A_printed| / |A_printed|."""
    return max(abs(a - e) / max(abs(e), 1e-300) for a, e in zip(params, expected))


def run_baseline(b: BaselineSpec, d: CaseDescriptor, grid: Optional[ScanGrid]) -> BaselineResult:
    try:
        if b.table:
            oracle = d.oracle_fn()
            if oracle is None or grid is None:
                return BaselineResult(b.name, "no_oracle", detail="best-of-table needs an oracle")
            best = best_pade(b.candidates(), oracle, grid)
            if best is None:
                return BaselineResult(b.name, "pole", detail="every table entry has a pole on the ray")
            p, report = best
            return BaselineResult(b.name, "ok", p, report, argmax_x=d.physical_x(report.argmax_x))
        p = b.build()
    except InconsistentPowers as e:
        log_info(f"{d.name}: baseline {b.name} inapplicable ({e})")
        return BaselineResult(b.name, "inapplicable", detail=str(e))
    except SingularSystem as e:
        log_warn(f"{d.name}: baseline {b.name} singular ({e})")
        return BaselineResult(b.name, "singular", detail=str(e))

    if grid is not None:
        poles = poles_on_ray(p, grid.hi)
        if poles:
            log_warn(f"{d.name}: baseline {p.name} has a pole at x={poles[0]:.6g}")
            return BaselineResult(b.name, "pole", p, poles=poles)
    oracle = d.oracle_fn()
    if oracle is None or grid is None:
        return BaselineResult(b.name, "no_oracle", p)
    report = error_scan(p, oracle, grid)
    return BaselineResult(b.name, "ok", p, report, argmax_x=d.physical_x(report.argmax_x))


def additive_checks(d: CaseDescriptor, order: int = 2) -> List[Dict[str, Any]]:
    out = []
    if d.additive is None:
        return out
    for label, side, exponent, target in d.additive_checks:
        s = expand_additive(d.additive, side, order)
        value = coeff(s, exponent)
        out.append({"check": label, "side": Side(side).value, "exponent": fmt_rational(exponent),
                    "value": value, "target": target,
                    "rel_dev": abs(value - target) / max(abs(target), 1e-300)})
    return out


def run_case(d: CaseDescriptor, tol: Optional[float] = None, grid: Optional[ScanGrid] = None,
             settings: NewtonSettings = DEFAULT_SETTINGS, keep_points: bool = True) -> CaseResult:
    """Build the approximant, check printed parameters, scan it and its baselines."""
    tol = d.param_tol if tol is None else tol
    grid = grid or d.scan
    baselines = [run_baseline(b, d, grid) for b in d.baselines]
    additive = additive_checks(d)

    try:
        spec = d.nest_spec()
    except ZeroOuter as e:
        log_warn(f"{d.name}: {e}")
        return CaseResult(d.name, d.k, d.mode.value, "zero_outer", expected=d.expected_params,
                          baselines=baselines, additive=additive, detail=str(e))

    conds = d.match_conditions()
    r = build(d.case, spec, d.mode, conds, settings)
    result = CaseResult(d.name, d.k, d.mode.value, "ok", r, d.expected_params,
                        baselines=baselines, additive=additive)
    if conds:
        result.round_trip = condition_residuals(r, conds)

    if d.expected_params is not None:
        result.param_max_dev = param_deviation(r.params, d.expected_params)
        if result.param_max_dev > tol:
            result.status = "param_mismatch"
            log_warn(f"{d.name}: parameters deviate by {result.param_max_dev:.3g} (tol {tol:g})")

    oracle = d.oracle_fn()
    if oracle is not None and grid is not None:
        result.scan = error_scan(d.evaluator(r), oracle, grid, keep_points)
        result.scan_argmax_x = d.physical_x(result.scan.argmax_x)
        if result.scan.failures:
            log_warn(f"{d.name}: {len(result.scan.failures)} scan points failed")
    return result


def run_all(descriptors: Iterable[CaseDescriptor], tol: Optional[float] = None,
            grid: Optional[ScanGrid] = None) -> List[CaseResult]:
    results = []
    for d in descriptors:
        log_info(f"Running {d.name}")
        results.append(run_case(d, tol, grid))
    return results


# ----------------------------- reports --------------------------------------

def report_rows(results: Sequence[CaseResult]) -> List[Dict[str, Any]]:
    """One row per case; the first baseline fills the baseline columns. Argmax columns are in x."""
    rows = []
    for res in results:
        b = res.baselines[0] if res.baselines else None
        rows.append({
            "case": res.name,
            "k": res.k,
            "mode": res.mode,
            "param_max_dev": res.param_max_dev,
            "scan_max_rel_err": math.nan if res.scan is None else res.scan.max_rel_err,
            "scan_argmax": res.scan_argmax_x,
            "baseline_name": "" if b is None else b.name,
            "baseline_max_rel_err": math.nan if b is None else b.max_rel_err,
            "baseline_argmax": math.nan if b is None else b.argmax_x,
            "baseline_status": "" if b is None else b.status,
            "status": res.status,
            "schema_version": SCHEMA_VERSION,
        })
    return rows


def emit_report(results: Sequence[CaseResult], fmt: str, path: Union[str, Path]) -> Path:
    if not results:
        raise ValidationError("results", "nothing to report")
    path = Path(path)
    try:
        if fmt == "csv":
            path.parent.mkdir(parents=True, exist_ok=True)
            df = pd.DataFrame(report_rows(results), columns=CSV_COLUMNS)
            df.to_csv(path, index=False, float_format="%.10g")
        elif fmt == "json":
            write_json(path, {"schema_version": SCHEMA_VERSION,
                              "cases": [r.to_dict() for r in results]})
        else:
            raise ValidationError("format", f"unknown report format {fmt!r}")
    except OSError as e:
        raise ApproximantError(f"cannot write report {path}: {e}") from e
    log_info(f"Wrote {fmt} report for {len(results)} case(s) to {path}")
    return path


def read_report_json(path: Union[str, Path]) -> Dict[str, Any]:
    data = read_json(Path(path))
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError("schema_version", f"expected {SCHEMA_VERSION}, got {data.get('schema_version')!r}")
    return data


def scan_table(report: ErrorReport) -> np.ndarray:
    """(x, approx, oracle, rel_err) rows of a scan."""
    if not report.per_point:
        return np.zeros((0, 4))
    return np.array(report.per_point, dtype=float)


def value_table(fn, grid: ScanGrid) -> np.ndarray:
    """(x, value) rows; points where fn fails are left out."""
    rows = []
    for x in grid.points():
        try:
            rows.append((float(x), float(fn(float(x)))))
        except (ApproximantError, ValueError, OverflowError, ZeroDivisionError):
            continue
    return np.array(rows, dtype=float).reshape(-1, 2)


def emit_scan(data: Union[ErrorReport, np.ndarray], path: Union[str, Path], columns: int = 4) -> Path:
    """Plot-ready whitespace-separated text: (x, value) or (x, approx, oracle, rel_err)."""
    table = scan_table(data) if isinstance(data, ErrorReport) else np.asarray(data, dtype=float)
    if columns not in (2, 4):
        raise ValidationError("columns", f"expected 2 or 4, got {columns}")
    if table.shape[1] < columns:
        raise ValidationError("columns", f"scan has {table.shape[1]} columns, {columns} requested")
    header = "x value" if columns == 2 else "x approx oracle rel_err"
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, table[:, :columns], fmt="%.10g", header=header)
    except OSError as e:
        raise ApproximantError(f"cannot write scan {path}: {e}") from e
    log_info(f"Wrote {len(table)} scan rows to {path}")
    return path
