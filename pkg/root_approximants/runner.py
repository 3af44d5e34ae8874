from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from .bench import emit_report, emit_scan, run_all, run_case, value_table
from .common import ApproximantError, ValidationError, log_err, report_path, set_verbosity
from .config import load_config
from .oracles import ScanGrid
from .registry import CaseDescriptor, all_cases, get_case
from .solver import build


def parse_grid(text: str) -> ScanGrid:
    """lo:hi:n -> log-spaced ScanGrid."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ValidationError("grid", f"expected lo:hi[:n], got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2]) if len(parts) == 3 else 400
        return ScanGrid(lo, hi, n)
    except ValueError as e:
        raise ValidationError("grid", str(e)) from e


def resolve(args) -> CaseDescriptor:
    if args.config:
        return load_config(args.config)
    if not args.case:
        raise ValidationError("case", "give a case name or --config")
    return get_case(args.case)


def _fmt_params(params) -> str:
    return ", ".join(f"{a:.8g}" for a in params)


def _where(d: CaseDescriptor, v: float) -> str:
    """Scan point in x, with the scan variable when the two differ."""
    if d.to_physical is None:
        return f"x={v:.4g}"
    return f"x={d.physical_x(v):.4g} ({d.variable}={v:.4g})"


# ----------------------------- commands --------------------------------------

def cmd_build(args) -> int:
    d = resolve(args)
    r = build(d.case, d.nest_spec(), d.mode, d.match_conditions())
    print(f"{d.name}: {r.spec.describe()}")
    print(f"  A = ({_fmt_params(r.params)})")
    if d.expected_params is not None:
        print(f"  printed ({_fmt_params(d.expected_params)})")
    return 0


def cmd_scan(args) -> int:
    d = resolve(args)
    grid = parse_grid(args.grid) if args.grid else d.scan
    if grid is None:
        raise ValidationError("grid", f"{d.name} has no scan grid; pass --grid lo:hi:n")
    out = args.out or report_path(f"{d.name}__scan", "dat")
    if args.columns == 4:
        res = run_case(d, args.tol, grid)
        if res.scan is None:
            raise ValidationError("columns", f"{d.name} has no oracle; use --columns 2")
        emit_scan(res.scan, out, 4)
        print(f"{d.name}: max rel err {res.scan.max_rel_err:.3e} at {_where(d, res.scan.argmax_x)}")
    else:
        r = build(d.case, d.nest_spec(), d.mode, d.match_conditions())
        emit_scan(value_table(d.evaluator(r), grid), out, 2)
    return 0


def cmd_compare(args) -> int:
    d = resolve(args)
    grid = parse_grid(args.grid) if args.grid else None
    res = run_case(d, args.tol, grid)
    print(f"{res.name} [{res.mode}, k={res.k}] status={res.status}")
    if res.params:
        print(f"  A = ({_fmt_params(res.params)})  max dev {res.param_max_dev:.3g}")
    if res.scan is not None:
        where = _where(d, res.scan.argmax_x)
        print(f"  root approximant: max rel err {res.scan.max_rel_err:.3e} at {where}")
    for b in res.baselines:
        label = b.pade.name if b.pade is not None else "-"
        at = "" if b.report is None else f" at {_where(d, b.report.argmax_x)}"
        print(f"  {b.name} ({label}): {b.status}  max rel err {b.max_rel_err:.3e}{at}")
    for c in res.additive:
        print(f"  additive {c['check']}: {c['value']:.6g} vs {c['target']:.6g}")
    return 0


def cmd_report(args) -> int:
    if args.all or not (args.case or args.config):
        cases = dict(all_cases())
        if args.config:
            d = load_config(args.config)
            cases[d.name] = d
        descriptors = list(cases.values())
    else:
        descriptors = [resolve(args)]
    grid = parse_grid(args.grid) if args.grid else None
    results = run_all(descriptors, args.tol, grid)
    out = args.out or report_path("report", args.format)
    emit_report(results, args.format, out)
    return 0


def cmd_list(args) -> int:
    for name, d in all_cases().items():
        printed = "printed" if d.expected_params is not None else "-"
        oracle = d.oracle or "no oracle"
        print(f"{name:<16} k={d.k} {d.mode.value:<10} {oracle:<16} {printed}")
    return 0


COMMANDS = {
    "build": cmd_build,
    "scan": cmd_scan,
    "compare": cmd_compare,
    "report": cmd_report,
    "list": cmd_list,
}


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description="Build and benchmark self-similar root approximants.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("case", nargs="?", help="registered case name")
    ap.add_argument("--config",
                    help="path to a .case file; with report --all it replaces or adds a registry case")
    ap.add_argument("--tol", type=float, default=None, help="parameter check tolerance (default 1e-3)")
    ap.add_argument("--grid", help="scan grid lo:hi[:n]")
    ap.add_argument("--out", help="output path")
    ap.add_argument("--format", choices=["csv", "json"], default="csv")
    ap.add_argument("--columns", type=int, choices=[2, 4], default=4)
    ap.add_argument("--all", action="store_true", help="report every registered case")
    ap.add_argument("--quiet", action="store_true")
    ap.add_argument("--verbose", action="store_true")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    if args.quiet:
        set_verbosity(logging.WARNING)
    elif args.verbose:
        set_verbosity(logging.DEBUG)
    else:
        set_verbosity(logging.INFO)

    try:
        return COMMANDS[args.command](args)
    except ApproximantError as e:
        log_err(str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
