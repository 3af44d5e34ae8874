from __future__ import annotations

import os
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

# =========================
# Project-relative paths
# =========================

# <repo_root>/root_approximants/common.py  -> repo_root
REPO_ROOT = Path(__file__).resolve().parents[1]
CASES_DIR = Path(os.getenv("ROOT_APPROX_CASES_DIR", REPO_ROOT / "cases"))
REPORTS_DIR = REPO_ROOT / "reports"

SCHEMA_VERSION = 1


def case_path(name: str) -> Path:
    return CASES_DIR / f"{name}.case"


def report_path(stem: str, fmt: str) -> Path:
    REPORTS_DIR.mkdir(parents=True, exist_ok=True)
    return REPORTS_DIR / f"{stem}.{fmt}"


# =========================
# Errors
# =========================

class ApproximantError(Exception):
    """Base class for every error raised by the toolkit."""


class SeriesError(ApproximantError):
    pass


class LogOverflow(SeriesError):
    pass


class NonPositiveLead(SeriesError):
    pass


class LogAtLead(SeriesError):
    pass


class ZeroPower(SeriesError):
    pass


class OffGrid(SeriesError):
    pass


class BeyondTruncation(SeriesError):
    pass


class ZeroOuter(ApproximantError):
    pass


class DegeneratePivot(ApproximantError):
    pass


class NoConvergence(ApproximantError):
    def __init__(self, msg: str, best_residual: float = math.inf,
                 best_params: Optional[Iterable[float]] = None, estimate: Optional[float] = None):
        super().__init__(msg)
        self.best_residual = best_residual
        self.best_params = None if best_params is None else list(best_params)
        self.estimate = estimate


class NegativeBase(ApproximantError):
    def __init__(self, msg: str, level: int = 0, x: float = math.nan):
        super().__init__(msg)
        self.level = level
        self.x = x


class NonFinite(ApproximantError):
    pass


class SingularSystem(ApproximantError):
    pass


class InconsistentPowers(ApproximantError):
    pass


class PoleAt(ApproximantError):
    def __init__(self, x: float):
        super().__init__(f"denominator vanishes at x={x:.6g}")
        self.x = x


class ParseError(ApproximantError):
    def __init__(self, msg: str, line: int, column: int = 1):
        super().__init__(f"{msg} (line {line}, column {column})")
        self.line = line
        self.column = column


class ValidationError(ApproximantError):
    def __init__(self, key: str, msg: str = ""):
        super().__init__(f"{key}: {msg}" if msg else key)
        self.key = key


# =========================
# Numbers
# =========================

def parse_rational(text: Any) -> Fraction:
    """
    Exact exponent parsing: accepts Fraction, int, "p/q", "3", "-0.25".
    Floats are rejected; exponents must stay exact.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise ValueError(f"exponent must be rational, got float {text!r}")
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational number: {text!r}") from e


def parse_number(text: Any) -> float:
    if isinstance(text, (int, float, Fraction)):
        return float(text)
    s = str(text).strip()
    if "/" in s:
        return float(parse_rational(s))
    return float(s)


def fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# =========================
# I/O helpers
# =========================

def write_json(path: Path, obj: Dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(obj, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")


def read_json(path: Path) -> Dict[str, Any]:
    with path.open("r", encoding="utf-8") as f:
        return json.load(f)


def read_text_lines(path: Path) -> list[str]:
    with path.open("r", encoding="utf-8") as f:
        return f.read().splitlines()


# =========================
# Lightweight logger
# =========================

class _TagFormatter(logging.Formatter):
    # "[TAG] message", with WARNING shortened to WARN
    def format(self, record: logging.LogRecord) -> str:
        tag = "WARN" if record.levelno == logging.WARNING else record.levelname
        return f"[{tag}] {record.getMessage()}"


_LOGGER = logging.getLogger("root_approximants")
if not _LOGGER.handlers:
    _handler = logging.StreamHandler(sys.stdout)
    _handler.setFormatter(_TagFormatter())
    _LOGGER.addHandler(_handler)
    _LOGGER.setLevel(logging.INFO)
    _LOGGER.propagate = False


def set_verbosity(level: int) -> None:
    _LOGGER.setLevel(level)


def log_info(msg: str) -> None:
    _LOGGER.info(msg)


def log_warn(msg: str) -> None:
    _LOGGER.warning(msg)


def log_err(msg: str) -> None:
    _LOGGER.error(msg)
