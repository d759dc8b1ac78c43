"""The common result record returned by every check."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from qsv.errors import ConstraintError, DivergenceError, PoleError, TruncationError

PASS = "pass"
FAIL = "fail"
SKIPPED_POLE = "skipped-pole"
DIVERGED = "diverged"
STATUSES = (PASS, FAIL, SKIPPED_POLE, DIVERGED)

TINY = 1e-300


@dataclass
class CheckResult:
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    status: str
    terms_used: int = 0
    tol: float = 0.0
    exact: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def as_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "status": self.status,
            "terms_used": self.terms_used,
        }


def compare(lhs, rhs, tol, *, terms_used=0, **diagnostics) -> CheckResult:
    """Build a CheckResult from two evaluated sides.

    Fractions on both sides are compared exactly; the floats stored in the
    record are only for reporting.
    """
    if isinstance(lhs, Fraction) and isinstance(rhs, Fraction):
        diff = lhs - rhs
        scale = max(abs(lhs), abs(rhs))
        rel = float(abs(diff) / scale) if scale else float(abs(diff))
        return CheckResult(float(lhs), float(rhs), float(abs(diff)), rel,
                           PASS if diff == 0 else FAIL, terms_used, 0.0, True,
                           dict(diagnostics))
    lhs, rhs = float(lhs), float(rhs)
    abs_err = abs(lhs - rhs)
    rel_err = abs_err / max(abs(lhs), abs(rhs), TINY)
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        status = DIVERGED
    else:
        status = PASS if rel_err <= tol else FAIL
    return CheckResult(lhs, rhs, abs_err, rel_err, status, terms_used, tol,
                       False, dict(diagnostics))


def failed_result(status: str, **diagnostics) -> CheckResult:
    nan = float("nan")
    return CheckResult(nan, nan, nan, nan, status, diagnostics=dict(diagnostics))


def guarded(fn):
    """Convert evaluator exceptions into statuses instead of raising."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except PoleError as exc:
            return failed_result(SKIPPED_POLE, reason=str(exc), index=exc.index,
                                 factor=exc.factor)
        except ConstraintError as exc:
            return failed_result(SKIPPED_POLE, reason=f"constraint: {exc}")
        except (DivergenceError, TruncationError) as exc:
            return failed_result(DIVERGED, reason=str(exc),
                                 index=getattr(exc, "index", None))

    return wrapper
