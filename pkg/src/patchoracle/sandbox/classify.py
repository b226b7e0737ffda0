"""Total classification of raw process outcomes into execution statuses.

Precedence:

1. A parseable runner report is authoritative: completed runs map to
   NoViolation / AssertionViolation from the records; aborted runs map to
   SyntaxError (program failed to compile) or RuntimeError (the terminating
   exception).
2. Without a report, a timeout flag wins: a killed process also has a
   nonzero exit code, so this must be checked before the exit-code rule.
3. A compile-stage interpreter diagnostic maps to SyntaxError.
4. Any other nonzero exit or uncaught traceback maps to RuntimeError,
   as does a clean exit that never produced a report (broken runner
   contract).
"""

from __future__ import annotations

import re

from .report import ShimReport, parse_shim_report
from .result import RawOutcome, Status, StatusCode

_COMPILE_ERRORS = ("SyntaxError", "IndentationError", "TabError")
_LAST_EXC_LINE = re.compile(r"^(\w+(?:\.\w+)*)(?::|$)", re.MULTILINE)


def _classify_report(report: ShimReport) -> tuple[Status, str]:
    if report.aborted:
        exc_type, exc_msg = report.exception or ("UnknownError", "")
        message = f"{exc_type}: {exc_msg}" if exc_msg else exc_type
        if exc_type in _COMPILE_ERRORS:
            return Status(StatusCode.SYNTAX_ERROR), message
        return Status(StatusCode.RUNTIME_ERROR), message
    failure = report.first_failure
    if failure is not None:
        message = failure.failure_detail or failure.message
        return (
            Status(StatusCode.ASSERTION_VIOLATION, failure.target),
            message,
        )
    return Status(StatusCode.NO_VIOLATION), ""


def _stderr_tail(stderr: str, lines: int = 5) -> str:
    tail = [l for l in stderr.strip().splitlines() if l.strip()]
    return "\n".join(tail[-lines:])


def _looks_like_compile_failure(stderr: str) -> bool:
    tail = _stderr_tail(stderr, lines=3)
    return any(f"{name}:" in tail or tail.endswith(name) for name in _COMPILE_ERRORS)


def classify(raw: RawOutcome) -> tuple[Status, str, ShimReport | None]:
    """Map a raw outcome to (status, first failing diagnostic, report)."""
    report = parse_shim_report(raw.stdout)
    if report is not None:
        status, message = _classify_report(report)
        return status, message, report
    if raw.timed_out:
        return (
            Status(StatusCode.TIMEOUT),
            f"execution timed out after {raw.duration:.0f}s",
            None,
        )
    if _looks_like_compile_failure(raw.stderr):
        return Status(StatusCode.SYNTAX_ERROR), _stderr_tail(raw.stderr), None
    if raw.exit_code != 0:
        return Status(StatusCode.RUNTIME_ERROR), _stderr_tail(raw.stderr), None
    return (
        Status(StatusCode.RUNTIME_ERROR),
        "process exited cleanly without emitting a report",
        None,
    )
