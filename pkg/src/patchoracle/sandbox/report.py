"""Host-side parser for the in-sandbox runner's sentinel-delimited report.

Wire format (shared with the runner, versioned):

    ===ORACLE-REPORT-BEGIN===
    {"schema_version": 1, "records": [...], "counts": {...},
     "aborted": false, "exception": null, "copy_fallback": false}
    ===ORACLE-REPORT-END===

Each record is ``{"index", "passed", "kind", "target", "message",
"failure_detail"}``. The program's own stdout stays outside the sentinels.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from ..oracle.model import AssertionTarget
from .result import AssertionRecordView

logger = logging.getLogger(__name__)

REPORT_BEGIN = "===ORACLE-REPORT-BEGIN==="
REPORT_END = "===ORACLE-REPORT-END==="
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ShimReport:
    records: tuple[AssertionRecordView, ...]
    aborted: bool
    exception: tuple[str, str] | None  # (type name, message)
    copy_fallback: bool = False
    schema_version: int = SCHEMA_VERSION

    @property
    def first_failure(self) -> AssertionRecordView | None:
        for record in self.records:
            if not record.passed:
                return record
        return None


def parse_shim_report(stdout: str) -> ShimReport | None:
    """Extract and parse the report block; ``None`` when absent or invalid.

    A malformed block (zero or several sentinel pairs, bad JSON, wrong
    schema) classifies the execution through the error paths instead, so
    this never raises.
    """
    begin = stdout.count(REPORT_BEGIN)
    end = stdout.count(REPORT_END)
    if begin != 1 or end != 1:
        if begin or end:
            logger.warning("expected exactly one report block, found %d/%d", begin, end)
        return None
    start = stdout.index(REPORT_BEGIN) + len(REPORT_BEGIN)
    stop = stdout.index(REPORT_END)
    if stop < start:
        return None
    payload = stdout[start:stop].strip()
    try:
        data = json.loads(payload)
    except json.JSONDecodeError as exc:
        logger.warning("report block is not valid JSON: %s", exc)
        return None
    if not isinstance(data, dict) or data.get("schema_version") != SCHEMA_VERSION:
        logger.warning("unsupported report schema: %r", data.get("schema_version"))
        return None

    try:
        records = tuple(
            AssertionRecordView(
                index=int(r["index"]),
                passed=bool(r["passed"]),
                target=AssertionTarget(r.get("target", "Cross")),
                message=str(r.get("message", "")),
                failure_detail=r.get("failure_detail"),
            )
            for r in data.get("records", [])
        )
        exception = data.get("exception")
        exc_pair = (
            (str(exception["type"]), str(exception.get("message", "")))
            if exception
            else None
        )
        return ShimReport(
            records=records,
            aborted=bool(data.get("aborted", False)),
            exception=exc_pair,
            copy_fallback=bool(data.get("copy_fallback", False)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        logger.warning("report block malformed: %s", exc)
        return None
