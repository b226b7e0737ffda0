"""Execution outcome taxonomy shared by sandbox backends and the
orchestrator."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..oracle.model import AssertionTarget


class StatusCode(Enum):
    NO_VIOLATION = "NoViolation"
    ASSERTION_VIOLATION = "AssertionViolation"
    SYNTAX_ERROR = "SyntaxError"
    RUNTIME_ERROR = "RuntimeError"
    TIMEOUT = "Timeout"


@dataclass(frozen=True)
class Status:
    """One of the five execution statuses; assertion violations carry the
    target of the first failing assertion."""

    code: StatusCode
    target: AssertionTarget | None = None

    def __post_init__(self):
        if (self.code is StatusCode.ASSERTION_VIOLATION) != (self.target is not None):
            raise ValueError("target must be set exactly for assertion violations")

    def label(self) -> str:
        if self.code is StatusCode.ASSERTION_VIOLATION:
            return f"AssertionViolation({self.target.value})"  # type: ignore[union-attr]
        return self.code.value

    @classmethod
    def from_label(cls, label: str) -> "Status":
        if label.startswith("AssertionViolation("):
            target = label[len("AssertionViolation(") : -1]
            return cls(StatusCode.ASSERTION_VIOLATION, AssertionTarget(target))
        return cls(StatusCode(label))


@dataclass(frozen=True)
class AssertionRecordView:
    """Host-side view of one shim assertion record."""

    index: int
    passed: bool
    target: AssertionTarget
    message: str
    failure_detail: str | None = None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "passed": self.passed,
            "target": self.target.value,
            "message": self.message,
            "failure_detail": self.failure_detail,
        }


@dataclass(frozen=True)
class ExecutionResult:
    status: Status
    message: str
    stdout: str
    stderr: str
    assertion_records: tuple[AssertionRecordView, ...] = ()
    duration: float = 0.0

    def to_dict(self) -> dict:
        return {
            "status": self.status.label(),
            "message": self.message,
            "stdout": self.stdout,
            "stderr": self.stderr,
            "assertion_records": [r.to_dict() for r in self.assertion_records],
            "duration": self.duration,
        }

    def render_log(self, max_stream_chars: int = 4000) -> str:
        """Execution log text embedded in self-review / repair prompts."""
        parts = [f"status: {self.status.label()}"]
        if self.message:
            parts.append(f"message: {self.message}")
        for record in self.assertion_records:
            state = "PASS" if record.passed else "FAIL"
            line = f"assertion[{record.index}] {state} ({record.target.value}): {record.message}"
            if record.failure_detail:
                line += f"\n  detail: {record.failure_detail}"
            parts.append(line)
        if self.stdout.strip():
            parts.append("stdout:\n" + self.stdout[:max_stream_chars])
        if self.stderr.strip():
            parts.append("stderr:\n" + self.stderr[:max_stream_chars])
        return "\n".join(parts)


@dataclass(frozen=True)
class RawOutcome:
    """What actually came back from the sandboxed process."""

    exit_code: int | None
    stdout: str
    stderr: str
    timed_out: bool = False
    duration: float = 0.0

    def to_dict(self) -> dict:
        return {
            "exit_code": self.exit_code,
            "stdout": self.stdout,
            "stderr": self.stderr,
            "timed_out": self.timed_out,
            "duration": self.duration,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RawOutcome":
        return cls(
            exit_code=data.get("exit_code"),
            stdout=data.get("stdout", ""),
            stderr=data.get("stderr", ""),
            timed_out=data.get("timed_out", False),
            duration=data.get("duration", 0.0),
        )
