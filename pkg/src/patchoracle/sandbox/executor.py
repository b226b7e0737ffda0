"""Execution front end: run a comparison program, classify the outcome."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

from ..oracle.builder import ComparisonProgram
from .classify import classify
from .result import ExecutionResult


@dataclass
class SandboxExecutor:
    """Binds one backend with a parallelism bound.

    Executions are independent; a semaphore caps how many sandboxes run at
    once when adequacy scoring fans out over mutants.
    """

    backend: object
    max_parallel: int = 4

    def __post_init__(self):
        self._slots = threading.Semaphore(self.max_parallel)

    def execute(
        self, program: ComparisonProgram, workdir: Path | None = None
    ) -> ExecutionResult:
        with self._slots:
            raw = self.backend.run(program.source, workdir)
        status, message, report = classify(raw)
        timeout = getattr(self.backend, "timeout", None)
        duration = raw.duration if timeout is None else min(raw.duration, timeout)
        return ExecutionResult(
            status=status,
            message=message,
            stdout=raw.stdout,
            stderr=raw.stderr,
            assertion_records=report.records if report else (),
            duration=duration,
        )
