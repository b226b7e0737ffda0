from .backends import ContainerSandbox, StubSandbox, SubprocessSandbox
from .classify import classify
from .executor import SandboxExecutor
from .report import REPORT_BEGIN, REPORT_END, SCHEMA_VERSION, ShimReport, parse_shim_report
from .result import AssertionRecordView, ExecutionResult, RawOutcome, Status, StatusCode

__all__ = [
    "AssertionRecordView",
    "ContainerSandbox",
    "ExecutionResult",
    "REPORT_BEGIN",
    "REPORT_END",
    "RawOutcome",
    "SCHEMA_VERSION",
    "SandboxExecutor",
    "ShimReport",
    "Status",
    "StatusCode",
    "StubSandbox",
    "SubprocessSandbox",
    "classify",
    "parse_shim_report",
]
