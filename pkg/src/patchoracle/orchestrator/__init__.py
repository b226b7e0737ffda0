from .artifacts import METADATA_FILE, RunArtifacts
from .engine import Pipeline, render_code_context
from .state import (
    Budgets,
    NextAction,
    OrchestratorState,
    ValidationReport,
    Verdict,
    next_action,
)

__all__ = [
    "Budgets",
    "METADATA_FILE",
    "NextAction",
    "OrchestratorState",
    "Pipeline",
    "RunArtifacts",
    "ValidationReport",
    "Verdict",
    "next_action",
    "render_code_context",
]
