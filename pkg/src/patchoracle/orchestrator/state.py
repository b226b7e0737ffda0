"""Orchestrator state, budgets, next-action selection, and the final report."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..oracle.model import AssertionTarget, PatchOracle
from ..sandbox.result import ExecutionResult, StatusCode


@dataclass(frozen=True)
class Budgets:
    """All loop bounds in one place; every value is config-overridable."""

    max_llm_calls: int = 25  # M
    max_enhancements: int = 5  # N
    review_cap: int = 3
    repair_cap: int = 3  # attempts per distinct error signature
    format_retries: int = 3

    def __post_init__(self):
        for name in ("max_llm_calls", "max_enhancements", "review_cap", "repair_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"budget {name} must be positive")


@dataclass
class OrchestratorState:
    """Mutable loop state: call count, iteration count, last execution."""

    oracle: PatchOracle | None = None
    q: int = 0
    max_llm_calls: int = 25
    iterations: int = 0
    max_enhancements: int = 5
    review_round: int = 0
    last_result: ExecutionResult | None = None

    def snapshot(self) -> dict:
        return {
            "q": self.q,
            "max_llm_calls": self.max_llm_calls,
            "iterations": self.iterations,
            "max_enhancements": self.max_enhancements,
            "review_round": self.review_round,
            "oracle_revision": self.oracle.revision if self.oracle else None,
        }


class NextAction(Enum):
    ENHANCE = "Enhance"
    SELF_REVIEW = "SelfReview"
    REPAIR = "Repair"
    TERMINATE_CONSISTENT = "TerminateConsistent"
    TERMINATE_BUDGET = "TerminateBudget"


def next_action(state: OrchestratorState) -> NextAction:
    """Select the next phase from the last execution status and the budgets.

    Total over the status space:

    - a spent call budget terminates regardless of anything else;
    - a clean run enhances the oracle, or terminates consistent once the
      enhancement-iteration budget is used up;
    - an assertion violation on the post-patch version or across versions
      goes to self-review;
    - a violation on the pre-patch version is a reasoning error (the
      pre-patch version is ground truth) and goes to repair, as do syntax
      errors, runtime errors, and timeouts.

    Enhancement iterations bound only the Enhance branch; review and repair
    are bounded by their own caps, not by the iteration budget.
    """
    if state.last_result is None:
        raise ValueError("next_action requires a last execution result")
    if state.q >= state.max_llm_calls:
        return NextAction.TERMINATE_BUDGET

    status = state.last_result.status
    if status.code is StatusCode.NO_VIOLATION:
        if state.iterations >= state.max_enhancements:
            return NextAction.TERMINATE_CONSISTENT
        return NextAction.ENHANCE
    if status.code is StatusCode.ASSERTION_VIOLATION:
        if status.target is AssertionTarget.PRE:
            return NextAction.REPAIR
        return NextAction.SELF_REVIEW
    # SyntaxError / RuntimeError / Timeout
    return NextAction.REPAIR


class Verdict(Enum):
    CONSISTENT = "Consistent"
    INCONSISTENT = "Inconsistent"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ValidationReport:
    """The final report: verdict plus the evidence for it.

    Invariants: ``Inconsistent`` iff ``warnings`` is non-empty;
    ``Inconclusive`` carries a ``detail`` naming the exhausted resource.
    """

    verdict: Verdict
    warnings: tuple[tuple[int, str], ...]  # (assertion index, justification)
    oracle_revision: int
    llm_calls: int
    enhancement_iterations: int
    input_tokens: int
    output_tokens: int
    detail: str = ""

    def __post_init__(self):
        if (self.verdict is Verdict.INCONSISTENT) != bool(self.warnings):
            raise ValueError("Inconsistent verdicts must carry warnings, others must not")

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "verdict": self.verdict.value,
            "warnings": [
                {"assertion_index": i, "justification": j} for i, j in self.warnings
            ],
            "oracle_revision": self.oracle_revision,
            "budget_summary": {
                "llm_calls": self.llm_calls,
                "enhancement_iterations": self.enhancement_iterations,
                "input_tokens": self.input_tokens,
                "output_tokens": self.output_tokens,
            },
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ValidationReport":
        budget = data.get("budget_summary", {})
        return cls(
            verdict=Verdict(data["verdict"]),
            warnings=tuple(
                (w["assertion_index"], w["justification"]) for w in data.get("warnings", [])
            ),
            oracle_revision=data.get("oracle_revision", 0),
            llm_calls=budget.get("llm_calls", 0),
            enhancement_iterations=budget.get("enhancement_iterations", 0),
            input_tokens=budget.get("input_tokens", 0),
            output_tokens=budget.get("output_tokens", 0),
            detail=data.get("detail", ""),
        )
