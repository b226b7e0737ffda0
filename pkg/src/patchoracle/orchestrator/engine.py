"""The core loop: infer an oracle, execute it, then enhance / self-review /
repair under call and iteration budgets until a verdict falls out.

Phases only ever talk to the LLM through the gateway, so the call budget is
enforced in one place; a :class:`BudgetExhausted` mid-phase unwinds into an
``Inconclusive`` report without a further backend call.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..context import CodeContext, build_code_context
from ..errors import (
    BudgetExhausted,
    FormatError,
    InvalidEdit,
    PatchOracleError,
    PipelineError,
    UnresolvableError,
)
from ..gateway.gateway import LLMGateway
from ..gateway.parsing import (
    ReviewOutcome,
    ReviewVerdict,
    parse_review_verdict,
    validate_and_parse_oracle,
)
from ..gateway.prompts import Phase, build_prompt, template_version
from ..ingestion.artifacts import gather_nl_artifacts
from ..ingestion.filters import classify_pr
from ..ingestion.models import PullRequest
from ..ingestion.snapshots import Snapshot
from ..oracle.builder import build_comparison_program
from ..oracle.model import PatchOracle, ReplaceTemplate, apply_oracle_edits
from ..sandbox.executor import SandboxExecutor
from .artifacts import RunArtifacts
from .state import (
    Budgets,
    NextAction,
    OrchestratorState,
    ValidationReport,
    Verdict,
    next_action,
)

logger = logging.getLogger(__name__)


def render_code_context(ctx: CodeContext) -> str:
    parts = [f"Modified function: {ctx.function_name}"]
    if ctx.enclosing_class_name:
        parts.append(f"The function is a method of class {ctx.enclosing_class_name}.")
    parts.append("Pre-patch implementation:\n```python\n" + ctx.pre_function + "\n```")
    if ctx.enclosing_class:
        parts.append(
            "Enclosing class (pre-patch):\n```python\n" + ctx.enclosing_class + "\n```"
        )
    if ctx.internal_deps:
        deps = "\n\n".join(src for _, src in ctx.internal_deps)
        parts.append("Top-level definitions in the same module:\n```python\n" + deps + "\n```")
    if ctx.external_deps:
        parts.append("Imports of the module:\n```python\n" + "\n".join(ctx.external_deps) + "\n```")
    return "\n\n".join(parts)


@dataclass
class Pipeline:
    gateway: LLMGateway
    executor: SandboxExecutor
    budgets: Budgets
    artifacts: RunArtifacts
    distill: bool = True

    # --- phase helpers -----------------------------------------------------

    def _oracle_from_llm(self, phase: Phase, ctx_fields: dict) -> PatchOracle:
        """One LLM phase expected to yield a well-formed oracle, with the
        format-validation retry loop (each retry is a budgeted call)."""
        feedback = None
        for _ in range(self.budgets.format_retries + 1):
            fields = dict(ctx_fields)
            if feedback:
                fields["feedback"] = feedback
            response = self.gateway.complete(build_prompt(phase, fields))
            try:
                return validate_and_parse_oracle(response)
            except FormatError as exc:
                self.artifacts.log("format_error", phase=phase.value, reasons=exc.reasons)
                feedback = (
                    "Your previous response was rejected for these reasons; "
                    "fix all of them:\n- " + "\n- ".join(exc.reasons)
                )
        raise UnresolvableError(f"{phase.value}: format retries exhausted")

    def _review_from_llm(self, ctx_fields: dict) -> ReviewVerdict:
        feedback = None
        for _ in range(self.budgets.format_retries + 1):
            fields = dict(ctx_fields)
            if feedback:
                fields["feedback"] = feedback
            response = self.gateway.complete(build_prompt(Phase.SELF_REVIEW, fields))
            try:
                return parse_review_verdict(response)
            except FormatError as exc:
                self.artifacts.log("format_error", phase="self_review", reasons=exc.reasons)
                feedback = (
                    "Your previous response was rejected for these reasons; "
                    "fix all of them:\n- " + "\n- ".join(exc.reasons)
                )
        raise UnresolvableError("self_review: format retries exhausted")

    def _execute(self, oracle: PatchOracle, ctx: CodeContext, state: OrchestratorState):
        program = build_comparison_program(oracle, ctx)
        seq = self.artifacts.next_execution_seq()
        self.artifacts.write_program(seq, oracle.revision, program.source)
        result = self.executor.execute(program)
        self.artifacts.write_result(seq, result)
        self.artifacts.log(
            "execute",
            seq=seq,
            oracle_revision=oracle.revision,
            status=result.status.label(),
            message=result.message,
        )
        state.last_result = result
        return program, result

    def _report(
        self,
        state: OrchestratorState,
        verdict: Verdict,
        warnings: tuple[tuple[int, str], ...] = (),
        detail: str = "",
    ) -> ValidationReport:
        budget = self.gateway.budget
        report = ValidationReport(
            verdict=verdict,
            warnings=warnings,
            oracle_revision=state.oracle.revision if state.oracle else -1,
            llm_calls=budget.calls_used,
            enhancement_iterations=state.iterations,
            input_tokens=budget.input_tokens,
            output_tokens=budget.output_tokens,
            detail=detail,
        )
        self.artifacts.log("terminate", verdict=verdict.value, detail=detail, **state.snapshot())
        self.artifacts.write_report(report)
        if state.oracle is not None:
            self.artifacts.write_oracle(state.oracle)
        return report

    def _sync(self, state: OrchestratorState) -> None:
        state.q = self.gateway.budget.calls_used

    # --- the core algorithm --------------------------------------------------

    def run(
        self, pr: PullRequest, pre: Snapshot, post: Snapshot
    ) -> tuple[PatchOracle | None, ValidationReport]:
        state = OrchestratorState(
            max_llm_calls=self.budgets.max_llm_calls,
            max_enhancements=self.budgets.max_enhancements,
        )
        self.artifacts.log(
            "start",
            repo=pr.repo_id,
            pr=pr.number,
            budgets={
                "M": self.budgets.max_llm_calls,
                "N": self.budgets.max_enhancements,
                "review_cap": self.budgets.review_cap,
                "repair_cap": self.budgets.repair_cap,
            },
            template_version=template_version(),
        )
        try:
            return self._run(pr, pre, post, state)
        except BudgetExhausted:
            self._sync(state)
            return state.oracle, self._report(
                state, Verdict.INCONCLUSIVE, detail="llm call budget exhausted"
            )
        except UnresolvableError as exc:
            self._sync(state)
            self.artifacts.log("unresolvable", detail=str(exc))
            return state.oracle, self._report(state, Verdict.INCONCLUSIVE, detail=str(exc))
        except PatchOracleError as exc:
            raise PipelineError(f"{type(exc).__name__}: {exc}", state=state.snapshot()) from exc

    def _run(self, pr: PullRequest, pre: Snapshot, post: Snapshot, state: OrchestratorState):
        decision = classify_pr(pr.diff, pre, post)
        self.artifacts.log(
            "filter", accepted=decision.accepted, reason=decision.reason.value
        )
        if not decision.accepted:
            raise PipelineError(
                f"PR rejected by target filter: {decision.reason.value}",
                state=state.snapshot(),
            )

        fd = next(f for f in pr.diff if f.path == decision.target_path)
        locator, ctx = build_code_context(pre, post, fd)
        self.artifacts.log(
            "context",
            function=locator.name,
            path=locator.path,
            internal_deps=[n for n, _ in ctx.internal_deps],
            external_deps=list(ctx.external_deps),
        )

        nl = gather_nl_artifacts(pr, self.gateway, distill=self.distill)
        self._sync(state)
        self.artifacts.log(
            "nl_artifacts",
            distilled=bool(nl.distilled_issue_context),
            fallback=nl.distillation_fallback,
            q=state.q,
        )

        base_fields = {
            "nl_artifacts": nl.render(),
            "code_context": render_code_context(ctx),
        }

        # initial inference
        state.oracle = self._oracle_from_llm(Phase.INFERENCE, base_fields)
        self._sync(state)
        self.artifacts.write_oracle(state.oracle)
        self.artifacts.log(
            "oracle", revision=state.oracle.revision,
            assertions=len(state.oracle.assertions), q=state.q,
        )

        program, result = self._execute(state.oracle, ctx, state)
        repair_streak: tuple[str, int] | None = None  # (signature, consecutive count)

        while True:
            self._sync(state)
            action = next_action(state)
            self.artifacts.log("action", action=action.value, **state.snapshot())
            if action is not NextAction.REPAIR:
                repair_streak = None

            if action is NextAction.TERMINATE_BUDGET:
                return state.oracle, self._report(
                    state, Verdict.INCONCLUSIVE, detail="llm call budget exhausted"
                )

            if action is NextAction.TERMINATE_CONSISTENT:
                return state.oracle, self._report(state, Verdict.CONSISTENT)

            if action is NextAction.ENHANCE:
                new_oracle = self._oracle_from_llm(
                    Phase.ENHANCEMENT,
                    {**base_fields, "oracle": state.oracle.program_template},
                )
                state.oracle = apply_oracle_edits(
                    state.oracle, [ReplaceTemplate(new_oracle.program_template)]
                )
                state.iterations += 1
                self._sync(state)
                self.artifacts.write_oracle(state.oracle)
                self.artifacts.log(
                    "oracle", revision=state.oracle.revision,
                    assertions=len(state.oracle.assertions), q=state.q,
                )

            elif action is NextAction.SELF_REVIEW:
                verdict = self._review_from_llm(
                    {
                        **base_fields,
                        "oracle": state.oracle.program_template,
                        "patch": pr.diff_text,
                        "execution_logs": result.render_log(),
                    }
                )
                self._sync(state)
                self.artifacts.log(
                    "review",
                    outcome=verdict.outcome.value,
                    round=state.review_round,
                    q=state.q,
                )
                if verdict.outcome is ReviewOutcome.TRUE_POSITIVE:
                    failing = [r for r in result.assertion_records if not r.passed]
                    warnings = tuple(
                        (record.index, verdict.justification) for record in failing
                    ) or ((0, verdict.justification),)
                    return state.oracle, self._report(
                        state, Verdict.INCONSISTENT, warnings=warnings
                    )
                # false positive: adopt the proposed fix and re-execute
                try:
                    state.oracle = apply_oracle_edits(
                        state.oracle, list(verdict.proposed_fix or ())
                    )
                except InvalidEdit as exc:
                    raise UnresolvableError(
                        f"self_review proposed an invalid oracle fix: {exc}"
                    ) from exc
                state.review_round += 1
                self.artifacts.write_oracle(state.oracle)
                if state.review_round >= self.budgets.review_cap:
                    return state.oracle, self._report(
                        state,
                        Verdict.INCONCLUSIVE,
                        detail="review cap reached with unresolved failures",
                    )

            elif action is NextAction.REPAIR:
                signature = f"{result.status.label()}|{result.message}"
                if repair_streak and repair_streak[0] == signature:
                    repair_streak = (signature, repair_streak[1] + 1)
                else:
                    repair_streak = (signature, 1)
                if repair_streak[1] >= self.budgets.repair_cap:
                    raise UnresolvableError(
                        f"{repair_streak[1]} consecutive identical errors: {signature}"
                    )
                self.artifacts.log(
                    "repair", signature=signature, attempt=repair_streak[1]
                )
                new_oracle = self._oracle_from_llm(
                    Phase.REPAIR,
                    {
                        "nl_artifacts": nl.render(),
                        "oracle": state.oracle.program_template,
                        "program": program.source,
                        "execution_logs": result.render_log(),
                    },
                )
                state.oracle = apply_oracle_edits(
                    state.oracle, [ReplaceTemplate(new_oracle.program_template)]
                )
                self._sync(state)
                self.artifacts.write_oracle(state.oracle)
                self.artifacts.log(
                    "oracle", revision=state.oracle.revision,
                    assertions=len(state.oracle.assertions), q=state.q,
                )

            self._sync(state)
            if state.q >= state.max_llm_calls:
                # spent mid-loop: stop before re-executing, mirroring the
                # budget check sitting between the phase and the re-execution
                return state.oracle, self._report(
                    state, Verdict.INCONCLUSIVE, detail="llm call budget exhausted"
                )
            program, result = self._execute(state.oracle, ctx, state)
