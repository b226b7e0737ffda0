"""Validation and parsing of structured LLM responses.

All failure modes surface as :class:`FormatError` with a machine-readable
reason list; the orchestrator owns the decision to retry with feedback.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from enum import Enum

from ..errors import FormatError
from ..oracle.model import (
    PatchOracle,
    ReplaceTemplate,
    check_placeholders,
    parse_template_assertions,
)
from .gateway import LLMResponse
from .prompts import FALSE_POSITIVE_MARKER, TRUE_POSITIVE_MARKER

_CODE_BLOCK = re.compile(r"```(?:python)?[ \t]*\n(.*?)```", re.DOTALL)


def extract_final_program(text: str) -> str | None:
    """The comparison program: the last fenced code block in the response."""
    blocks = _CODE_BLOCK.findall(text)
    return blocks[-1] if blocks else None


def validate_and_parse_oracle(response: LLMResponse) -> PatchOracle:
    """Check an inference/enhancement/repair response and build the oracle.

    Verifies that the final program section exists, carries each placeholder
    exactly once, parses as Python, and contains at least one kind-tagged
    assertion. Raises :class:`FormatError` listing every violation found.
    """
    reasons: list[str] = []
    template = extract_final_program(response.text)
    if template is None:
        raise FormatError(["missing final comparison-program code block"])

    reasons.extend(check_placeholders(template))

    assertions = []
    try:
        assertions = parse_template_assertions(template)
    except SyntaxError as exc:
        reasons.append(f"program does not parse: line {exc.lineno}: {exc.msg}")
    else:
        if not assertions:
            reasons.append("no assertion carries a behavior kind tag")

    if reasons:
        raise FormatError(reasons)

    return PatchOracle(
        program_template=template, assertions=tuple(assertions), revision=0
    )


class ReviewOutcome(Enum):
    TRUE_POSITIVE = "TruePositive"
    FALSE_POSITIVE = "FalsePositive"


@dataclass(frozen=True)
class ReviewVerdict:
    outcome: ReviewOutcome
    justification: str
    proposed_fix: tuple | None = None  # oracle edits, None for true positives


def parse_review_verdict(response: LLMResponse) -> ReviewVerdict:
    """Parse a self-review response into a verdict.

    The verdict comes from the mandated conclusion marker; a false positive
    must carry a corrected comparison program, which becomes the proposed
    oracle edit.
    """
    text = response.text
    last_tp = text.rfind(TRUE_POSITIVE_MARKER)
    last_fp = text.rfind(FALSE_POSITIVE_MARKER)
    if last_tp == -1 and last_fp == -1:
        raise FormatError(
            [f"no verdict marker found (expected {TRUE_POSITIVE_MARKER} or {FALSE_POSITIVE_MARKER})"]
        )

    justification = _CODE_BLOCK.sub("", text).strip()

    if last_tp > last_fp:
        return ReviewVerdict(ReviewOutcome.TRUE_POSITIVE, justification)

    template = extract_final_program(text)
    if template is None:
        raise FormatError(["false-positive verdict without a corrected program"])
    problems = check_placeholders(template)
    if problems:
        raise FormatError(problems)
    try:
        ast.parse(template)
    except SyntaxError as exc:
        raise FormatError(
            [f"corrected program does not parse: line {exc.lineno}: {exc.msg}"]
        ) from None
    return ReviewVerdict(
        ReviewOutcome.FALSE_POSITIVE,
        justification,
        proposed_fix=(ReplaceTemplate(template),),
    )
