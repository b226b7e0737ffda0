"""Phase-specific prompt construction.

Each prompt has four components: a role definition (sent as the system
text), guidelines, contextual information for the PR under analysis, and
output-formatting constraints. Role, guidelines and formatting come from
editable template files shipped with the package; their combined hash is
recorded in run metadata so transcripts can be tied to the exact wording.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from ..errors import MissingContext

PRE_PLACEHOLDER = "<<PRE_IMPL>>"
POST_PLACEHOLDER = "<<POST_IMPL>>"
TRUE_POSITIVE_MARKER = "[BUG]"
FALSE_POSITIVE_MARKER = "[FALSE-POSITIVE]"


class Phase(Enum):
    INFERENCE = "inference"
    ENHANCEMENT = "enhancement"
    SELF_REVIEW = "self_review"
    REPAIR = "repair"
    DISTILLATION = "distillation"


# Context fields each phase requires, rendered in this order.
_REQUIRED_FIELDS: dict[Phase, list[str]] = {
    Phase.INFERENCE: ["nl_artifacts", "code_context"],
    Phase.ENHANCEMENT: ["nl_artifacts", "code_context", "oracle"],
    Phase.SELF_REVIEW: ["nl_artifacts", "code_context", "oracle", "patch", "execution_logs"],
    Phase.REPAIR: ["nl_artifacts", "oracle", "program", "execution_logs"],
    Phase.DISTILLATION: ["pr_title", "pr_description", "issue_text"],
}

_FIELD_HEADINGS = {
    "nl_artifacts": "Pull-request text",
    "code_context": "Code context of the modified function",
    "oracle": "Current comparison program (oracle)",
    "patch": "Code change (unified diff)",
    "execution_logs": "Execution log",
    "program": "Comparison program as executed",
    "pr_title": "Pull-request title",
    "pr_description": "Pull-request description",
    "issue_text": "Linked issue text",
    "feedback": "Corrections required",
}


@dataclass(frozen=True)
class Prompt:
    role_definition: str
    guidelines: str
    contextual_information: str
    output_formatting: str
    phase: Phase

    def __post_init__(self):
        for name in ("role_definition", "guidelines", "contextual_information", "output_formatting"):
            if not getattr(self, name).strip():
                raise ValueError(f"prompt component {name} is empty")

    def system_text(self) -> str:
        return self.role_definition

    def user_text(self) -> str:
        return (
            f"## Guidelines\n{self.guidelines}\n\n"
            f"## Contextual Information\n{self.contextual_information}\n\n"
            f"## Output Formatting\n{self.output_formatting}"
        )

    def sha256(self) -> str:
        payload = self.system_text() + "\x00" + self.user_text()
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _load_template(phase: Phase) -> dict[str, str]:
    text = (
        resources.files("patchoracle.gateway")
        .joinpath(f"templates/{phase.value}.txt")
        .read_text(encoding="utf-8")
    )
    sections: dict[str, str] = {}
    current: str | None = None
    buf: list[str] = []
    for line in text.splitlines():
        if line.strip() in ("[ROLE]", "[GUIDELINES]", "[OUTPUT]"):
            if current:
                sections[current] = "\n".join(buf).strip()
            current = line.strip()[1:-1].lower()
            buf = []
        else:
            buf.append(line)
    if current:
        sections[current] = "\n".join(buf).strip()
    return sections


def template_version() -> str:
    """Hash of all template files, recorded in run metadata."""
    h = hashlib.sha256()
    for phase in Phase:
        h.update(
            resources.files("patchoracle.gateway")
            .joinpath(f"templates/{phase.value}.txt")
            .read_bytes()
        )
    return h.hexdigest()[:16]


def build_prompt(phase: Phase, ctx: dict) -> Prompt:
    """Assemble the four-component prompt for ``phase``.

    ``ctx`` maps the phase's required field names to already-rendered text;
    a missing or empty field raises :class:`MissingContext`. An optional
    ``feedback`` entry (format-validation retry loop) is appended to the
    contextual information.
    """
    sections = _load_template(phase)
    parts: list[str] = []
    for name in _REQUIRED_FIELDS[phase]:
        if name not in ctx or ctx[name] is None:
            raise MissingContext(name)
        value = str(ctx[name]).strip() or "(empty)"
        parts.append(f"### {_FIELD_HEADINGS[name]}\n{value}")
    if ctx.get("feedback"):
        parts.append(f"### {_FIELD_HEADINGS['feedback']}\n{ctx['feedback']}")

    return Prompt(
        role_definition=sections["role"],
        guidelines=sections["guidelines"],
        contextual_information="\n\n".join(parts),
        output_formatting=sections["output"],
        phase=phase,
    )
