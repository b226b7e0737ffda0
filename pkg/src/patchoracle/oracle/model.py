"""Patch oracles: comparison-program templates plus typed assertions.

A template is ordinary Python in which two reserved comment markers stand in
for the pre- and post-patch implementations. Assertions are recognized by
the kind tag at the start of their message; an optional target tag says
which version's behavior the property constrains (conservative default:
``Cross``).
"""

from __future__ import annotations

import ast
import json
import re
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

from ..errors import InvalidEdit, PlaceholderMissing
from ..gateway.prompts import POST_PLACEHOLDER, PRE_PLACEHOLDER
from ..ingestion.diffs import LineInterval

_KIND_TAG = re.compile(
    r"\[(?P<kind>PRESERVED|CHANGED|NEW) BEHAVIORS?\]\s*(?:\[(?P<target>PRE|POST|CROSS)\])?"
)
_PLACEHOLDER_LINE = re.compile(r"^\s*#\s*<<(PRE|POST)_IMPL>>\s*$")


class AssertionKind(Enum):
    PRESERVED = "Preserved"
    CHANGED = "Changed"
    NEW = "New"


class AssertionTarget(Enum):
    PRE = "Pre"
    POST = "Post"
    CROSS = "Cross"


_KIND_FROM_TAG = {
    "PRESERVED": AssertionKind.PRESERVED,
    "CHANGED": AssertionKind.CHANGED,
    "NEW": AssertionKind.NEW,
}
_TARGET_FROM_TAG = {
    "PRE": AssertionTarget.PRE,
    "POST": AssertionTarget.POST,
    "CROSS": AssertionTarget.CROSS,
}


@dataclass(frozen=True)
class Assertion:
    kind: AssertionKind
    target: AssertionTarget
    message: str
    source_span: LineInterval

    def __post_init__(self):
        if not self.message.strip():
            raise ValueError("assertion message must be non-empty")


def classify_assertion_target(assertion_or_message) -> AssertionTarget:
    """Target of an assertion, from its explicit tag or ``Cross`` by default.

    Total function: any message without a recognizable tag classifies as
    ``Cross``, the conservative choice (the property constrains both
    versions until told otherwise).
    """
    message = getattr(assertion_or_message, "message", assertion_or_message)
    m = _KIND_TAG.search(message or "")
    if m and m.group("target"):
        return _TARGET_FROM_TAG[m.group("target")]
    return AssertionTarget.CROSS


def _assertion_message_text(node: ast.Assert, source: str) -> str | None:
    if node.msg is None:
        return None
    if isinstance(node.msg, ast.Constant) and isinstance(node.msg.value, str):
        return node.msg.value
    return ast.get_source_segment(source, node.msg)


def parse_template_assertions(template: str) -> list[Assertion]:
    """Extract kind-tagged assertions from a template, in source order.

    Untagged ``assert`` statements are treated as plumbing, not oracle
    assertions. Raises ``SyntaxError`` if the template does not parse.
    """
    tree = ast.parse(template)
    assertions: list[Assertion] = []
    for node in ast.walk(tree):
        if not isinstance(node, ast.Assert):
            continue
        message = _assertion_message_text(node, template)
        if not message:
            continue
        m = _KIND_TAG.search(message)
        if not m:
            continue
        target = (
            _TARGET_FROM_TAG[m.group("target")]
            if m.group("target")
            else AssertionTarget.CROSS
        )
        assertions.append(
            Assertion(
                kind=_KIND_FROM_TAG[m.group("kind")],
                target=target,
                message=message,
                source_span=LineInterval(node.lineno, node.end_lineno or node.lineno),
            )
        )
    assertions.sort(key=lambda a: a.source_span.start)
    return assertions


def check_placeholders(template: str) -> list[str]:
    """Format problems with the template's placeholders; empty when valid."""
    problems = []
    for label, marker in (("pre", PRE_PLACEHOLDER), ("post", POST_PLACEHOLDER)):
        count = template.count(marker)
        if count == 0:
            problems.append(f"missing placeholder: {label}")
        elif count > 1:
            problems.append(f"duplicate placeholder: {label}")
    return problems


@dataclass(frozen=True)
class PatchOracle:
    """An executable patch specification at one revision."""

    program_template: str
    assertions: tuple[Assertion, ...]
    revision: int = 0

    def __post_init__(self):
        if self.revision < 0:
            raise ValueError("revision must be non-negative")
        if not self.assertions:
            raise ValueError("a patch oracle needs at least one assertion")

    @classmethod
    def from_template(cls, template: str, revision: int = 0) -> "PatchOracle":
        problems = check_placeholders(template)
        if problems:
            raise PlaceholderMissing("; ".join(problems))
        return cls(
            program_template=template,
            assertions=tuple(parse_template_assertions(template)),
            revision=revision,
        )

    def kind_counts(self) -> dict[str, int]:
        counts = {k.value: 0 for k in AssertionKind}
        for a in self.assertions:
            counts[a.kind.value] += 1
        return counts

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "revision": self.revision,
            "program_template": self.program_template,
            "assertions": [
                {
                    "kind": a.kind.value,
                    "target": a.target.value,
                    "message": a.message,
                    "source_span": a.source_span.as_tuple(),
                }
                for a in self.assertions
            ],
        }

    def save(self, path: Path | str) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: Path | str) -> "PatchOracle":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_template(data["program_template"], revision=data["revision"])


# --- edits -------------------------------------------------------------------


@dataclass(frozen=True)
class ReplaceTemplate:
    """Wholesale template replacement (what LLM phases produce)."""

    template: str


@dataclass(frozen=True)
class AppendAssertion:
    """Append a self-contained block (inputs + assert) to the template."""

    source_block: str


@dataclass(frozen=True)
class RemoveAssertion:
    """Remove the statement lines of the assertion at ``index``."""

    index: int


OracleEdit = ReplaceTemplate | AppendAssertion | RemoveAssertion


def apply_oracle_edits(oracle: PatchOracle, edits: list[OracleEdit]) -> PatchOracle:
    """Apply edits and bump the revision; all invariants are re-validated.

    An empty edit list yields an identical oracle at revision + 1 (the
    revision counts refinement rounds, not textual deltas).
    """
    template = oracle.program_template
    for edit in edits:
        if isinstance(edit, ReplaceTemplate):
            template = edit.template
        elif isinstance(edit, AppendAssertion):
            template = template.rstrip("\n") + "\n\n" + edit.source_block.strip("\n") + "\n"
        elif isinstance(edit, RemoveAssertion):
            current = _parse_or_invalid(template)
            if not 0 <= edit.index < len(current):
                raise InvalidEdit(
                    f"assertion index {edit.index} out of range 0..{len(current) - 1}"
                )
            span = current[edit.index].source_span
            lines = template.splitlines()
            del lines[span.start - 1 : span.end]
            template = "\n".join(lines) + ("\n" if template.endswith("\n") else "")
        else:
            raise InvalidEdit(f"unknown edit type {type(edit).__name__}")

    problems = check_placeholders(template)
    if problems:
        raise InvalidEdit("; ".join(problems))
    try:
        assertions = tuple(parse_template_assertions(template))
    except SyntaxError as exc:
        raise InvalidEdit(f"edited template does not parse: line {exc.lineno}: {exc.msg}") from exc
    if not assertions:
        raise InvalidEdit("edited template has no tagged assertions left")

    return replace(
        oracle,
        program_template=template,
        assertions=assertions,
        revision=oracle.revision + 1,
    )


def _parse_or_invalid(template: str) -> list[Assertion]:
    try:
        return parse_template_assertions(template)
    except SyntaxError as exc:
        raise InvalidEdit(f"template does not parse: line {exc.lineno}: {exc.msg}") from exc
