"""Assembly of the natural-language artifacts that feed oracle inference."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..errors import BackendError, FormatError
from ..gateway.prompts import Phase, build_prompt
from .models import PullRequest

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NLArtifacts:
    """PR text carried verbatim, plus distilled linked-issue context.

    ``distilled_issue_context`` is empty iff the PR links no issues or
    distillation was skipped.
    """

    title: str
    description: str
    comments: tuple[str, ...] = ()
    distilled_issue_context: str = ""
    distillation_fallback: bool = field(default=False, compare=False)

    def render(self) -> str:
        parts = [f"PR title: {self.title}", f"PR description:\n{self.description or '(empty)'}"]
        for i, comment in enumerate(self.comments, 1):
            parts.append(f"Comment {i}:\n{comment}")
        if self.distilled_issue_context:
            parts.append(f"Linked issue context:\n{self.distilled_issue_context}")
        return "\n\n".join(parts)


def render_issue_bodies(pr: PullRequest) -> str:
    blocks = []
    for issue in pr.linked_issues:
        header = f"Issue #{issue.number}: {issue.title}".rstrip(": ")
        blocks.append(f"{header}\n{issue.body}")
    return "\n\n---\n\n".join(blocks)


def gather_nl_artifacts(
    pr: PullRequest,
    gateway,
    distill: bool = True,
    fallback_max_chars: int = 4000,
) -> NLArtifacts:
    """Collect a PR's NL artifacts, distilling linked issues through one
    LLM call.

    The title, description and comments are copied verbatim. When the PR
    links issues, their bodies go through a single distillation call that
    keeps only PR-relevant content; with no linked issues no LLM call is
    made. If the distillation call fails at the backend or returns an empty
    response, the raw issue text is used instead, truncated to
    ``fallback_max_chars``.
    """
    if not pr.linked_issues or not distill:
        return NLArtifacts(
            title=pr.title,
            description=pr.description,
            comments=tuple(pr.comments),
        )

    raw_issues = render_issue_bodies(pr)
    prompt = build_prompt(
        Phase.DISTILLATION,
        {
            "pr_title": pr.title,
            "pr_description": pr.description,
            "issue_text": raw_issues,
        },
    )
    fallback = False
    try:
        response = gateway.complete(prompt)
        distilled = response.text.strip()
        if not distilled:
            raise FormatError(["empty distillation response"])
    except (BackendError, FormatError) as exc:
        logger.warning("issue distillation failed (%s); using truncated raw text", exc)
        distilled = raw_issues[:fallback_max_chars]
        fallback = True

    return NLArtifacts(
        title=pr.title,
        description=pr.description,
        comments=tuple(pr.comments),
        distilled_issue_context=distilled,
        distillation_fallback=fallback,
    )
