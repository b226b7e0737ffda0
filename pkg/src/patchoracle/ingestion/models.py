"""Pull-request data model and the issue-reference grammar."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .diffs import FileDiff, parse_unified_diff

# Recognized in-repo issue references: "#123", "GH-123", and
# "Fixes/Closes/Resolves #123" (the keyword adds nothing beyond "#123" but is
# listed for clarity). Cross-repo forms such as "owner/repo#123" are ignored:
# a reference must not be glued to a word or path character.
_ISSUE_REF = re.compile(r"(?<![\w/])(?:#|GH-)(\d+)\b", re.IGNORECASE)


def find_issue_refs(*texts: str) -> list[int]:
    """Issue numbers referenced in the given texts, first-mention order."""
    seen: list[int] = []
    for text in texts:
        for m in _ISSUE_REF.finditer(text or ""):
            n = int(m.group(1))
            if n not in seen:
                seen.append(n)
    return seen


@dataclass(frozen=True)
class IssueRef:
    number: int
    title: str = ""
    body: str = ""


@dataclass
class PullRequest:
    """Analysis subject: the code patch plus its natural-language artifacts."""

    repo_id: str
    number: int
    title: str
    description: str
    comments: list[str] = field(default_factory=list)
    linked_issues: list[IssueRef] = field(default_factory=list)
    diff_text: str = ""
    base_commit: str = ""
    head_commit: str = ""
    _diff: list[FileDiff] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.number <= 0:
            raise ValueError(f"PR number must be positive, got {self.number}")

    @property
    def diff(self) -> list[FileDiff]:
        if self._diff is None:
            self._diff = parse_unified_diff(self.diff_text)
        return self._diff

    def to_dict(self) -> dict:
        return {
            "repo_id": self.repo_id,
            "number": self.number,
            "title": self.title,
            "description": self.description,
            "comments": list(self.comments),
            "linked_issues": [
                {"number": i.number, "title": i.title, "body": i.body}
                for i in self.linked_issues
            ],
            "diff_text": self.diff_text,
            "base_commit": self.base_commit,
            "head_commit": self.head_commit,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PullRequest":
        return cls(
            repo_id=data["repo_id"],
            number=data["number"],
            title=data["title"],
            description=data.get("description", ""),
            comments=list(data.get("comments", [])),
            linked_issues=[IssueRef(**i) for i in data.get("linked_issues", [])],
            diff_text=data.get("diff_text", ""),
            base_commit=data.get("base_commit", ""),
            head_commit=data.get("head_commit", ""),
        )
