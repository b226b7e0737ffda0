"""Read-only client for a GitHub-style forge REST interface.

Requests to one host are serialized through a per-host lock so concurrent PR
pipelines do not trample the rate limit. Credentials come from the
``FORGE_TOKEN`` (or ``GITHUB_TOKEN``) environment variable unless passed
explicitly.
"""

from __future__ import annotations

import logging
import os
import threading
from collections import defaultdict

import httpx

from ..errors import AuthError, NotFound, RateLimited
from .models import IssueRef, PullRequest, find_issue_refs

logger = logging.getLogger(__name__)

_HOST_LOCKS: dict[str, threading.Lock] = defaultdict(threading.Lock)
_HOST_LOCKS_GUARD = threading.Lock()


def _host_lock(base_url: str) -> threading.Lock:
    with _HOST_LOCKS_GUARD:
        return _HOST_LOCKS[base_url]


class ForgeClient:
    """Fetches pull requests, comments, issues and diffs."""

    def __init__(
        self,
        base_url: str = "https://api.github.com",
        token: str | None = None,
        transport: httpx.BaseTransport | None = None,
        timeout: float = 30.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.token = token or os.environ.get("FORGE_TOKEN") or os.environ.get("GITHUB_TOKEN")
        headers = {"Accept": "application/vnd.github+json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        self._client = httpx.Client(
            base_url=self.base_url, headers=headers, transport=transport, timeout=timeout
        )
        self._lock = _host_lock(self.base_url)

    def close(self) -> None:
        self._client.close()

    def _get(self, path: str, accept: str | None = None) -> httpx.Response:
        headers = {"Accept": accept} if accept else None
        with self._lock:
            resp = self._client.get(path, headers=headers)
        if resp.status_code == 404:
            raise NotFound(f"{path} not found")
        if resp.status_code in (401,):
            raise AuthError(f"authentication failed for {path}")
        if resp.status_code in (403, 429):
            if resp.headers.get("X-RateLimit-Remaining") == "0" or resp.status_code == 429:
                raise RateLimited(f"rate limited on {path}")
            raise AuthError(f"access denied for {path}")
        resp.raise_for_status()
        return resp

    def fetch_pr(self, repo_id: str, number: int) -> PullRequest:
        """Fetch all textual artifacts and the raw diff of one PR.

        Issue references found in the title, description, and comments are
        resolved into :class:`IssueRef` entries (cross-repo references are
        ignored by the grammar).
        """
        pr_data = self._get(f"/repos/{repo_id}/pulls/{number}").json()
        title = pr_data.get("title") or ""
        description = pr_data.get("body") or ""

        comments = self._fetch_comments(repo_id, number)
        diff_text = self._get(
            f"/repos/{repo_id}/pulls/{number}", accept="application/vnd.github.v3.diff"
        ).text

        linked: list[IssueRef] = []
        for issue_no in find_issue_refs(title, description, *comments):
            if issue_no == number:
                continue
            try:
                issue = self._get(f"/repos/{repo_id}/issues/{issue_no}").json()
            except NotFound:
                logger.warning("referenced issue #%d not found in %s", issue_no, repo_id)
                continue
            linked.append(
                IssueRef(
                    number=issue_no,
                    title=issue.get("title") or "",
                    body=issue.get("body") or "",
                )
            )

        return PullRequest(
            repo_id=repo_id,
            number=number,
            title=title,
            description=description,
            comments=comments,
            linked_issues=linked,
            diff_text=diff_text,
            base_commit=(pr_data.get("base") or {}).get("sha", ""),
            head_commit=(pr_data.get("head") or {}).get("sha", ""),
        )

    def _fetch_comments(self, repo_id: str, number: int) -> list[str]:
        """Top-level discussion comments plus per-line review comments,
        flattened in chronological order."""
        entries: list[tuple[str, str]] = []
        for path in (
            f"/repos/{repo_id}/issues/{number}/comments",
            f"/repos/{repo_id}/pulls/{number}/comments",
        ):
            try:
                items = self._get(path).json()
            except NotFound:
                continue
            for item in items:
                body = item.get("body") or ""
                if body:
                    entries.append((item.get("created_at") or "", body))
        entries.sort(key=lambda e: e[0])
        return [body for _, body in entries]
