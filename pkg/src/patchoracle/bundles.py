"""Golden bundles: frozen fixtures for network-free, deterministic runs.

A bundle directory freezes everything one PR analysis consumed: the PR
document, both snapshots, the LLM transcript, and the raw sandbox outcomes
of every execution (used by the stub sandbox when the pipeline runs without
a real in-sandbox runner).

Layout::

    bundle/
      bundle.json        {"schema_version": 1, "repo": ..., "number": ...}
      pr.json            serialized PullRequest
      pre/...            base-revision snapshot tree
      post/...           head-revision snapshot tree
      transcript.jsonl   gateway transcript (one entry per line)
      executions.jsonl   recorded RawOutcome per execute() call, in order
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .gateway.gateway import Transcript
from .ingestion.models import PullRequest
from .ingestion.snapshots import Snapshot
from .sandbox.result import RawOutcome

SCHEMA_VERSION = 1


@dataclass
class Bundle:
    root: Path
    pr: PullRequest
    pre: Snapshot
    post: Snapshot
    transcript: Transcript
    stub_outcomes: list[RawOutcome]
    meta: dict

    @property
    def run_name(self) -> str:
        return f"{self.pr.repo_id.replace('/', '__')}__{self.pr.number}"


def _read_tree(root: Path) -> dict[str, str]:
    files: dict[str, str] = {}
    if root.is_dir():
        for p in sorted(root.rglob("*")):
            if p.is_file():
                files[p.relative_to(root).as_posix()] = p.read_text(encoding="utf-8")
    return files


def load_bundle(path: Path | str) -> Bundle:
    root = Path(path)
    meta_path = root / "bundle.json"
    if not meta_path.is_file():
        raise ConfigError(f"{root} is not a bundle (missing bundle.json)")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    if meta.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported bundle schema {meta.get('schema_version')!r}")

    pr = PullRequest.from_dict(json.loads((root / "pr.json").read_text(encoding="utf-8")))
    transcript_path = root / "transcript.jsonl"
    transcript = Transcript.load(transcript_path) if transcript_path.is_file() else Transcript()

    outcomes: list[RawOutcome] = []
    executions_path = root / "executions.jsonl"
    if executions_path.is_file():
        for line in executions_path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                outcomes.append(RawOutcome.from_dict(json.loads(line)))

    return Bundle(
        root=root,
        pr=pr,
        pre=Snapshot.from_dict(_read_tree(root / "pre")),
        post=Snapshot.from_dict(_read_tree(root / "post")),
        transcript=transcript,
        stub_outcomes=outcomes,
        meta=meta,
    )


def save_bundle(
    path: Path | str,
    pr: PullRequest,
    pre: Snapshot,
    post: Snapshot,
    transcript: Transcript,
    stub_outcomes: list[RawOutcome],
    description: str = "",
    budgets: dict | None = None,
) -> Path:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    meta = {
        "schema_version": SCHEMA_VERSION,
        "repo": pr.repo_id,
        "number": pr.number,
        "description": description,
    }
    if budgets:
        # replay must run under the budgets the recording used, or the call
        # sequence diverges from the transcript
        meta["budgets"] = budgets
    (root / "bundle.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    (root / "pr.json").write_text(
        json.dumps(pr.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    pre.materialize(root / "pre")
    post.materialize(root / "post")
    transcript.save(root / "transcript.jsonl")
    (root / "executions.jsonl").write_text(
        "".join(json.dumps(o.to_dict(), sort_keys=True) + "\n" for o in stub_outcomes),
        encoding="utf-8",
    )
    return root
