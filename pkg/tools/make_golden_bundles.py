#!/usr/bin/env python3
"""Regenerate the golden bundles under tests/fixtures/bundles/.

Each bundle is produced by running the real pipeline in record mode against
scripted LLM responses, with comparison programs executed by the real
in-sandbox runner (the oracle-shim package must be installed). Re-run this
script whenever prompt templates, context rendering, or the scripted
responses change; the committed transcripts pin prompt hashes.

Usage: python tools/make_golden_bundles.py [dest_dir]
"""

from __future__ import annotations

import shutil
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import oracle_shim

from patchoracle.bundles import save_bundle
from patchoracle.gateway.backend import ScriptedBackend
from patchoracle.gateway.gateway import Budget, GatewayMode, LLMGateway
from patchoracle.ingestion.models import PullRequest
from patchoracle.ingestion.snapshots import Snapshot
from patchoracle.orchestrator.artifacts import RunArtifacts
from patchoracle.orchestrator.engine import Pipeline
from patchoracle.sandbox.backends import RecordingSandbox, SubprocessSandbox
from patchoracle.sandbox.executor import SandboxExecutor

sys.path.insert(0, str(Path(__file__).parent))
from bundle_fixtures import BUNDLE_SPECS  # noqa: E402


def make_bundle(spec, dest: Path) -> None:
    pr = PullRequest(
        repo_id=spec.repo,
        number=spec.number,
        title=spec.title,
        description=spec.description,
        comments=list(spec.comments),
        linked_issues=list(spec.linked_issues),
        diff_text=spec.diff_text,
    )
    budgets = spec.budgets
    gateway = LLMGateway(
        backend=ScriptedBackend(list(spec.responses)),
        budget=Budget(budgets.max_llm_calls),
        mode=GatewayMode.RECORD,
    )
    sandbox = RecordingSandbox(
        SubprocessSandbox(shim_path=oracle_shim.runner_path(), timeout=60)
    )
    with tempfile.TemporaryDirectory() as tmp:
        pipeline = Pipeline(
            gateway=gateway,
            executor=SandboxExecutor(sandbox),
            budgets=budgets,
            artifacts=RunArtifacts(Path(tmp) / "run"),
        )
        oracle, report = pipeline.run(
            pr, Snapshot.from_dict(spec.pre_files), Snapshot.from_dict(spec.post_files)
        )

    if report.verdict.value != spec.expected_verdict:
        raise SystemExit(
            f"{spec.name}: expected {spec.expected_verdict}, got {report.verdict.value}"
        )

    if dest.exists():
        shutil.rmtree(dest)
    outcomes = [replace(o, duration=0.0) for o in sandbox.outcomes]
    save_bundle(
        dest,
        pr,
        Snapshot.from_dict(spec.pre_files),
        Snapshot.from_dict(spec.post_files),
        gateway.transcript,
        outcomes,
        description=spec.title,
        budgets={
            "max_llm_calls": budgets.max_llm_calls,
            "max_enhancements": budgets.max_enhancements,
            "review_cap": budgets.review_cap,
            "repair_cap": budgets.repair_cap,
            "format_retries": budgets.format_retries,
        },
    )
    print(
        f"{spec.name:10} -> {report.verdict.value:13} "
        f"(calls {report.llm_calls}, executions {len(outcomes)}, "
        f"oracle rev {report.oracle_revision})"
    )


def main() -> None:
    dest_root = (
        Path(sys.argv[1])
        if len(sys.argv) > 1
        else Path(__file__).parent.parent / "tests" / "fixtures" / "bundles"
    )
    dest_root.mkdir(parents=True, exist_ok=True)
    for spec in BUNDLE_SPECS:
        make_bundle(spec, dest_root / spec.name)


if __name__ == "__main__":
    main()
