from .artifacts import NLArtifacts, gather_nl_artifacts
from .diffs import FileDiff, Hunk, LineInterval, apply_file_diff, parse_unified_diff
from .filters import FilterDecision, FilterReason, classify_pr, is_doc_path, is_target_pr
from .forge import ForgeClient
from .models import IssueRef, PullRequest, find_issue_refs
from .snapshots import Snapshot, SnapshotStore

__all__ = [
    "FileDiff",
    "FilterDecision",
    "FilterReason",
    "ForgeClient",
    "Hunk",
    "IssueRef",
    "LineInterval",
    "NLArtifacts",
    "PullRequest",
    "Snapshot",
    "SnapshotStore",
    "apply_file_diff",
    "classify_pr",
    "find_issue_refs",
    "gather_nl_artifacts",
    "is_doc_path",
    "is_target_pr",
    "parse_unified_diff",
]
