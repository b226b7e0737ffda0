"""Target-PR filtering via syntax-tree comparison of the two snapshots.

A PR qualifies for analysis when it contains at least one executable code
change and exactly one function body differs between the base and head
revisions. Documentation files, comments, docstrings and pure formatting are
invisible to the comparison: two files whose docstring-stripped syntax trees
are equal count as unchanged.
"""

from __future__ import annotations

import ast
import fnmatch
from dataclasses import dataclass
from enum import Enum

from ..errors import SnapshotParseError
from .diffs import FileDiff
from .snapshots import Snapshot

# Paths treated as documentation regardless of content. Directory entries
# match any path component; glob entries match the file name.
DOC_DIRS = {"docs", "doc"}
DOC_GLOBS = ("*.md", "*.rst", "*.txt")


class FilterReason(Enum):
    ACCEPTED = "Accepted"
    DOC_ONLY = "DocOnly"
    MULTI_FUNCTION = "MultiFunction"
    NO_EXECUTABLE_CHANGE = "NoExecutableChange"


@dataclass(frozen=True)
class FilterDecision:
    accepted: bool
    reason: FilterReason
    # set only when accepted: the single modified function
    target_path: str | None = None
    target_qualname: str | None = None


def is_doc_path(path: str) -> bool:
    parts = path.split("/")
    if any(p in DOC_DIRS for p in parts[:-1]):
        return True
    return any(fnmatch.fnmatch(parts[-1].lower(), g) for g in DOC_GLOBS)


def _strip_docstrings(tree: ast.AST) -> ast.AST:
    """Remove docstring expressions so they do not count as code changes."""
    for node in ast.walk(tree):
        if isinstance(node, (ast.Module, ast.ClassDef, ast.FunctionDef, ast.AsyncFunctionDef)):
            body = node.body
            if (
                body
                and isinstance(body[0], ast.Expr)
                and isinstance(body[0].value, ast.Constant)
                and isinstance(body[0].value.value, str)
            ):
                replacement: list[ast.stmt] = body[1:] or [ast.Pass()]
                node.body = replacement
    return tree


def _parse(path: str, source: str) -> ast.Module:
    try:
        return ast.parse(source)
    except SyntaxError as exc:
        raise SnapshotParseError(path, f"line {exc.lineno}: {exc.msg}") from exc


def _function_dumps(tree: ast.Module) -> dict[str, str]:
    """Map qualified name -> AST dump for every function and method.

    Nested ``def``s are part of their enclosing function's dump, so an edit
    inside a closure registers as a change to the outer function.
    """
    out: dict[str, str] = {}

    def visit(body: list[ast.stmt], prefix: str, in_function: bool):
        for node in body:
            if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
                if not in_function:
                    out[prefix + node.name] = ast.dump(node)
                # nested defs are folded into the parent's dump
            elif isinstance(node, ast.ClassDef):
                visit(node.body, prefix + node.name + ".", in_function)

    visit(tree.body, "", False)
    return out


def _module_dump(tree: ast.Module) -> str:
    return ast.dump(tree)


def classify_pr(
    diff: list[FileDiff], pre: Snapshot, post: Snapshot
) -> FilterDecision:
    """Classify a PR's diff against the two snapshots.

    Raises :class:`SnapshotParseError` if a changed Python file fails to
    parse in either snapshot.
    """
    code_files = [fd for fd in diff if not is_doc_path(fd.path)]
    py_files = [fd for fd in code_files if fd.path.endswith(".py")]

    if not py_files:
        # Nothing the syntax-tree comparison can see.
        return FilterDecision(
            False,
            FilterReason.DOC_ONLY if not code_files else FilterReason.NO_EXECUTABLE_CHANGE,
        )

    any_ast_change = False
    changed_functions: list[tuple[str, str, bool]] = []  # (path, qualname, in_both)

    for fd in py_files:
        pre_path = fd.pre_path or fd.path
        post_path = fd.post_path or fd.path
        pre_src = pre.read_text(pre_path) if pre.exists(pre_path) else None
        post_src = post.read_text(post_path) if post.exists(post_path) else None

        pre_tree = (
            _strip_docstrings(_parse(pre_path, pre_src)) if pre_src is not None else None
        )
        post_tree = (
            _strip_docstrings(_parse(post_path, post_src)) if post_src is not None else None
        )

        pre_fns = _function_dumps(pre_tree) if pre_tree is not None else {}
        post_fns = _function_dumps(post_tree) if post_tree is not None else {}

        if (pre_tree is None) != (post_tree is None):
            any_ast_change = True
        elif pre_tree is not None and _module_dump(pre_tree) != _module_dump(post_tree):
            any_ast_change = True

        for name in sorted(set(pre_fns) | set(post_fns)):
            in_pre, in_post = name in pre_fns, name in post_fns
            if in_pre and in_post:
                if pre_fns[name] != post_fns[name]:
                    changed_functions.append((fd.path, name, True))
            else:
                changed_functions.append((fd.path, name, False))

    if not any_ast_change:
        # Comment, docstring or formatting edits only.
        return FilterDecision(False, FilterReason.DOC_ONLY)
    if len(changed_functions) > 1:
        return FilterDecision(False, FilterReason.MULTI_FUNCTION)
    if len(changed_functions) == 1 and changed_functions[0][2]:
        path, name, _ = changed_functions[0]
        return FilterDecision(True, FilterReason.ACCEPTED, path, name)
    # Top-level-only edits, or a function added/removed outright: there is no
    # modified function whose two versions could be compared.
    return FilterDecision(False, FilterReason.NO_EXECUTABLE_CHANGE)


def is_target_pr(
    pr, pre: Snapshot, post: Snapshot
) -> tuple[bool, FilterReason]:
    """Spec-level entry point; see :func:`classify_pr` for details."""
    decision = classify_pr(list(pr.diff), pre, post)
    return decision.accepted, decision.reason
