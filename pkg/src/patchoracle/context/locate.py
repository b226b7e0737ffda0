"""Locating the modified function in both file versions."""

from __future__ import annotations

import ast
from dataclasses import dataclass

from ..errors import Ambiguous, NotInFunction, SnapshotParseError
from ..ingestion.diffs import FileDiff, LineInterval


@dataclass(frozen=True)
class FunctionLocator:
    """Where the modified function lives in the pre and post files.

    ``name`` is the dotted qualified name ("Outer.Inner.method" for methods);
    ``enclosing_class`` is the dotted class chain, or ``None`` for a free
    function. Spans include decorator lines.
    """

    path: str
    name: str
    pre_span: LineInterval
    post_span: LineInterval
    enclosing_class: str | None = None

    @property
    def base_name(self) -> str:
        return self.name.rsplit(".", 1)[-1]


@dataclass(frozen=True)
class _Def:
    qualname: str
    class_chain: str | None
    span: LineInterval


def _def_span(node: ast.FunctionDef | ast.AsyncFunctionDef) -> LineInterval:
    start = node.lineno
    if node.decorator_list:
        start = min(start, min(d.lineno for d in node.decorator_list))
    return LineInterval(start, node.end_lineno or node.lineno)


def _collect_defs(tree: ast.Module) -> list[_Def]:
    """Top-level functions and methods; nested ``def``s stay inside their
    parent and are not listed separately."""
    defs: list[_Def] = []

    def visit(body: list[ast.stmt], class_prefix: list[str]):
        for node in body:
            if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
                chain = ".".join(class_prefix) if class_prefix else None
                qual = ".".join(class_prefix + [node.name])
                defs.append(_Def(qual, chain, _def_span(node)))
            elif isinstance(node, ast.ClassDef):
                visit(node.body, class_prefix + [node.name])

    visit(tree.body, [])
    return defs


def _enclosing(defs: list[_Def], lines: list[int], side: str, path: str) -> _Def:
    """The single definition containing the changed lines on one side.

    Changed lines outside every definition are tolerated as long as at least
    one changed line falls inside a definition: module docstring or constant
    edits can accompany the function change in the same file diff.
    """
    if not lines:
        raise NotInFunction(f"{path}: diff touches no {side}-side lines")
    hits: dict[str, _Def] = {}
    for line in lines:
        for d in defs:
            if d.span.contains(line):
                hits[d.qualname] = d
                break
    if not hits:
        raise NotInFunction(
            f"{path}: no {side}-side changed line falls inside a function definition"
        )
    if len(hits) > 1:
        raise Ambiguous(
            f"{path}: {side}-side changes span multiple definitions: {sorted(hits)}"
        )
    return next(iter(hits.values()))


def locate_modified_function(
    pre_file: str, post_file: str, fd: FileDiff
) -> FunctionLocator:
    """Find the unique function whose body spans the changed lines in both
    versions.

    Raises :class:`NotInFunction` for top-level changes and
    :class:`Ambiguous` when the changed lines cross definition boundaries or
    the function name differs between versions.
    """
    try:
        pre_tree = ast.parse(pre_file)
        post_tree = ast.parse(post_file)
    except SyntaxError as exc:
        raise SnapshotParseError(fd.path, f"line {exc.lineno}: {exc.msg}") from exc

    pre_def = _enclosing(_collect_defs(pre_tree), fd.pre_changed_lines(), "pre", fd.path)
    post_def = _enclosing(_collect_defs(post_tree), fd.post_changed_lines(), "post", fd.path)

    if pre_def.qualname != post_def.qualname:
        raise Ambiguous(
            f"{fd.path}: changed function name differs across versions "
            f"({pre_def.qualname!r} vs {post_def.qualname!r})"
        )

    return FunctionLocator(
        path=fd.path,
        name=pre_def.qualname,
        pre_span=pre_def.span,
        post_span=post_def.span,
        enclosing_class=pre_def.class_chain,
    )
