"""Extraction of the code context needed to run the modified function in
isolation: the function's two versions, sibling top-level definitions, and
the enclosing class for methods.
"""

from __future__ import annotations

import ast
import textwrap
from dataclasses import dataclass

from ..errors import SnapshotParseError
from .locate import FunctionLocator


@dataclass(frozen=True)
class CodeContext:
    """Everything the comparison program needs besides the oracle itself.

    ``pre_function``/``post_function`` are dedented so each parses standalone
    as a single function definition. ``internal_deps`` holds sibling
    top-level definitions from the pre-patch file in source order;
    ``external_deps`` holds absolute import directives.
    """

    pre_function: str
    post_function: str
    internal_deps: tuple[tuple[str, str], ...] = ()
    external_deps: tuple[str, ...] = ()
    enclosing_class: str | None = None
    enclosing_class_name: str | None = None
    function_name: str = ""

    def __post_init__(self):
        names = [n for n, _ in self.internal_deps]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate internal dependency names: {names}")
        for label, src in (("pre", self.pre_function), ("post", self.post_function)):
            tree = ast.parse(src)
            if len(tree.body) != 1 or not isinstance(
                tree.body[0], (ast.FunctionDef, ast.AsyncFunctionDef)
            ):
                raise ValueError(f"{label}_function is not a single function definition")

    def to_dict(self) -> dict:
        return {
            "pre_function": self.pre_function,
            "post_function": self.post_function,
            "internal_deps": [list(d) for d in self.internal_deps],
            "external_deps": list(self.external_deps),
            "enclosing_class": self.enclosing_class,
            "enclosing_class_name": self.enclosing_class_name,
            "function_name": self.function_name,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CodeContext":
        return cls(
            pre_function=data["pre_function"],
            post_function=data["post_function"],
            internal_deps=tuple((n, s) for n, s in data.get("internal_deps", [])),
            external_deps=tuple(data.get("external_deps", [])),
            enclosing_class=data.get("enclosing_class"),
            enclosing_class_name=data.get("enclosing_class_name"),
            function_name=data.get("function_name", ""),
        )


def _parse(path: str, source: str) -> ast.Module:
    try:
        return ast.parse(source)
    except SyntaxError as exc:
        raise SnapshotParseError(path, f"line {exc.lineno}: {exc.msg}") from exc


def _node_span(node: ast.stmt) -> tuple[int, int]:
    start = node.lineno
    decorators = getattr(node, "decorator_list", None)
    if decorators:
        start = min(start, min(d.lineno for d in decorators))
    return start, node.end_lineno or node.lineno


def _source_slice(source: str, start: int, end: int) -> str:
    lines = source.splitlines()
    return textwrap.dedent("\n".join(lines[start - 1 : end]))


def extract_function_source(source: str, locator: FunctionLocator, span) -> str:
    """Dedented source of the located function (decorators included)."""
    return _source_slice(source, span.start, span.end)


def extract_internal_deps(
    file_source: str, target: FunctionLocator, path: str = "<file>"
) -> list[tuple[str, str]]:
    """All top-level function and class definitions except the target.

    When the target is a method, its outermost enclosing class is excluded
    here; :func:`extract_enclosing_class` owns that piece of context.
    """
    tree = _parse(path, file_source)
    skip_name = (
        target.enclosing_class.split(".")[0]
        if target.enclosing_class
        else target.base_name
    )
    deps: list[tuple[str, str]] = []
    for node in tree.body:
        if not isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            continue
        if node.name == skip_name:
            continue
        start, end = _node_span(node)
        deps.append((node.name, _source_slice(file_source, start, end)))
    return deps


def extract_enclosing_class(
    file_source: str, target: FunctionLocator, path: str = "<file>"
) -> str | None:
    """Full source of the outermost class enclosing a method target, or
    ``None`` for free functions."""
    if not target.enclosing_class:
        return None
    outer_name = target.enclosing_class.split(".")[0]
    tree = _parse(path, file_source)
    for node in tree.body:
        if isinstance(node, ast.ClassDef) and node.name == outer_name:
            start, end = _node_span(node)
            return _source_slice(file_source, start, end)
    raise SnapshotParseError(path, f"enclosing class {outer_name!r} not found")
