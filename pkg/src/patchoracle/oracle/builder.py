"""Assembly of executable comparison programs from oracle templates.

The builder substitutes the two placeholder lines with the pre- and
post-patch implementations renamed under the ``pre_``/``post_`` prefixes,
and prepends the extracted dependencies. Renaming is done with byte-exact
textual edits driven by AST positions, so building twice from the same
inputs yields byte-identical source.

Internal dependencies are emitted once and shared by both versions: oracle
assertions compare against dependency classes by identity (``isinstance``
checks on a shared exception class, for instance), which per-version copies
would silently break. Method targets are the exception: the enclosing class
is duplicated into ``pre_``/``post_`` variants so each carries its own
version of the modified method.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass

from ..context.extract import CodeContext
from ..errors import NameCollision, ParseFailure, PlaceholderMissing
from ..gateway.prompts import POST_PLACEHOLDER, PRE_PLACEHOLDER
from .model import PatchOracle

_PLACEHOLDER_RE = {
    "pre": re.compile(r"^(?P<indent>[ \t]*)#\s*" + re.escape(PRE_PLACEHOLDER) + r"\s*$"),
    "post": re.compile(r"^(?P<indent>[ \t]*)#\s*" + re.escape(POST_PLACEHOLDER) + r"\s*$"),
}


@dataclass(frozen=True)
class ComparisonProgram:
    source: str
    pre_fn_name: str
    post_fn_name: str
    linked_deps: tuple[str, ...] = ()

    def __post_init__(self):
        if self.pre_fn_name == self.post_fn_name:
            raise ValueError("pre and post implementation names must differ")
        for marker in (PRE_PLACEHOLDER, POST_PLACEHOLDER):
            if marker in self.source:
                raise ValueError(f"placeholder {marker} survived in built program")


def _edit_names(source: str, old: str, new: str) -> str:
    """Rename the definition(s) of ``old`` and every ``Name`` reference to it.

    Positions come from the AST; edits are applied right-to-left per line on
    the UTF-8 byte level, matching ``col_offset`` semantics.
    """
    tree = ast.parse(source)
    edits: list[tuple[int, int, int]] = []  # (lineno, byte_start, byte_end)
    lines = source.splitlines(keepends=True)

    def def_name_span(node) -> tuple[int, int, int] | None:
        line = lines[node.lineno - 1].encode("utf-8")
        pattern = re.compile(
            rb"(?:async\s+)?(?:def|class)\s+(" + old.encode() + rb")\b"
        )
        m = pattern.search(line, node.col_offset)
        if m:
            return (node.lineno, m.start(1), m.end(1))
        return None

    for node in ast.walk(tree):
        if isinstance(node, ast.Name) and node.id == old:
            edits.append((node.lineno, node.col_offset, node.end_col_offset))
        elif (
            isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef))
            and node.name == old
        ):
            span = def_name_span(node)
            if span:
                edits.append(span)

    by_line: dict[int, list[tuple[int, int]]] = {}
    for lineno, start, end in edits:
        by_line.setdefault(lineno, []).append((start, end))

    out = list(lines)
    for lineno, spans in by_line.items():
        raw = out[lineno - 1].encode("utf-8")
        for start, end in sorted(set(spans), reverse=True):
            raw = raw[:start] + new.encode("utf-8") + raw[end:]
        out[lineno - 1] = raw.decode("utf-8")
    return "".join(out)


def _single_def(source: str) -> ast.FunctionDef | ast.AsyncFunctionDef:
    tree = ast.parse(source)
    assert len(tree.body) == 1
    node = tree.body[0]
    assert isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef))
    return node


def _find_method(cls_node: ast.ClassDef, chain: list[str], name: str):
    """Locate the method node following the nested-class chain."""
    node: ast.ClassDef = cls_node
    for cls_name in chain:
        found = None
        for child in node.body:
            if isinstance(child, ast.ClassDef) and child.name == cls_name:
                found = child
                break
        if found is None:
            return None
        node = found
    for child in node.body:
        if isinstance(child, (ast.FunctionDef, ast.AsyncFunctionDef)) and child.name == name:
            return child
    return None


def _build_class_variant(
    ctx: CodeContext, method_source: str, prefix: str
) -> tuple[str, str]:
    """The enclosing class with one method version spliced in, renamed with
    ``prefix``. Other members stay untouched inside the copy."""
    assert ctx.enclosing_class and ctx.enclosing_class_name
    chain = ctx.enclosing_class_name.split(".")
    outer_name = chain[0]
    class_source = ctx.enclosing_class

    tree = ast.parse(class_source)
    cls_node = tree.body[0]
    if not isinstance(cls_node, ast.ClassDef):
        raise ParseFailure("enclosing class context is not a class definition")
    method = _find_method(cls_node, chain[1:], ctx.function_name)
    if method is None:
        raise ParseFailure(
            f"method {ctx.function_name!r} not found in class {ctx.enclosing_class_name!r}"
        )

    start = method.lineno
    if method.decorator_list:
        start = min(start, min(d.lineno for d in method.decorator_list))
    end = method.end_lineno or method.lineno

    lines = class_source.splitlines()
    def_line = lines[method.lineno - 1]
    indent = def_line[: len(def_line) - len(def_line.lstrip())]
    replacement = [
        (indent + l if l.strip() else l) for l in method_source.splitlines()
    ]
    spliced = "\n".join(lines[: start - 1] + replacement + lines[end:])

    new_name = prefix + outer_name
    return _edit_names(spliced, outer_name, new_name), new_name


def _top_level_names(tree: ast.Module) -> set[str]:
    names: set[str] = set()
    for node in tree.body:
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
            names.add(node.name)
        elif isinstance(node, ast.Assign):
            for t in node.targets:
                if isinstance(t, ast.Name):
                    names.add(t.id)
        elif isinstance(node, ast.AnnAssign) and isinstance(node.target, ast.Name):
            names.add(node.target.id)
        elif isinstance(node, (ast.Import, ast.ImportFrom)):
            for a in node.names:
                names.add((a.asname or a.name).split(".")[0])
    return names


def build_comparison_program(oracle: PatchOracle, ctx: CodeContext) -> ComparisonProgram:
    """Substitute the oracle's placeholders and link the dependencies.

    Raises :class:`PlaceholderMissing` when a placeholder is absent,
    duplicated, or not on a standalone comment line; :class:`NameCollision`
    when a prefixed name already exists among the dependencies or template
    definitions; :class:`ParseFailure` when the assembled program does not
    parse.
    """
    template = oracle.program_template
    lines = template.splitlines()

    slots: dict[str, tuple[int, str]] = {}
    for i, line in enumerate(lines):
        for label, pattern in _PLACEHOLDER_RE.items():
            m = pattern.match(line)
            if m:
                if label in slots:
                    raise PlaceholderMissing(f"duplicate placeholder: {label}")
                slots[label] = (i, m.group("indent"))
    for label, marker in (("pre", PRE_PLACEHOLDER), ("post", POST_PLACEHOLDER)):
        if label not in slots:
            if marker in template:
                raise PlaceholderMissing(
                    f"placeholder {marker} must sit alone on a comment line"
                )
            raise PlaceholderMissing(f"missing placeholder: {label}")

    if ctx.enclosing_class_name:
        pre_source, pre_name = _build_class_variant(ctx, ctx.pre_function, "pre_")
        post_source, post_name = _build_class_variant(ctx, ctx.post_function, "post_")
    else:
        base = ctx.function_name or _single_def(ctx.pre_function).name
        pre_name, post_name = f"pre_{base}", f"post_{base}"
        pre_source = _edit_names(ctx.pre_function, base, pre_name)
        post_source = _edit_names(ctx.post_function, base, post_name)

    dep_names = {name for name, _ in ctx.internal_deps}
    import_names: set[str] = set()
    for directive in ctx.external_deps:
        import_names |= _top_level_names(ast.parse(directive))
    try:
        template_names = _top_level_names(ast.parse(template))
    except SyntaxError as exc:
        raise ParseFailure(
            f"oracle template does not parse: line {exc.lineno}: {exc.msg}"
        ) from exc

    taken = dep_names | import_names | template_names
    for candidate in (pre_name, post_name):
        if candidate in taken:
            raise NameCollision(
                f"renamed implementation {candidate!r} collides with an existing definition"
            )

    substituted = list(lines)
    # replace bottom-up so the first substitution cannot shift the second slot
    for label, source in sorted(
        (("pre", pre_source), ("post", post_source)),
        key=lambda item: slots[item[0]][0],
        reverse=True,
    ):
        idx, indent = slots[label]
        block = [
            (indent + l if l.strip() else l) for l in source.rstrip("\n").splitlines()
        ]
        substituted[idx : idx + 1] = block

    parts: list[str] = []
    if ctx.external_deps:
        parts.append("\n".join(ctx.external_deps))
    for _, dep_source in ctx.internal_deps:
        parts.append(dep_source.rstrip("\n"))
    parts.append("\n".join(substituted))
    program = "\n\n".join(parts).rstrip("\n") + "\n"

    try:
        final_tree = ast.parse(program)
    except SyntaxError as exc:
        raise ParseFailure(
            f"assembled program does not parse: line {exc.lineno}: {exc.msg}"
        ) from exc

    top_level = [
        n.name
        for n in final_tree.body
        if isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef))
    ]
    for name in (pre_name, post_name):
        if top_level.count(name) != 1:
            raise ParseFailure(
                f"{name!r} must be defined exactly once, found {top_level.count(name)}"
            )

    return ComparisonProgram(
        source=program,
        pre_fn_name=pre_name,
        post_fn_name=post_name,
        linked_deps=tuple(name for name, _ in ctx.internal_deps),
    )


def load_definitions(source: str, extra_globals: dict | None = None) -> dict:
    """Execute only the definition statements of a program and return the
    resulting namespace.

    Used by equivalence harnesses that need the ``pre_``/``post_``
    implementations without running the oracle statements.
    """
    tree = ast.parse(source)
    defs = [
        node
        for node in tree.body
        if isinstance(
            node,
            (ast.Import, ast.ImportFrom, ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef),
        )
    ]
    module = ast.Module(body=defs, type_ignores=[])
    namespace: dict = dict(extra_globals or {})
    namespace.setdefault("__name__", "comparison_program")
    exec(compile(module, "<comparison-program>", "exec"), namespace)
    return namespace
