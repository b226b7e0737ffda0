from __future__ import annotations

from ..ingestion.diffs import FileDiff
from ..ingestion.snapshots import Snapshot
from .extract import (
    CodeContext,
    extract_enclosing_class,
    extract_function_source,
    extract_internal_deps,
)
from .imports import PackageMap, resolve_external_deps
from .locate import FunctionLocator, locate_modified_function

__all__ = [
    "CodeContext",
    "FunctionLocator",
    "PackageMap",
    "build_code_context",
    "extract_enclosing_class",
    "extract_function_source",
    "extract_internal_deps",
    "locate_modified_function",
    "resolve_external_deps",
]


def build_code_context(
    pre: Snapshot,
    post: Snapshot,
    fd: FileDiff,
    layout: PackageMap | None = None,
) -> tuple[FunctionLocator, CodeContext]:
    """Locate the modified function and assemble its execution context.

    Internal and external dependencies come from the pre-patch file, matching
    the rest of the pre-patch-centric context extraction.
    """
    pre_path = fd.pre_path or fd.path
    post_path = fd.post_path or fd.path
    pre_source = pre.read_text(pre_path)
    post_source = post.read_text(post_path)

    locator = locate_modified_function(pre_source, post_source, fd)

    if layout is None:
        layout = PackageMap.from_snapshot(pre)

    ctx = CodeContext(
        pre_function=extract_function_source(pre_source, locator, locator.pre_span),
        post_function=extract_function_source(post_source, locator, locator.post_span),
        internal_deps=tuple(extract_internal_deps(pre_source, locator, pre_path)),
        external_deps=tuple(resolve_external_deps(pre_source, pre_path, layout)),
        enclosing_class=extract_enclosing_class(pre_source, locator, pre_path),
        enclosing_class_name=locator.enclosing_class,
        function_name=locator.base_name,
    )
    return locator, ctx
