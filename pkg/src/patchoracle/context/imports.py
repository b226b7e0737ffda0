"""Import analysis: rewriting relative imports to absolute directives.

Comparison programs execute outside the subject package, so relative
imports in the modified file must be absolutized against the file's package
position. The package map is derived from package-marker files in the
snapshot and can be overridden via configuration.
"""

from __future__ import annotations

import ast

from ..errors import SnapshotParseError, UnresolvableRelativeImport
from ..ingestion.snapshots import Snapshot


class PackageMap:
    """Maps repo-relative file paths to importable module paths."""

    def __init__(self, roots: dict[str, str] | None = None):
        # maps package directory (repo-relative, posix) -> importable name
        self.roots = dict(roots or {})

    @classmethod
    def from_snapshot(cls, snapshot: Snapshot) -> "PackageMap":
        """Derive the map from ``__init__.py`` markers: every directory that
        contains one is a package named after its path components below the
        outermost marked ancestor."""
        packages = {
            path.rsplit("/", 1)[0] if "/" in path else ""
            for path in snapshot.walk()
            if path.endswith("__init__.py")
        }
        roots: dict[str, str] = {}
        for pkg_dir in sorted(packages):
            if not pkg_dir:
                continue
            parts = pkg_dir.split("/")
            # walk up while the parent is itself a package
            top = len(parts) - 1
            while top > 0 and "/".join(parts[:top]) in packages:
                top -= 1
            roots[pkg_dir] = ".".join(parts[top:])
        return cls(roots)

    def module_for(self, path: str) -> str | None:
        """Importable dotted path of a file, or ``None`` if it lies outside
        any package."""
        if "/" not in path:
            return None
        pkg_dir, filename = path.rsplit("/", 1)
        if pkg_dir not in self.roots:
            return None
        stem = filename[:-3] if filename.endswith(".py") else filename
        base = self.roots[pkg_dir]
        if stem == "__init__":
            return base
        return f"{base}.{stem}"


def resolve_external_deps(
    file_source: str, file_path: str, layout: PackageMap
) -> list[str]:
    """Module-level import statements with every relative import rewritten
    to its absolute form; absolute imports pass through unchanged.

    Raises :class:`UnresolvableRelativeImport` when the relative depth
    exceeds the package depth.
    """
    try:
        tree = ast.parse(file_source)
    except SyntaxError as exc:
        raise SnapshotParseError(file_path, f"line {exc.lineno}: {exc.msg}") from exc

    module = layout.module_for(file_path)
    package_parts = module.split(".")[:-1] if module else []

    directives: list[str] = []
    for node in tree.body:
        if isinstance(node, ast.Import):
            directives.append(ast.get_source_segment(file_source, node) or _unparse(node))
        elif isinstance(node, ast.ImportFrom):
            if node.level == 0:
                directives.append(
                    ast.get_source_segment(file_source, node) or _unparse(node)
                )
                continue
            climb = node.level - 1
            if climb > len(package_parts):
                raise UnresolvableRelativeImport(
                    f"{file_path}: import level {node.level} exceeds package depth "
                    f"{len(package_parts)}"
                )
            base_parts = package_parts[: len(package_parts) - climb]
            if not base_parts:
                raise UnresolvableRelativeImport(
                    f"{file_path}: relative import climbs above the package root"
                )
            base = ".".join(base_parts)
            target = f"{base}.{node.module}" if node.module else base
            names = ", ".join(
                a.name + (f" as {a.asname}" if a.asname else "") for a in node.names
            )
            directives.append(f"from {target} import {names}")

    # dedupe, preserving first occurrence
    seen: set[str] = set()
    out: list[str] = []
    for d in directives:
        if d not in seen:
            seen.add(d)
            out.append(d)
    return out


def _unparse(node: ast.stmt) -> str:
    return ast.unparse(node)
