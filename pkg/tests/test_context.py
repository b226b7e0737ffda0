"""Locating the modified function and extracting its execution context."""

from __future__ import annotations

import ast

import pytest

from helpers import make_diff, make_pr
from patchoracle.context import build_code_context
from patchoracle.context.extract import (
    extract_enclosing_class,
    extract_internal_deps,
)
from patchoracle.context.imports import PackageMap, resolve_external_deps
from patchoracle.context.locate import locate_modified_function
from patchoracle.errors import Ambiguous, NotInFunction, UnresolvableRelativeImport
from patchoracle.ingestion.diffs import parse_unified_diff
from patchoracle.ingestion.snapshots import Snapshot

FILE = '''\
"""Module docstring."""

import math
from . import exceptions


def helper(x):
    return x + 1


class Url:
    def __init__(self, schemes=None):
        self.schemes = schemes or ["http", "https"]

    def validation(self, value):
        if not value:
            raise exceptions.ValidationError("empty")
        return value


def standalone(a, b):
    total = a + b
    return math.floor(total)
'''


def _fd(pre: str, post: str, path: str = "pkg/mod.py"):
    (fd,) = parse_unified_diff(make_diff({path: pre}, {path: post}))
    return fd


class TestLocate:
    def test_free_function_span_contains_change(self):
        post = FILE.replace("return math.floor(total)", "return math.ceil(total)")
        fd = _fd(FILE, post)
        loc = locate_modified_function(FILE, post, fd)
        assert loc.name == "standalone"
        assert loc.enclosing_class is None
        assert all(loc.pre_span.contains(l) for l in fd.pre_changed_lines())
        assert all(loc.post_span.contains(l) for l in fd.post_changed_lines())

    def test_method_reports_enclosing_class(self):
        post = FILE.replace('raise exceptions.ValidationError("empty")',
                            'raise exceptions.ValidationError("blank value")')
        fd = _fd(FILE, post)
        loc = locate_modified_function(FILE, post, fd)
        assert loc.name == "Url.validation"
        assert loc.enclosing_class == "Url"

    def test_top_level_change_raises(self):
        pre = "X = 1\n\n\ndef f(a):\n    return a\n"
        post = "X = 2\n\n\ndef f(a):\n    return a\n"
        fd = _fd(pre, post)
        with pytest.raises(NotInFunction):
            locate_modified_function(pre, post, fd)

    def test_spanning_two_defs_raises(self):
        pre = "def f(a):\n    return a\n\n\ndef g(a):\n    return a\n"
        post = "def f(a):\n    return a + 1\n\n\ndef g(a):\n    return a - 1\n"
        fd = _fd(pre, post)
        with pytest.raises(Ambiguous):
            locate_modified_function(pre, post, fd)

    def test_name_stable_under_outside_whitespace(self):
        post = FILE.replace("return math.floor(total)", "return math.ceil(total)")
        baseline = locate_modified_function(FILE, post, _fd(FILE, post)).name
        # identical whitespace perturbation outside the function in both
        # versions: the diff and therefore the located function are unchanged
        pre2 = FILE.replace("def helper(x):", "def helper(x):  ")
        post2 = post.replace("def helper(x):", "def helper(x):  ")
        fd2 = _fd(pre2, post2)
        assert locate_modified_function(pre2, post2, fd2).name == baseline == "standalone"

    def test_decorated_function_span_includes_decorator(self):
        pre = "import functools\n\n\n@functools.lru_cache(maxsize=None)\ndef f(a):\n    return a\n"
        post = pre.replace("return a", "return a + 1")
        fd = _fd(pre, post)
        loc = locate_modified_function(pre, post, fd)
        assert loc.pre_span.start == 4  # the decorator line


class TestInternalDeps:
    def test_siblings_of_free_function(self):
        post = FILE.replace("return math.floor(total)", "return math.ceil(total)")
        loc = locate_modified_function(FILE, post, _fd(FILE, post))
        deps = extract_internal_deps(FILE, loc)
        assert [name for name, _ in deps] == ["helper", "Url"]
        for _, src in deps:
            ast.parse(src)  # each dependency parses standalone

    def test_method_target_excludes_enclosing_class(self):
        post = FILE.replace('"empty"', '"blank"')
        loc = locate_modified_function(FILE, post, _fd(FILE, post))
        deps = extract_internal_deps(FILE, loc)
        assert [name for name, _ in deps] == ["helper", "standalone"]

    def test_file_with_only_target(self):
        src = "def f(a):\n    return a\n"
        post = src.replace("return a", "return a * 2")
        loc = locate_modified_function(src, post, _fd(src, post))
        assert extract_internal_deps(src, loc) == []


class TestEnclosingClass:
    def test_method_gets_full_class(self):
        post = FILE.replace('"empty"', '"blank"')
        loc = locate_modified_function(FILE, post, _fd(FILE, post))
        cls = extract_enclosing_class(FILE, loc)
        assert cls.startswith("class Url:")
        assert "__init__" in cls
        ast.parse(cls)

    def test_free_function_has_none(self):
        post = FILE.replace("return math.floor(total)", "return math.ceil(total)")
        loc = locate_modified_function(FILE, post, _fd(FILE, post))
        assert extract_enclosing_class(FILE, loc) is None

    def test_nested_class_returns_outermost(self):
        src = (
            "class Outer:\n"
            "    class Inner:\n"
            "        def m(self, x):\n"
            "            return x\n"
        )
        post = src.replace("return x", "return x + 1")
        loc = locate_modified_function(src, post, _fd(src, post))
        assert loc.name == "Outer.Inner.m"
        assert loc.enclosing_class == "Outer.Inner"
        cls = extract_enclosing_class(src, loc)
        assert cls.startswith("class Outer:")
        ast.parse(cls)


class TestImports:
    def test_relative_import_absolutized(self):
        layout = PackageMap({"src/marshmallow": "marshmallow"})
        out = resolve_external_deps(
            "from . import exceptions\n", "src/marshmallow/fields.py", layout
        )
        assert out == ["from marshmallow import exceptions"]

    def test_absolute_import_unchanged(self):
        layout = PackageMap({"pkg": "pkg"})
        out = resolve_external_deps("import math\n", "pkg/mod.py", layout)
        assert out == ["import math"]

    def test_depth_violation(self):
        layout = PackageMap({"a/b": "a.b"})
        with pytest.raises(UnresolvableRelativeImport):
            resolve_external_deps("from ...x import y\n", "a/b/mod.py", layout)

    def test_sibling_module_import(self):
        layout = PackageMap({"marshmallow": "marshmallow"})
        out = resolve_external_deps(
            "from .utils import resolve\n", "marshmallow/fields.py", layout
        )
        assert out == ["from marshmallow.utils import resolve"]

    def test_package_map_from_snapshot(self):
        snap = Snapshot.from_dict(
            {
                "src/marshmallow/__init__.py": "",
                "src/marshmallow/fields.py": "x = 1\n",
                "src/marshmallow/utils/__init__.py": "",
                "setup.py": "",
            }
        )
        layout = PackageMap.from_snapshot(snap)
        assert layout.module_for("src/marshmallow/fields.py") == "marshmallow.fields"
        assert layout.module_for("src/marshmallow/utils/__init__.py") == "marshmallow.utils"
        assert layout.module_for("setup.py") is None

    def test_rewritten_import_executes(self, tmp_path):
        """The rewritten directive resolves against the real package."""
        pkg = tmp_path / "marshmallow"
        pkg.mkdir()
        (pkg / "__init__.py").write_text("", encoding="utf-8")
        (pkg / "exceptions.py").write_text("class ValidationError(Exception):\n    pass\n")
        layout = PackageMap({"marshmallow": "marshmallow"})
        (directive,) = resolve_external_deps(
            "from . import exceptions\n", "marshmallow/fields.py", layout
        )
        import subprocess
        import sys

        proc = subprocess.run(
            [sys.executable, "-c", directive + "\nprint('ok')"],
            cwd=tmp_path,
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0 and proc.stdout.strip() == "ok"


class TestBuildCodeContext:
    def test_round_trip_fragment_parses(self):
        post = FILE.replace("return math.floor(total)", "return math.ceil(total)")
        pr, pre_snap, post_snap = make_pr(
            {"pkg/__init__.py": "", "pkg/mod.py": FILE},
            {"pkg/__init__.py": "", "pkg/mod.py": post},
        )
        locator, ctx = build_code_context(pre_snap, post_snap, pr.diff[0])
        assert ctx.function_name == "standalone"
        fragment = "\n".join(ctx.external_deps) + "\n\n"
        fragment += "\n\n".join(src for _, src in ctx.internal_deps)
        fragment += "\n\n" + ctx.pre_function
        ast.parse(fragment)
        assert ctx.pre_function.startswith("def standalone")
        assert ctx.post_function != ctx.pre_function

    def test_byte_identical_reruns(self):
        post = FILE.replace('"empty"', '"blank"')
        pr, pre_snap, post_snap = make_pr(
            {"pkg/__init__.py": "", "pkg/mod.py": FILE},
            {"pkg/__init__.py": "", "pkg/mod.py": post},
        )
        a = build_code_context(pre_snap, post_snap, pr.diff[0])[1]
        b = build_code_context(pre_snap, post_snap, pr.diff[0])[1]
        assert a == b

    def test_method_context_dedented(self):
        post = FILE.replace('"empty"', '"blank"')
        pr, pre_snap, post_snap = make_pr(
            {"pkg/__init__.py": "", "pkg/mod.py": FILE},
            {"pkg/__init__.py": "", "pkg/mod.py": post},
        )
        _, ctx = build_code_context(pre_snap, post_snap, pr.diff[0])
        assert ctx.pre_function.startswith("def validation")
        ast.parse(ctx.pre_function)
        assert ctx.enclosing_class_name == "Url"
