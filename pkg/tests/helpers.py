"""Shared test infrastructure.

``InProcessSandbox`` is the primary suite's independent stand-in for an
in-sandbox execution: it runs comparison programs statement by statement in
this process and synthesizes a report in the documented wire format. It is
deliberately separate from the shipped runner so the primary test suite
works with no secondary component built, and so the full-stack tests have
something independent to agree with.
"""

from __future__ import annotations

import ast
import copy
import difflib
import io
import json
import re
import sys
from contextlib import redirect_stdout
from types import SimpleNamespace

from patchoracle.ingestion.diffs import split_lines
from patchoracle.ingestion.models import IssueRef, PullRequest
from patchoracle.ingestion.snapshots import Snapshot
from patchoracle.sandbox.report import REPORT_BEGIN, REPORT_END
from patchoracle.sandbox.result import RawOutcome

_KIND_TAG = re.compile(
    r"\[(?P<kind>PRESERVED|CHANGED|NEW) BEHAVIORS?\]\s*(?:\[(?P<target>PRE|POST|CROSS)\])?"
)
_KIND_NAMES = {"PRESERVED": "Preserved", "CHANGED": "Changed", "NEW": "New"}
_TARGET_NAMES = {"PRE": "Pre", "POST": "Post", "CROSS": "Cross"}


def test_call_impl(pre_fn, post_fn, *args, **kwargs):
    """Independent reimplementation of the dual-invocation contract."""
    def one(fn):
        try:
            return fn(*copy.deepcopy(args), **copy.deepcopy(kwargs)), None
        except Exception as exc:
            return None, exc

    pre_res, pre_exc = one(pre_fn)
    post_res, post_exc = one(post_fn)
    return SimpleNamespace(
        pre_res=pre_res, pre_exc=pre_exc, post_res=post_res, post_exc=post_exc
    ), (pre_res, pre_exc, post_res, post_exc)


def _call_impl(pre_fn, post_fn, *args, **kwargs):
    _, tup = test_call_impl(pre_fn, post_fn, *args, **kwargs)
    return tup


# keep pytest from collecting the helper above
test_call_impl.__test__ = False


class InProcessSandbox:
    """Executes comparison programs in-process and emits a schema-1 report."""

    timeout = 30.0

    def run(self, program_source: str, workdir=None) -> RawOutcome:
        buf = io.StringIO()
        records: list[dict] = []
        aborted = None
        try:
            tree = ast.parse(program_source)
        except SyntaxError as exc:
            aborted = exc
            tree = None

        if tree is not None:
            ns = {"call_impl": _call_impl, "__name__": "__main__"}
            with redirect_stdout(buf):
                for node in tree.body:
                    code = compile(
                        ast.Module(body=[node], type_ignores=[]), "program.py", "exec"
                    )
                    if isinstance(node, ast.Assert):
                        message = ""
                        if isinstance(node.msg, ast.Constant) and isinstance(
                            node.msg.value, str
                        ):
                            message = node.msg.value
                        elif node.msg is not None:
                            message = ast.get_source_segment(program_source, node.msg) or ""
                        m = _KIND_TAG.search(message)
                        kind = _KIND_NAMES[m.group("kind")] if m else None
                        target = (
                            _TARGET_NAMES[m.group("target")]
                            if m and m.group("target")
                            else "Cross"
                        )
                        record = {
                            "index": len(records),
                            "passed": True,
                            "kind": kind,
                            "target": target,
                            "message": message,
                            "failure_detail": None,
                        }
                        try:
                            exec(code, ns)
                        except AssertionError as exc:
                            record["passed"] = False
                            record["failure_detail"] = str(exc) or message
                            records.append(record)
                        except Exception as exc:
                            aborted = exc
                            break
                        else:
                            records.append(record)
                    else:
                        try:
                            exec(code, ns)
                        except Exception as exc:
                            aborted = exc
                            break

        report = {
            "schema_version": 1,
            "records": records,
            "counts": {
                "passed": sum(1 for r in records if r["passed"]),
                "failed": sum(1 for r in records if not r["passed"]),
            },
            "aborted": aborted is not None,
            "exception": (
                {"type": type(aborted).__name__, "message": str(aborted)}
                if aborted is not None
                else None
            ),
            "copy_fallback": False,
        }
        stdout = buf.getvalue() + REPORT_BEGIN + "\n" + json.dumps(report, sort_keys=True) + "\n" + REPORT_END + "\n"
        return RawOutcome(
            exit_code=1 if aborted is not None else 0,
            stdout=stdout,
            stderr="",
            duration=0.0,
        )


def report_block(records: list[dict], aborted: bool = False, exception: dict | None = None) -> str:
    """A sentinel-delimited report in the documented wire format."""
    payload = {
        "schema_version": 1,
        "records": records,
        "counts": {
            "passed": sum(1 for r in records if r["passed"]),
            "failed": sum(1 for r in records if not r["passed"]),
        },
        "aborted": aborted,
        "exception": exception,
        "copy_fallback": False,
    }
    return f"{REPORT_BEGIN}\n{json.dumps(payload, sort_keys=True)}\n{REPORT_END}\n"


def record(
    index: int = 0,
    passed: bool = True,
    target: str = "Cross",
    message: str = "[PRESERVED BEHAVIORS] p",
    detail: str | None = None,
    kind: str = "Preserved",
) -> dict:
    return {
        "index": index,
        "passed": passed,
        "kind": kind,
        "target": target,
        "message": message,
        "failure_detail": detail,
    }


def oracle_response(body_lines: list[str], reasoning: str = "analysis") -> str:
    """A well-formed LLM response carrying a comparison program."""
    body = "\n".join(body_lines)
    return (
        f"### REASONING\n{reasoning}\n\n### HYPOTHESES\n1. property\n\n"
        f"### FINAL COMPARISON PROGRAM\n```python\n"
        f"# <<PRE_IMPL>>\n\n# <<POST_IMPL>>\n\n{body}\n```\n"
    )


def make_diff(pre_files: dict[str, str], post_files: dict[str, str]) -> str:
    """Unified diff text between two file mappings (git-style headers)."""
    chunks: list[str] = []
    for path in sorted(set(pre_files) | set(post_files)):
        pre = pre_files.get(path, "")
        post = post_files.get(path, "")
        if pre == post:
            continue
        lines = difflib.unified_diff(
            split_lines(pre, keepends=True),
            split_lines(post, keepends=True),
            fromfile=f"a/{path}" if path in pre_files else "/dev/null",
            tofile=f"b/{path}" if path in post_files else "/dev/null",
        )
        chunk = []
        for line in lines:
            if not line.endswith("\n"):
                line += "\n"
                chunk.append(line)
                chunk.append("\\ No newline at end of file\n")
            else:
                chunk.append(line)
        chunks.append("".join(chunk))
    return "".join(chunks)


def make_pr(
    pre_files: dict[str, str],
    post_files: dict[str, str],
    repo_id: str = "example/repo",
    number: int = 1,
    title: str = "Fix something",
    description: str = "",
    comments: list[str] | None = None,
    linked_issues: list[IssueRef] | None = None,
) -> tuple[PullRequest, Snapshot, Snapshot]:
    pr = PullRequest(
        repo_id=repo_id,
        number=number,
        title=title,
        description=description,
        comments=comments or [],
        linked_issues=linked_issues or [],
        diff_text=make_diff(pre_files, post_files),
    )
    return pr, Snapshot.from_dict(pre_files), Snapshot.from_dict(post_files)


# --- observational-equivalence harness for built comparison programs --------

EQUIVALENCE_TEMPLATE = (
    "# <<PRE_IMPL>>\n"
    "\n"
    "# <<POST_IMPL>>\n"
    "\n"
    'assert True, "[PRESERVED BEHAVIORS] construction placeholder"\n'
)


def fixture_context(fixture):
    """(locator, CodeContext) for a patch fixture, via the real pipeline path."""
    from patchoracle.context import build_code_context
    from patchoracle.ingestion.filters import classify_pr

    pr, pre, post = make_pr(fixture.pre_files, fixture.post_files)
    decision = classify_pr(pr.diff, pre, post)
    assert decision.accepted, f"{fixture.name}: filter rejected ({decision.reason})"
    fd = next(f for f in pr.diff if f.path == decision.target_path)
    return build_code_context(pre, post, fd)


def _module_namespace(files, target_file, pkg_dir=None) -> dict:
    if pkg_dir is not None:
        import importlib

        Snapshot.from_dict(files).materialize(pkg_dir)
        module_name = target_file[:-3].replace("/", ".")
        top = module_name.split(".")[0]
        sys.path.insert(0, str(pkg_dir))
        try:
            for mod in [m for m in sys.modules if m.split(".")[0] == top]:
                del sys.modules[mod]
            module = importlib.import_module(module_name)
            ns = dict(vars(module))
        finally:
            sys.path.remove(str(pkg_dir))
            for mod in [m for m in sys.modules if m.split(".")[0] == top]:
                del sys.modules[mod]
        return ns
    ns: dict = {"__name__": "original"}
    exec(compile(files[target_file], target_file, "exec"), ns)
    return ns


def _observe(fn, args):
    try:
        return ("value", fn(*copy.deepcopy(args)))
    except Exception as exc:  # noqa: BLE001 - equivalence compares exception types
        return ("raise", type(exc).__name__)


def _bound_callable(ns, fixture, name):
    if fixture.class_name:
        cls = ns[name]
        for part in fixture.inner_path:
            cls = getattr(cls, part)
        return lambda *args: getattr(
            cls(*copy.deepcopy(fixture.ctor_args)), fixture.method
        )(*args)
    return ns[name]


def run_equivalence_check(fixture, tmp_path) -> int:
    """Assert the built program's pre/post implementations match the
    originals on every fixture input; returns the number of comparisons."""
    from patchoracle.oracle.builder import build_comparison_program, load_definitions
    from patchoracle.oracle.model import PatchOracle

    locator, ctx = fixture_context(fixture)
    program = build_comparison_program(
        PatchOracle.from_template(EQUIVALENCE_TEMPLATE), ctx
    )
    assert "<<PRE_IMPL>>" not in program.source
    assert "<<POST_IMPL>>" not in program.source

    base = fixture.class_name or locator.base_name
    path_added = None
    pre_pkg = post_pkg = None
    if fixture.needs_package:
        Snapshot.from_dict(fixture.pre_files).materialize(tmp_path / "exec")
        path_added = str(tmp_path / "exec")
        sys.path.insert(0, path_added)
        pre_pkg, post_pkg = tmp_path / "orig_pre", tmp_path / "orig_post"
    try:
        ns = load_definitions(program.source)
        built_pre = _bound_callable(ns, fixture, "pre_" + base)
        built_post = _bound_callable(ns, fixture, "post_" + base)
        orig_pre = _bound_callable(
            _module_namespace(fixture.pre_files, fixture.target_file, pre_pkg),
            fixture,
            base,
        )
        orig_post = _bound_callable(
            _module_namespace(fixture.post_files, fixture.target_file, post_pkg),
            fixture,
            base,
        )
        checks = 0
        for args in fixture.inputs:
            assert _observe(built_pre, args) == _observe(orig_pre, args), (
                f"{fixture.name}: pre mismatch on {args!r}"
            )
            assert _observe(built_post, args) == _observe(orig_post, args), (
                f"{fixture.name}: post mismatch on {args!r}"
            )
            checks += 2
        return checks
    finally:
        if path_added:
            sys.path.remove(path_added)
            top = fixture.target_file.split("/")[0]
            for mod in [m for m in sys.modules if m.split(".")[0] == top]:
                del sys.modules[mod]
