"""In-sandbox runner for comparison programs.

Invoked as ``python runner.py <program.py>`` inside the sandbox. The runner
executes the program's top-level statements one by one, intercepting every
``assert`` so that one failing assertion does not hide the others, and
finally prints a machine-readable report between sentinel lines. The
program's own stdout stays outside the sentinels.

This file is deliberately self-contained (stdlib only): sandbox backends
copy it next to the program, so it cannot rely on its own package being
importable.

Report wire format (schema_version 1), JSON on one line between
``===ORACLE-REPORT-BEGIN===`` and ``===ORACLE-REPORT-END===``::

    {
      "schema_version": 1,
      "records": [{"index": 0, "passed": true, "kind": "Preserved",
                   "target": "Cross", "message": "...",
                   "failure_detail": null}, ...],
      "counts": {"passed": 3, "failed": 1},
      "aborted": false,
      "exception": null | {"type": "NameError", "message": "..."},
      "copy_fallback": false
    }
"""

from __future__ import annotations

import ast
import copy
import json
import re
import sys
from collections import namedtuple

REPORT_BEGIN = "===ORACLE-REPORT-BEGIN==="
REPORT_END = "===ORACLE-REPORT-END==="
SCHEMA_VERSION = 1

_KIND_TAG = re.compile(
    r"\[(?P<kind>PRESERVED|CHANGED|NEW) BEHAVIORS?\]\s*(?:\[(?P<target>PRE|POST|CROSS)\])?"
)
_KIND_NAMES = {"PRESERVED": "Preserved", "CHANGED": "Changed", "NEW": "New"}
_TARGET_NAMES = {"PRE": "Pre", "POST": "Post", "CROSS": "Cross"}

# set when deep-copying an argument failed and the original was shared instead
_copy_fallback = False

CallOutcome = namedtuple("CallOutcome", "pre_res pre_exc post_res post_exc")


def _clone(args, kwargs):
    global _copy_fallback
    try:
        return copy.deepcopy(args), copy.deepcopy(kwargs)
    except Exception:
        _copy_fallback = True
        return args, kwargs


def call_impl(pre_fn, post_fn, *args, **kwargs):
    """Invoke both implementations independently and capture the outcomes.

    Each version gets its own deep copy of the arguments, so a version that
    mutates its inputs cannot leak the mutation into the other invocation or
    back to the caller. Exceptions raised by either implementation become
    data; they never propagate. Per version, exactly one of (result,
    exception) is not None.
    """
    pre_args, pre_kwargs = _clone(args, kwargs)
    post_args, post_kwargs = _clone(args, kwargs)

    pre_res = pre_exc = None
    try:
        pre_res = pre_fn(*pre_args, **pre_kwargs)
    except Exception as exc:
        pre_exc = exc

    post_res = post_exc = None
    try:
        post_res = post_fn(*post_args, **post_kwargs)
    except Exception as exc:
        post_exc = exc

    return CallOutcome(pre_res, pre_exc, post_res, post_exc)


def _static_message(node: ast.Assert, source: str) -> str:
    if node.msg is None:
        return ""
    if isinstance(node.msg, ast.Constant) and isinstance(node.msg.value, str):
        return node.msg.value
    return ast.get_source_segment(source, node.msg) or ""


def _tags(message: str):
    m = _KIND_TAG.search(message)
    if not m:
        return None, "Cross"
    kind = _KIND_NAMES[m.group("kind")]
    target = _TARGET_NAMES[m.group("target")] if m.group("target") else "Cross"
    return kind, target


def run_assertions(source, filename="program.py", namespace=None):
    """Execute a comparison program statement by statement.

    Assertions are evaluated individually: an ``AssertionError`` records a
    failure and execution continues with the next statement, so independent
    assertions all get a verdict in one run. Any other exception aborts the
    run; the partial records and the terminating exception are returned for
    the host to classify as a runtime error.

    Returns ``(records, aborted_exception)``.
    """
    tree = ast.parse(source, filename)
    ns = namespace if namespace is not None else {}
    ns.setdefault("call_impl", call_impl)
    ns.setdefault("CallOutcome", CallOutcome)
    ns.setdefault("__name__", "__main__")
    ns.setdefault("__builtins__", __builtins__)

    records = []
    for node in tree.body:
        code = compile(ast.Module(body=[node], type_ignores=[]), filename, "exec")
        if isinstance(node, ast.Assert):
            message = _static_message(node, source)
            kind, target = _tags(message)
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
                record["failure_detail"] = str(exc) or message or "assertion failed"
                records.append(record)
            except Exception as exc:
                return records, exc
            else:
                records.append(record)
        else:
            try:
                exec(code, ns)
            except Exception as exc:
                return records, exc
    return records, None


def emit_result(records, aborted_exc=None, stream=None):
    """Print the sentinel-delimited report; exactly one block per run."""
    out = stream or sys.stdout
    report = {
        "schema_version": SCHEMA_VERSION,
        "records": records,
        "counts": {
            "passed": sum(1 for r in records if r["passed"]),
            "failed": sum(1 for r in records if not r["passed"]),
        },
        "aborted": aborted_exc is not None,
        "exception": (
            {"type": type(aborted_exc).__name__, "message": str(aborted_exc)}
            if aborted_exc is not None
            else None
        ),
        "copy_fallback": _copy_fallback,
    }
    out.write(REPORT_BEGIN + "\n")
    out.write(json.dumps(report, sort_keys=True) + "\n")
    out.write(REPORT_END + "\n")
    out.flush()


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: runner.py <program.py>", file=sys.stderr)
        return 2
    try:
        with open(argv[0], "r", encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        print(f"cannot read program: {exc}", file=sys.stderr)
        return 2

    try:
        ast.parse(source, argv[0])
    except SyntaxError as exc:
        emit_result([], aborted_exc=exc)
        return 1

    records, aborted = run_assertions(source, argv[0])
    emit_result(records, aborted_exc=aborted)
    return 1 if aborted is not None else 0


if __name__ == "__main__":
    sys.exit(main())
