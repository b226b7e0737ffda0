"""oracle-shim: the in-sandbox runner for pre/post comparison programs.

The actual runner lives in :mod:`oracle_shim.runner` as one self-contained,
stdlib-only file; sandbox backends copy that file into the jail and invoke
``python runner.py program.py``. :func:`runner_path` tells a host where to
copy it from.
"""

from __future__ import annotations

from pathlib import Path

from .runner import (
    REPORT_BEGIN,
    REPORT_END,
    SCHEMA_VERSION,
    CallOutcome,
    call_impl,
    emit_result,
    main,
    run_assertions,
)

__version__ = "0.1.0"

__all__ = [
    "CallOutcome",
    "REPORT_BEGIN",
    "REPORT_END",
    "SCHEMA_VERSION",
    "call_impl",
    "emit_result",
    "main",
    "run_assertions",
    "runner_path",
]


def runner_path() -> Path:
    """Absolute path of the standalone runner file."""
    from . import runner

    return Path(runner.__file__).resolve()
