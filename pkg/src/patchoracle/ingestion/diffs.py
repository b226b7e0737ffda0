"""Unified diff parsing with exact line-range reconstruction.

The parser is strict: hunk bodies must account for exactly the line counts
announced in their ``@@`` headers, and every body line must carry a valid
prefix. Violations raise :class:`MalformedDiff` with the byte offset of the
first offending line, which makes corpus triage practical.

``apply_file_diff`` replays a parsed diff over the pre-image and is the
round-trip oracle used by the test suite: for a well-formed diff the result
must equal the post-image byte for byte, including "no newline at end of
file" cases.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import MalformedDiff


def split_lines(text: str, keepends: bool = False) -> list[str]:
    """Split on ``\\n`` only.

    ``str.splitlines`` also breaks on form feeds and unicode separators,
    which diff tools treat as ordinary characters; using it would corrupt
    line accounting for files that contain them.
    """
    if not text:
        return []
    parts = text.split("\n")
    if keepends:
        lines = [p + "\n" for p in parts[:-1]]
        if parts[-1]:
            lines.append(parts[-1])
        return lines
    if parts[-1] == "":
        parts.pop()
    return parts


_HUNK_HEADER = re.compile(
    r"^@@ -(?P<pre_start>\d+)(?:,(?P<pre_count>\d+))?"
    r" \+(?P<post_start>\d+)(?:,(?P<post_count>\d+))? @@"
)


@dataclass(frozen=True)
class LineInterval:
    """Closed 1-based line interval."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 1 or self.end < self.start:
            raise ValueError(f"invalid line interval [{self.start}, {self.end}]")

    def contains(self, line: int) -> bool:
        return self.start <= line <= self.end

    def encloses(self, other: "LineInterval") -> bool:
        return self.start <= other.start and other.end <= self.end

    def as_tuple(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class Hunk:
    pre_start: int
    pre_count: int
    post_start: int
    post_count: int
    lines: tuple[str, ...]  # raw body lines, prefixes kept ('+', '-', ' ', '\\')

    @property
    def pre_span(self) -> LineInterval | None:
        if self.pre_count == 0:
            return None
        return LineInterval(self.pre_start, self.pre_start + self.pre_count - 1)

    @property
    def post_span(self) -> LineInterval | None:
        if self.post_count == 0:
            return None
        return LineInterval(self.post_start, self.post_start + self.post_count - 1)


@dataclass(frozen=True)
class FileDiff:
    """All hunks touching one file.

    ``deleted_range``/``added_range`` are the enclosing intervals of the
    pre-/post-side hunk spans; ``None`` when the diff only adds/only deletes
    (no lines on that side).
    """

    path: str
    hunks: tuple[Hunk, ...]
    pre_path: str | None = None  # None for newly added files
    post_path: str | None = None  # None for deleted files
    deleted_range: LineInterval | None = field(init=False, default=None)
    added_range: LineInterval | None = field(init=False, default=None)

    def __post_init__(self):
        pre_spans = [h.pre_span for h in self.hunks if h.pre_span is not None]
        post_spans = [h.post_span for h in self.hunks if h.post_span is not None]
        if pre_spans:
            object.__setattr__(
                self,
                "deleted_range",
                LineInterval(min(s.start for s in pre_spans), max(s.end for s in pre_spans)),
            )
        if post_spans:
            object.__setattr__(
                self,
                "added_range",
                LineInterval(min(s.start for s in post_spans), max(s.end for s in post_spans)),
            )

    def pre_changed_lines(self) -> list[int]:
        """Pre-image line numbers of deleted lines (context excluded).

        A hunk that only inserts contributes its anchor line (the pre line
        just before the insertion point), so a pure insertion inside a
        function still maps into that function.
        """
        out: set[int] = set()
        for h in self.hunks:
            cursor = h.pre_start if h.pre_count > 0 else h.pre_start + 1
            deleted = False
            anchor: int | None = None
            for raw in h.lines:
                tag = raw[:1]
                if tag == " ":
                    cursor += 1
                elif tag == "-":
                    out.add(cursor)
                    cursor += 1
                    deleted = True
                elif tag == "+" and anchor is None:
                    anchor = max(cursor - 1, 1)
            if not deleted and anchor is not None:
                out.add(anchor)
        return sorted(out)

    def post_changed_lines(self) -> list[int]:
        """Post-image line numbers of added lines (context excluded);
        deletion-only hunks contribute their post-side anchor line."""
        out: set[int] = set()
        for h in self.hunks:
            cursor = h.post_start if h.post_count > 0 else h.post_start + 1
            added = False
            anchor: int | None = None
            for raw in h.lines:
                tag = raw[:1]
                if tag == " ":
                    cursor += 1
                elif tag == "+":
                    out.add(cursor)
                    cursor += 1
                    added = True
                elif tag == "-" and anchor is None:
                    anchor = max(cursor - 1, 1)
            if not added and anchor is not None:
                out.add(anchor)
        return sorted(out)


def _strip_git_prefix(path: str) -> str | None:
    path = path.split("\t")[0].strip()
    if path == "/dev/null":
        return None
    if path.startswith(("a/", "b/")):
        return path[2:]
    return path


class _Lines:
    """Diff text as lines with byte offsets, for error reporting."""

    def __init__(self, text: str):
        self.lines = split_lines(text)
        self.offsets: list[int] = []
        pos = 0
        for raw in split_lines(text, keepends=True):
            self.offsets.append(pos)
            pos += len(raw.encode("utf-8"))
        self.idx = 0

    def peek(self) -> str | None:
        return self.lines[self.idx] if self.idx < len(self.lines) else None

    def next(self) -> str | None:
        line = self.peek()
        if line is not None:
            self.idx += 1
        return line

    @property
    def offset(self) -> int:
        """Byte offset of the line most recently returned by :meth:`next`."""
        i = max(self.idx - 1, 0)
        return self.offsets[i] if self.offsets else 0


def parse_unified_diff(text: str) -> list[FileDiff]:
    """Parse unified diff text into one :class:`FileDiff` per changed file.

    Accepts plain ``diff -u`` output as well as ``git diff`` output
    (``diff --git`` / ``index`` / mode lines are skipped). An empty input
    yields an empty list.
    """
    if not text.strip():
        return []

    cur = _Lines(text)
    diffs: list[FileDiff] = []

    pre_path: str | None = None
    post_path: str | None = None
    have_header = False
    hunks: list[Hunk] = []

    def flush():
        nonlocal pre_path, post_path, have_header, hunks
        if have_header:
            if not hunks:
                # header without hunks: binary or mode-only change; skip it
                pre_path = post_path = None
                have_header = False
                return
            path = post_path or pre_path
            assert path is not None
            diffs.append(
                FileDiff(path=path, hunks=tuple(hunks), pre_path=pre_path, post_path=post_path)
            )
        pre_path = post_path = None
        have_header = False
        hunks = []

    while True:
        line = cur.next()
        if line is None:
            break
        if line.startswith("--- "):
            if have_header and hunks:
                flush()
            pre_path = _strip_git_prefix(line[4:])
            plus = cur.next()
            if plus is None or not plus.startswith("+++ "):
                raise MalformedDiff("'---' header not followed by '+++'", cur.offset)
            post_path = _strip_git_prefix(plus[4:])
            if pre_path is None and post_path is None:
                raise MalformedDiff("both sides of file header are /dev/null", cur.offset)
            have_header = True
            hunks = []
        elif line.startswith("@@"):
            header_offset = cur.offset
            if not have_header:
                raise MalformedDiff("hunk header before any file header", header_offset)
            m = _HUNK_HEADER.match(line)
            if not m:
                raise MalformedDiff(f"invalid hunk header {line!r}", header_offset)
            pre_start = int(m.group("pre_start"))
            pre_count = int(m.group("pre_count")) if m.group("pre_count") is not None else 1
            post_start = int(m.group("post_start"))
            post_count = int(m.group("post_count")) if m.group("post_count") is not None else 1

            body: list[str] = []
            seen_pre = seen_post = 0
            while seen_pre < pre_count or seen_post < post_count:
                raw = cur.next()
                if raw is None:
                    raise MalformedDiff("hunk body ends before announced counts", cur.offset)
                if raw.startswith("\\"):
                    body.append(raw)
                    continue
                tag = raw[:1]
                if tag == "" or tag == " ":
                    # diff tools emit a completely empty line for an empty
                    # context line; normalise it to " ".
                    body.append(" " + raw[1:] if raw else " ")
                    seen_pre += 1
                    seen_post += 1
                elif tag == "-":
                    body.append(raw)
                    seen_pre += 1
                elif tag == "+":
                    body.append(raw)
                    seen_post += 1
                else:
                    raise MalformedDiff(f"invalid hunk body line {raw!r}", cur.offset)
                if seen_pre > pre_count or seen_post > post_count:
                    raise MalformedDiff("hunk body exceeds announced counts", header_offset)
            # trailing "no newline" marker belongs to this hunk
            nxt = cur.peek()
            if nxt is not None and nxt.startswith("\\"):
                body.append(cur.next())  # type: ignore[arg-type]
            hunks.append(Hunk(pre_start, pre_count, post_start, post_count, tuple(body)))
        else:
            # prologue / git metadata between files: "diff --git", "index",
            # "new file mode", "similarity index", etc.
            if have_header and hunks:
                if line.startswith("diff "):
                    flush()
                elif line[:1] in ("+", "-", "\\", " ") and line.strip():
                    raise MalformedDiff(
                        f"hunk body line outside any hunk: {line!r}", cur.offset
                    )
            continue

    flush()
    return diffs


def apply_file_diff(pre_text: str, fd: FileDiff) -> str:
    """Replay ``fd`` over the pre-image and return the post-image.

    Context and deletion lines are verified against the pre-image; a mismatch
    raises :class:`MalformedDiff` (offset 0: the violation is semantic, not
    positional in the diff text).
    """
    pre_lines = split_lines(pre_text, keepends=True)
    out: list[str] = []
    cursor = 0  # 0-based index into pre_lines

    def pre_line_content(i: int) -> str:
        return pre_lines[i][:-1] if pre_lines[i].endswith("\n") else pre_lines[i]

    for hunk in fd.hunks:
        target = hunk.pre_start - 1 if hunk.pre_count > 0 else hunk.pre_start
        if target < cursor:
            raise MalformedDiff("hunks overlap or are out of order", 0)
        out.extend(pre_lines[cursor:target])
        cursor = target

        body = list(hunk.lines)
        for i, raw in enumerate(body):
            if raw.startswith("\\"):
                continue
            tag, content = raw[0], raw[1:]
            # does a "no newline" marker follow this line?
            no_newline = i + 1 < len(body) and body[i + 1].startswith("\\")
            if tag == " ":
                if cursor >= len(pre_lines) or pre_line_content(cursor) != content:
                    raise MalformedDiff(
                        f"context mismatch at pre line {cursor + 1}", 0
                    )
                # context is identical on both sides: copy the raw pre line so
                # its newline state carries over untouched
                out.append(pre_lines[cursor])
                cursor += 1
            elif tag == "-":
                if cursor >= len(pre_lines) or pre_line_content(cursor) != content:
                    raise MalformedDiff(
                        f"deletion mismatch at pre line {cursor + 1}", 0
                    )
                cursor += 1
            elif tag == "+":
                out.append(content + ("" if no_newline else "\n"))

    out.extend(pre_lines[cursor:])
    return "".join(out)
