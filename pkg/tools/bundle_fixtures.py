"""Specifications of the golden bundles (PRs, snapshots, scripted responses)."""

from __future__ import annotations

import difflib
from dataclasses import dataclass

from patchoracle.ingestion.diffs import split_lines
from patchoracle.ingestion.models import IssueRef
from patchoracle.orchestrator.state import Budgets


def make_diff(pre_files: dict[str, str], post_files: dict[str, str]) -> str:
    chunks = []
    for path in sorted(set(pre_files) | set(post_files)):
        pre, post = pre_files.get(path, ""), post_files.get(path, "")
        if pre == post:
            continue
        chunks.extend(
            difflib.unified_diff(
                split_lines(pre, keepends=True),
                split_lines(post, keepends=True),
                fromfile=f"a/{path}",
                tofile=f"b/{path}",
            )
        )
    return "".join(l if l.endswith("\n") else l + "\n" for l in chunks)


@dataclass(frozen=True)
class BundleSpec:
    name: str
    repo: str
    number: int
    title: str
    description: str
    pre_files: dict[str, str]
    post_files: dict[str, str]
    responses: list[str]
    budgets: Budgets
    expected_verdict: str
    comments: tuple[str, ...] = ()
    linked_issues: tuple[IssueRef, ...] = ()

    @property
    def diff_text(self) -> str:
        return make_diff(self.pre_files, self.post_files)


def _program_response(body: str, reasoning: str, hypotheses: str) -> str:
    return (
        f"### REASONING\n{reasoning}\n\n"
        f"### HYPOTHESES\n{hypotheses}\n\n"
        f"### FINAL COMPARISON PROGRAM\n```python\n{body}```\n"
    )


# --- urlfield: the URL-field bundle (true positive) ------------------------------

_VALIDATE_COMMON = '''\
"""URL validation for field values."""


class ValidationError(Exception):
    """Raised when a value fails validation."""


def _scheme_of(value):
    head, sep, _ = value.partition("://")
    if not sep:
        return ""
    return head.lower()


'''

URLFIELD_PRE = (
    _VALIDATE_COMMON
    + '''\
def validation(value):
    scheme = _scheme_of(value)
    if scheme not in ("http", "https"):
        raise ValidationError("Not a valid URL: %r" % (value,))
    rest = value.partition("://")[2]
    if not rest or rest.startswith("/"):
        raise ValidationError("Not a valid URL: %r" % (value,))
    return value
'''
)

URLFIELD_POST = (
    _VALIDATE_COMMON
    + '''\
def validation(value):
    scheme = _scheme_of(value)
    if scheme not in ("http", "https", "file"):
        raise ValidationError("Not a valid URL: %r" % (value,))
    if value.startswith("file://"):
        return value
    rest = value.partition("://")[2]
    if not rest or rest.startswith("/"):
        raise ValidationError("Not a valid URL: %r" % (value,))
    return value
'''
)

_URLFIELD_ORACLE_V0 = '''\
# Supported URL schemes after the patch: "http", "https", "file".
# call_impl invokes pre- and post-patch versions and captures returned
# values and raised exceptions as (pre_res, pre_exc, post_res, post_exc).

# <<PRE_IMPL>>

# <<POST_IMPL>>

# PRESERVED BEHAVIORS: VALID URLS
valid_url = "http://example.com/path"
pre_res, pre_exc, post_res, post_exc = call_impl(pre_validation, post_validation, valid_url)
assert pre_exc is None and post_exc is None and pre_res == valid_url and post_res == valid_url, (
    "[PRESERVED BEHAVIORS] Both pre_validation and post_validation should accept valid URLs.")

# PRESERVED BEHAVIORS: INVALID URLS
invalid_url = "ftp://example.com/path"
pre_res, pre_exc, post_res, post_exc = call_impl(pre_validation, post_validation, invalid_url)
assert isinstance(pre_exc, ValidationError) and isinstance(post_exc, ValidationError), (
    "[PRESERVED BEHAVIORS] Both pre_validation and post_validation should reject invalid URLs.")

# CHANGED BEHAVIORS: FILE URLS
lower_file = "file:///etc/passwd"
pre_res, pre_exc, post_res, post_exc = call_impl(pre_validation, post_validation, lower_file)
assert isinstance(pre_exc, ValidationError) and post_exc is None and post_res == lower_file, (
    "[CHANGED BEHAVIORS] post_validation should accept file URLs while pre_validation rejects them.")
'''

_URLFIELD_ORACLE_V1 = (
    _URLFIELD_ORACLE_V0
    + '''
# CHANGED BEHAVIORS: FILE URLS, UPPERCASE SCHEME (GENERALIZATION)
upper_file = "FILE:///etc/passwd"
pre_res, pre_exc, post_res, post_exc = call_impl(pre_validation, post_validation, upper_file)
assert isinstance(pre_exc, ValidationError) and post_exc is None and post_res == upper_file, (
    "[CHANGED BEHAVIORS] post_validation should accept file URLs while pre_validation rejects them.")
'''
)

_URLFIELD_REVIEW = """\
### ANALYSIS
The failing assertion feeds an uppercase file URL to both versions. The
linked issue asks for file URLs to be accepted, and URL schemes are
case-insensitive, so the generalized input is legitimate. The patch
lowercases the scheme for validation but then performs a case-sensitive
startswith check on the raw value, so its case-sensitive scheme handling
rejects "FILE:///etc/passwd" even though the stated intent is to accept
file URLs. This is a bug in the patch, not in the oracle.

### VERDICT
Conclusion: [BUG]
"""

URLFIELD = BundleSpec(
    name="urlfield",
    repo="marshmallow-code/marshmallow",
    number=2800,
    title="Fix: add file handling to URL fields",
    description=(
        "Requires a modicum of special handling due to hostnames being "
        "optional.\n\nFixes #2249."
    ),
    comments=("Looks reasonable, please add a changelog entry.",),
    linked_issues=(
        IssueRef(
            number=2249,
            title="fields.Url does not accept file URLs without host",
            body=(
                'fields.Url does not accept file URLs without a host. For '
                'example, "file:///var/storage/somefile.zip" raises a '
                "ValidationError. Such file URLs should be considered valid."
            ),
        ),
    ),
    pre_files={
        "src/marshmallow/__init__.py": "",
        "src/marshmallow/validate.py": URLFIELD_PRE,
    },
    post_files={
        "src/marshmallow/__init__.py": "",
        "src/marshmallow/validate.py": URLFIELD_POST,
    },
    responses=[
        # distillation of issue #2249
        (
            "Issue #2249: fields.Url rejects file URLs without a host; for "
            'example "file:///var/storage/somefile.zip" raises a '
            "ValidationError. The URL field should accept such file URLs as "
            "valid."
        ),
        _program_response(
            _URLFIELD_ORACLE_V0,
            (
                "The patch extends URL validation to accept file URLs, which "
                "have no hostname. Valid http URLs must keep passing, invalid "
                "schemes must keep failing, and file URLs switch from "
                "rejected to accepted."
            ),
            "1. valid URLs accepted by both\n2. invalid URLs rejected by both\n"
            "3. file URLs rejected before, accepted after",
        ),
        _program_response(
            _URLFIELD_ORACLE_V1,
            (
                "URL schemes are case-insensitive, so the changed-behavior "
                "property should generalize to uppercase scheme spellings."
            ),
            "4. uppercase file URLs behave like lowercase ones",
        ),
        _URLFIELD_REVIEW,
    ],
    budgets=Budgets(max_llm_calls=25, max_enhancements=5),
    expected_verdict="Inconsistent",
)


# --- allgreen: a behavior-preserving refactor (consistent) --------------------

_MATH_PRE = '''\
def running_total(values):
    return sum(values)
'''

_MATH_POST = '''\
def running_total(values):
    acc = 0
    for v in values:
        acc += v
    return acc
'''

_ALLGREEN_V0 = '''\
# <<PRE_IMPL>>

# <<POST_IMPL>>

pre_res, pre_exc, post_res, post_exc = call_impl(pre_running_total, post_running_total, [1, 2, 3])
assert pre_exc is None and post_exc is None and pre_res == post_res == 6, (
    "[PRESERVED BEHAVIORS] both versions sum a plain list identically")
'''

_ALLGREEN_V1 = (
    _ALLGREEN_V0
    + '''
pre_res, pre_exc, post_res, post_exc = call_impl(pre_running_total, post_running_total, [])
assert pre_exc is None and post_exc is None and pre_res == post_res == 0, (
    "[PRESERVED BEHAVIORS] the empty input keeps returning zero")
'''
)

_ALLGREEN_V2 = (
    _ALLGREEN_V1
    + '''
pre_res, pre_exc, post_res, post_exc = call_impl(pre_running_total, post_running_total, [-5, 5, 10])
assert pre_exc is None and post_exc is None and pre_res == post_res == 10, (
    "[PRESERVED BEHAVIORS] mixed-sign values keep summing identically")
'''
)

ALLGREEN = BundleSpec(
    name="allgreen",
    repo="example/mathutils",
    number=42,
    title="Refactor running_total to an explicit loop",
    description="Replaces the builtin call with an explicit loop; no behavior change intended.",
    pre_files={"mathutils/__init__.py": "", "mathutils/totals.py": _MATH_PRE},
    post_files={"mathutils/__init__.py": "", "mathutils/totals.py": _MATH_POST},
    responses=[
        _program_response(
            _ALLGREEN_V0,
            "A pure refactor: outputs must match on every input.",
            "1. identical sums on a plain list",
        ),
        _program_response(
            _ALLGREEN_V1,
            "Generalize to the empty-input boundary.",
            "2. empty input",
        ),
        _program_response(
            _ALLGREEN_V2,
            "Diversify with mixed signs.",
            "3. mixed-sign values",
        ),
    ],
    budgets=Budgets(max_llm_calls=25, max_enhancements=2),
    expected_verdict="Consistent",
)


# --- budget: the call budget runs out mid-loop (inconclusive) -----------------

BUDGET = BundleSpec(
    name="budget",
    repo="example/mathutils",
    number=43,
    title="Refactor running_total to an explicit loop",
    description="Same refactor, analyzed under a tiny call budget.",
    pre_files={"mathutils/__init__.py": "", "mathutils/totals.py": _MATH_PRE},
    post_files={"mathutils/__init__.py": "", "mathutils/totals.py": _MATH_POST},
    responses=[
        _program_response(
            _ALLGREEN_V0,
            "A pure refactor: outputs must match on every input.",
            "1. identical sums on a plain list",
        ),
        _program_response(
            _ALLGREEN_V1,
            "Generalize to the empty-input boundary.",
            "2. empty input",
        ),
    ],
    budgets=Budgets(max_llm_calls=2, max_enhancements=5),
    expected_verdict="Inconclusive",
)


# --- repair: first oracle hits a runtime error, gets repaired -----------------

_REPAIR_V0_BROKEN = '''\
# <<PRE_IMPL>>

# <<POST_IMPL>>

sample = build_sample_values()
pre_res, pre_exc, post_res, post_exc = call_impl(pre_running_total, post_running_total, sample)
assert pre_exc is None and post_exc is None and pre_res == post_res, (
    "[PRESERVED BEHAVIORS] both versions agree on the sample input")
'''

_REPAIR_V1_FIXED = '''\
# <<PRE_IMPL>>

# <<POST_IMPL>>

sample = [2, 4, 8]
pre_res, pre_exc, post_res, post_exc = call_impl(pre_running_total, post_running_total, sample)
assert pre_exc is None and post_exc is None and pre_res == post_res == 14, (
    "[PRESERVED BEHAVIORS] both versions agree on the sample input")
'''

_REPAIR_V2_ENHANCED = (
    _REPAIR_V1_FIXED
    + '''
pre_res, pre_exc, post_res, post_exc = call_impl(pre_running_total, post_running_total, [])
assert pre_exc is None and post_exc is None and pre_res == post_res == 0, (
    "[PRESERVED BEHAVIORS] the empty input keeps returning zero")
'''
)

REPAIR = BundleSpec(
    name="repair",
    repo="example/mathutils",
    number=44,
    title="Refactor running_total to an explicit loop",
    description="Same refactor; the first oracle needs one repair round.",
    pre_files={"mathutils/__init__.py": "", "mathutils/totals.py": _MATH_PRE},
    post_files={"mathutils/__init__.py": "", "mathutils/totals.py": _MATH_POST},
    responses=[
        _program_response(
            _REPAIR_V0_BROKEN,
            "Outputs must match; sample values built by a helper.",
            "1. identical outputs on sample values",
        ),
        _program_response(
            _REPAIR_V1_FIXED,
            (
                "The previous program called build_sample_values, which is "
                "not defined anywhere; inline the sample list instead."
            ),
            "1. identical outputs on an inline sample",
        ),
        _program_response(
            _REPAIR_V2_ENHANCED,
            "Generalize to the empty-input boundary.",
            "2. empty input",
        ),
    ],
    budgets=Budgets(max_llm_calls=25, max_enhancements=1),
    expected_verdict="Consistent",
)


BUNDLE_SPECS = [URLFIELD, ALLGREEN, BUDGET, REPAIR]
