"""Synthetic patch corpus for the comparison-builder round-trip.

Each fixture is a pre/post module pair whose diff modifies exactly one
function, plus the inputs used to check that the built program's renamed
implementations behave exactly like the originals (same return value or
same exception type). ``kind == "collision"`` fixtures expect the builder
to refuse with a NameCollision instead.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PatchFixture:
    name: str
    pre_files: dict[str, str]
    post_files: dict[str, str]
    target_file: str
    inputs: list[tuple]
    kind: str = "ok"  # ok | collision
    class_name: str | None = None
    inner_path: tuple[str, ...] = ()
    method: str | None = None
    ctor_args: tuple = ()
    needs_package: bool = False  # materialize snapshot and put it on sys.path


FIXTURES: list[PatchFixture] = []


def _fixture(name, pre, post, inputs, path="mod.py", **kwargs):
    if isinstance(pre, str):
        pre = {path: pre}
        post = {path: post}
    FIXTURES.append(
        PatchFixture(
            name=name,
            pre_files=pre,
            post_files=post,
            target_file=path,
            inputs=inputs,
            **kwargs,
        )
    )


_INT_PAIRS = [(0, 0), (1, 2), (-3, 5), (10, -10), (7, 7), (100, 1), (-1, -1),
              (2, 9), (50, 50), (-20, 3), (8, 0), (0, -8)]

# 1. plain arithmetic with branches
_fixture(
    "clamp_sum",
    """\
def clamp_sum(a, b):
    total = a + b
    if total < 0:
        return 0
    if total > 100:
        return 100
    return total
""",
    """\
def clamp_sum(a, b):
    total = a + b
    if total < 0:
        return 0
    if total > 99:
        return 99
    return total
""",
    _INT_PAIRS,
)

# 2. recursion: the self-call must be renamed consistently
_fixture(
    "factorial_recursive",
    """\
def fact(n):
    if n <= 1:
        return 1
    return n * fact(n - 1)
""",
    """\
def fact(n):
    if n <= 0:
        return 1
    return n * fact(n - 1)
""",
    [(0,), (1,), (2,), (3,), (4,), (5,), (6,), (7,), (8,), (9,), (10,)],
)

# 3. string handling
_fixture(
    "normalize_spaces",
    """\
def normalize(text):
    parts = text.split()
    return " ".join(parts)
""",
    """\
def normalize(text):
    parts = text.split()
    return " ".join(p.lower() for p in parts)
""",
    [("a  b",), ("  x ",), ("",), ("Hello World",), ("ONE",), ("a\tb\nc",),
     (" multiple   gaps here ",), ("MiXeD CaSe",), ("1 2 3",), ("trailing ",),
     ("\n\n",)],
)

# 4. default arguments change behavior only when omitted... keep both explicit
_fixture(
    "power_default",
    """\
def power(base, exp=2):
    return base ** exp
""",
    """\
def power(base, exp=3):
    return base ** exp
""",
    [(2,), (3,), (0,), (1,), (-2,), (5,), (2, 4), (3, 0), (10,), (4,), (-1,)],
)

# 5. varargs
_fixture(
    "total_varargs",
    """\
def total(*values):
    acc = 0
    for v in values:
        acc += v
    return acc
""",
    """\
def total(*values):
    acc = 0
    for v in values:
        acc += v
    return acc * 1
""",
    [(), (1,), (1, 2), (1, 2, 3), (-1, 1), (10, 20, 30), (0, 0), (5,),
     (2, 4, 6, 8), (100, -100, 1), (9, 9, 9)],
)

# 6. exception behavior; uses a module-level exception class (shared dep)
_fixture(
    "validate_scheme",
    """\
class BadScheme(Exception):
    pass


def check(url):
    scheme = url.partition("://")[0]
    if scheme not in ("http", "https"):
        raise BadScheme(scheme)
    return url
""",
    """\
class BadScheme(Exception):
    pass


def check(url):
    scheme = url.partition("://")[0]
    if scheme not in ("http", "https", "file"):
        raise BadScheme(scheme)
    return url
""",
    [("http://a",), ("https://b",), ("ftp://c",), ("file:///d",), ("",),
     ("gopher://e",), ("http://",), ("HTTPS://x",), ("mailto:y",),
     ("https://ok/path",), ("file://host/p",)],
)

# 7. nested helper def inside the target
_fixture(
    "nested_helper",
    """\
def outer(values):
    def smallest(a, b):
        return a if a < b else b

    result = values[0]
    for v in values[1:]:
        result = smallest(result, v)
    return result
""",
    """\
def outer(values):
    def smallest(a, b):
        return a if a <= b else b

    result = values[0]
    for v in values[1:]:
        result = smallest(result, v)
    return result
""",
    [((3, 1, 2),), ((5,),), ((2, 2),), ((-1, -5, 0),), ((9, 8, 7, 6),),
     ((1, 1, 1),), ((0, 10),), ((4, -4),), ((6, 3, 6),), ((8, 2, 8, 1),)],
)

# 8. simple method; instance state in play
_fixture(
    "counter_step",
    """\
class Counter:
    def __init__(self, start=0):
        self.value = start

    def step(self, by):
        self.value = self.value + by
        return self.value
""",
    """\
class Counter:
    def __init__(self, start=0):
        self.value = start

    def step(self, by):
        self.value = self.value + by * 2
        return self.value
""",
    [(1,), (0,), (-1,), (5,), (10,), (2,), (3,), (-7,), (100,), (42,), (6,)],
    class_name="Counter",
    method="step",
    ctor_args=(10,),
)

# 9. method calling a sibling method (stays unrenamed inside each copy)
_fixture(
    "stack_pop_safe",
    """\
class Stack:
    def __init__(self, items=None):
        self.items = list(items or [])

    def is_empty(self):
        return not self.items

    def pop_safe(self, default):
        if self.is_empty():
            return default
        return self.items.pop()
""",
    """\
class Stack:
    def __init__(self, items=None):
        self.items = list(items or [])

    def is_empty(self):
        return not self.items

    def pop_safe(self, default):
        if self.is_empty():
            return None
        return self.items.pop()
""",
    [(0,), (99,), (-1,), ("d",), (None,), (7,), (1,), (2,), ("x",), (3,), (4,)],
    class_name="Stack",
    method="pop_safe",
    ctor_args=((1, 2, 3),),
)

# 10. method constructing its own class by name (class-name rewrite)
_fixture(
    "vector_scaled",
    """\
class Vec:
    def __init__(self, x):
        self.x = x

    def __eq__(self, other):
        return self.x == getattr(other, "x", object())

    def scaled(self, k):
        return Vec(self.x * k)
""",
    """\
class Vec:
    def __init__(self, x):
        self.x = x

    def __eq__(self, other):
        return self.x == getattr(other, "x", object())

    def scaled(self, k):
        return Vec(self.x * k + 0)
""",
    [(0,), (1,), (2,), (-1,), (3,), (10,), (-5,), (7,), (100,), (4,), (6,)],
    class_name="Vec",
    method="scaled",
    ctor_args=(3,),
)

# 11. method inside a nested class
_fixture(
    "nested_class_method",
    """\
class Outer:
    class Inner:
        def __init__(self, base):
            self.base = base

        def offset(self, d):
            return self.base + d
""",
    """\
class Outer:
    class Inner:
        def __init__(self, base):
            self.base = base

        def offset(self, d):
            return self.base + d + 1
""",
    [(0,), (1,), (-1,), (5,), (10,), (-10,), (2,), (3,), (7,), (8,), (9,)],
    class_name="Outer",
    inner_path=("Inner",),
    method="offset",
    ctor_args=(100,),
)

# 12. stdlib-decorated function (decorator travels with the span)
_fixture(
    "cached_fib",
    """\
import functools


@functools.lru_cache(maxsize=None)
def fib(n):
    if n < 2:
        return n
    return fib(n - 1) + fib(n - 2)
""",
    """\
import functools


@functools.lru_cache(maxsize=None)
def fib(n):
    if n < 2:
        return n * 1
    return fib(n - 1) + fib(n - 2)
""",
    [(0,), (1,), (2,), (3,), (4,), (5,), (6,), (7,), (8,), (9,), (10,)],
)

# 13. locally-defined decorator (internal dependency, shared unprefixed)
_fixture(
    "locally_decorated",
    """\
def doubled(fn):
    def wrapper(*args):
        return fn(*args) * 2

    return wrapper


@doubled
def raw_score(x):
    return x + 1
""",
    """\
def doubled(fn):
    def wrapper(*args):
        return fn(*args) * 2

    return wrapper


@doubled
def raw_score(x):
    return x + 2
""",
    [(0,), (1,), (2,), (-1,), (5,), (10,), (-3,), (4,), (7,), (9,), (12,)],
)

# 14-15. name-colliding helpers: the prefixed name already exists
_fixture(
    "collision_pre_name",
    """\
def pre_scale(x):
    return x


def scale(x):
    return x * 2
""",
    """\
def pre_scale(x):
    return x


def scale(x):
    return x * 3
""",
    [(1,)],
    kind="collision",
)

_fixture(
    "collision_post_name",
    """\
def post_helper(x):
    return x


def helper(x):
    return x - 1
""",
    """\
def post_helper(x):
    return x


def helper(x):
    return x - 2
""",
    [(1,)],
    kind="collision",
)

# 16. relative import, "from .helpers import offset" form
_fixture(
    "relative_import_from",
    {
        "fixpkg/__init__.py": "",
        "fixpkg/helpers.py": "def offset(v):\n    return v + 10\n",
        "fixpkg/core.py": (
            "from .helpers import offset\n\n\n"
            "def shifted(x):\n    return offset(x) * 2\n"
        ),
    },
    {
        "fixpkg/__init__.py": "",
        "fixpkg/helpers.py": "def offset(v):\n    return v + 10\n",
        "fixpkg/core.py": (
            "from .helpers import offset\n\n\n"
            "def shifted(x):\n    return offset(x) * 3\n"
        ),
    },
    [(0,), (1,), (-1,), (2,), (5,), (10,), (-10,), (3,), (4,), (6,), (7,)],
    path="fixpkg/core.py",
    needs_package=True,
)

# 17. relative import, "from . import helpers" form
_fixture(
    "relative_import_module",
    {
        "fixpkg/__init__.py": "",
        "fixpkg/helpers.py": "def offset(v):\n    return v + 10\n",
        "fixpkg/user.py": (
            "from . import helpers\n\n\n"
            "def bumped(x):\n    return helpers.offset(x) + 1\n"
        ),
    },
    {
        "fixpkg/__init__.py": "",
        "fixpkg/helpers.py": "def offset(v):\n    return v + 10\n",
        "fixpkg/user.py": (
            "from . import helpers\n\n\n"
            "def bumped(x):\n    return helpers.offset(x) + 2\n"
        ),
    },
    [(0,), (1,), (-1,), (2,), (5,), (10,), (-10,), (3,), (4,), (6,), (8,)],
    path="fixpkg/user.py",
    needs_package=True,
)

# 18. argument-mutating function
_fixture(
    "dedupe_in_place",
    """\
def dedupe(items):
    seen = set()
    out = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return out
""",
    """\
def dedupe(items):
    seen = set()
    out = []
    for item in reversed(items):
        if item not in seen:
            seen.add(item)
            out.append(item)
    return out
""",
    [([1, 1, 2],), ([],), ([3, 2, 3, 1],), (["a", "a"],), ([0],),
     ([1, 2, 3],), ([2, 2, 2, 2],), (["x", "y", "x"],), ([5, 4],),
     ([7, 7, 8, 8, 9],), ([1, 2, 1, 2],)],
)

# 19. list-building loop with an early exit
_fixture(
    "take_until_negative",
    """\
def take_until_negative(values):
    out = []
    for v in values:
        if v < 0:
            break
        out.append(v)
    return out
""",
    """\
def take_until_negative(values):
    out = []
    for v in values:
        if v <= 0:
            break
        out.append(v)
    return out
""",
    [((1, 2, -1, 3),), ((),), ((0, 1),), ((-5,),), ((1, 2, 3),),
     ((2, 0, 2),), ((9, -9, 9),), ((1,),), ((0,),), ((3, 2, 1, 0),),
     ((4, 5, -6, 7),)],
)

# 20. float math with helper dependency
_fixture(
    "mean_with_helper",
    """\
def _total(values):
    acc = 0.0
    for v in values:
        acc += v
    return acc


def mean(values):
    if not values:
        raise ValueError("empty")
    return _total(values) / len(values)
""",
    """\
def _total(values):
    acc = 0.0
    for v in values:
        acc += v
    return acc


def mean(values):
    if not values:
        return 0.0
    return _total(values) / len(values)
""",
    [((1.0, 2.0),), ((),), ((0.0,),), ((-1.0, 1.0),), ((2.5, 2.5, 2.5),),
     ((10.0,),), ((1.0, 2.0, 3.0, 4.0),), ((-5.0, -5.0),), ((100.0, 0.0),),
     ((0.5, 0.25),), ((3.0, 3.0, 3.0),)],
)

# 21. multi-branch string parsing
_fixture(
    "parse_flag",
    """\
def parse_flag(text):
    value = text.strip().lower()
    if value in ("yes", "true", "1"):
        return True
    if value in ("no", "false", "0"):
        return False
    raise ValueError(text)
""",
    """\
def parse_flag(text):
    value = text.strip().lower()
    if value in ("yes", "true", "1", "on"):
        return True
    if value in ("no", "false", "0", "off"):
        return False
    raise ValueError(text)
""",
    [("yes",), ("NO",), (" true ",), ("0",), ("on",), ("off",), ("maybe",),
     ("",), ("TRUE",), ("1",), ("No",)],
)
