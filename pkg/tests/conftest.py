from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"
BUNDLES = FIXTURES / "bundles"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def bundles_dir() -> Path:
    return BUNDLES


def shim_runner_path() -> Path | None:
    """Path of the real in-sandbox runner, or None when the secondary
    component is not installed (primary-only criteria must still pass)."""
    try:
        import oracle_shim
    except ImportError:
        return None
    return oracle_shim.runner_path()


@pytest.fixture
def real_shim() -> Path:
    path = shim_runner_path()
    if path is None:
        pytest.skip("secondary component (oracle-shim) not built")
    return path
