from __future__ import annotations

import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# The Fig.-2-style reference grid used throughout: minimum monotone path cost
# is 24 (verified against brute-force path enumeration in test_grid_env).
REFERENCE_GRID = [[2, 7, 3, 1], [5, 1, 8, 4], [3, 6, 2, 9], [1, 4, 7, 2]]
REFERENCE_GRID_COST = 24


@pytest.fixture
def reference_grid() -> list[list[int]]:
    return [row[:] for row in REFERENCE_GRID]


def runner_cmd(name: str, *args: str) -> list[str]:
    """Entry command for a fixture runner script."""
    return [sys.executable, str(FIXTURES / name), *args]
