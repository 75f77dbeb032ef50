"""Minimum-cost monotone grid paths: the reference oracle environment.

Instances are square grids of digits 1..9 with size = difficulty + 2; the
solver must report the cheapest top-left to bottom-right path using only
right/down moves.
"""

from __future__ import annotations

import random
from typing import Any, Sequence

from ..extraction import extract_answer
from ..types import ErrorKind, InstanceParams, Observation
from .base import NativeEnvironment


def grid_min_cost(grid: Sequence[Sequence[int]]) -> int:
    """Minimum right/down path sum via dynamic programming.

    Raises ValueError for empty, non-square, or non-positive grids.
    """
    n = len(grid)
    if n == 0:
        raise ValueError("grid must be non-empty")
    for row in grid:
        if len(row) != n:
            raise ValueError("grid must be square")
        for value in row:
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ValueError(f"grid entries must be positive integers, got {value!r}")
    dp = [[0] * n for _ in range(n)]
    dp[0][0] = grid[0][0]
    for i in range(n):
        for j in range(n):
            if i == 0 and j == 0:
                continue
            best: int | None = None
            if i > 0:
                best = dp[i - 1][j]
            if j > 0:
                best = dp[i][j - 1] if best is None else min(best, dp[i][j - 1])
            assert best is not None
            dp[i][j] = best + grid[i][j]
    return dp[n - 1][n - 1]


class GridPathEnv(NativeEnvironment):
    kind = "grid_path_cost"

    def generate_payload(self, difficulty: int, rng: random.Random) -> dict[str, Any]:
        size = difficulty + 2
        grid = [[rng.randint(1, 9) for _ in range(size)] for _ in range(size)]
        return {"grid": grid, "size": size}

    def observe(self, instance: InstanceParams) -> Observation:
        grid = instance.payload["grid"]
        rows = "\n".join(" ".join(str(v) for v in row) for row in grid)
        question = (
            "Find minimum cost path from top-left to bottom-right "
            "(only right/down moves):\n\n"
            f"{rows}\n\n"
            "Answer: <answer>NUMBER</answer>"
        )
        return Observation(question_text=question, answer_format_hint="<answer>NUMBER</answer>")

    def score(self, instance: InstanceParams, response_text: str) -> tuple[int, ErrorKind]:
        raw = extract_answer(response_text, take=self.answer_take)
        if raw is None:
            return 0, ErrorKind.EXTRACTION_FAILED
        try:
            answer = int(raw.strip())
        except ValueError:
            return 0, ErrorKind.EXTRACTION_FAILED
        expected = grid_min_cost(instance.payload["grid"])
        return (1 if answer == expected else 0), ErrorKind.NONE

    def oracle_answer(self, instance: InstanceParams) -> str:
        return str(grid_min_cost(instance.payload["grid"]))
