"""Answer-tag extraction shared by environments and the reward harness."""

from __future__ import annotations

import re

ANSWER_TAG_PATTERN = re.compile(r"<answer>(.*?)</answer>", re.DOTALL)


def extract_answer(
    text: str,
    pattern: re.Pattern[str] | str = ANSWER_TAG_PATTERN,
    take: str = "last",
) -> str | None:
    """Return the contents of the last (default) or first well-formed answer block.

    Models often restate their answer, so the last block wins by default;
    `take="first"` restores first-match extraction. Absence is a normal
    outcome, not an error.
    """
    if isinstance(pattern, str):
        pattern = re.compile(pattern, re.DOTALL)
    if take not in ("last", "first"):
        raise ValueError(f"take must be 'last' or 'first', got {take!r}")
    matches = list(pattern.finditer(text))
    if not matches:
        return None
    match = matches[-1] if take == "last" else matches[0]
    return match.group(1)
