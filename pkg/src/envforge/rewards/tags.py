"""Strict think/answer tag-structure parsing for RLVR format rewards.

A response is well-formed exactly when it contains one think block followed
by one answer block, non-overlapping. Text outside the tags is tolerated
(documented decision); nested or repeated blocks fail the format check.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_TOKENS = {
    "think_open": re.compile(r"<think>"),
    "think_close": re.compile(r"</think>"),
    "answer_open": re.compile(r"<answer>"),
    "answer_close": re.compile(r"</answer>"),
}


@dataclass(frozen=True)
class TagParse:
    think_text: str | None
    answer_text: str | None
    format_ok: bool


def parse_tags(text: str) -> TagParse:
    positions = {name: [m.start() for m in pattern.finditer(text)] for name, pattern in _TOKENS.items()}

    # Exactly one of each token rules out repeats and nesting outright.
    if any(len(found) != 1 for found in positions.values()):
        return TagParse(
            think_text=_unique_block(text, positions, "think"),
            answer_text=_unique_block(text, positions, "answer"),
            format_ok=False,
        )

    t_open = positions["think_open"][0]
    t_close = positions["think_close"][0]
    a_open = positions["answer_open"][0]
    a_close = positions["answer_close"][0]
    ordered = t_open < t_close < a_open < a_close
    think = text[t_open + len("<think>") : t_close] if t_open < t_close else None
    answer = text[a_open + len("<answer>") : a_close] if a_open < a_close else None
    return TagParse(think_text=think, answer_text=answer, format_ok=ordered)


def _unique_block(text: str, positions: dict[str, list[int]], tag: str) -> str | None:
    """Best-effort text recovery when a single well-formed block exists."""
    opens = positions[f"{tag}_open"]
    closes = positions[f"{tag}_close"]
    if len(opens) == 1 and len(closes) == 1 and opens[0] < closes[0]:
        return text[opens[0] + len(f"<{tag}>") : closes[0]]
    return None
