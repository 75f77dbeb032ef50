"""Versioned prompt templates.

The descriptor prompt is reproduced verbatim from its source; the synthesis,
judging, and revision prompts are reconstructions (the criteria are known,
the original wording is not) and are treated as configuration: edit the text
files, not code. TEMPLATE_VERSION tags the prompt set in audit logs.
"""

from __future__ import annotations

from importlib import resources

TEMPLATE_VERSION = 1

_NAMES = ("synthesis", "judge_stage1", "judge_stage2", "revise", "descriptor")


def load_template(name: str) -> str:
    if name not in _NAMES:
        raise KeyError(f"unknown template {name!r}")
    return resources.files(__package__).joinpath(f"{name}.txt").read_text(encoding="utf-8")
