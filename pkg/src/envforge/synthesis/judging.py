"""Two-stage LLM-as-judge filtering with engine-side pass rules.

The judge returns machine-readable boolean flags in a fenced JSON block; the
engine, never the model, computes pass/fail:

  code review:     (reference_free OR computational_advantage)
                   AND implementation_complete AND difficulty_scales
  question review: well_specified AND loophole_free
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass

_FENCED_JSON = re.compile(r"```(?:json)?\s*(\{.*?\})\s*```", re.DOTALL)
_BARE_JSON = re.compile(r"\{.*\}", re.DOTALL)

STAGE1_FLAGS = (
    "reference_free",
    "computational_advantage",
    "implementation_complete",
    "difficulty_scales",
)
STAGE2_FLAGS = ("well_specified", "loophole_free")


class JudgeStage(str, enum.Enum):
    CODE_REVIEW = "code_review"
    QUESTION_REVIEW = "question_review"


@dataclass(frozen=True)
class JudgeVerdict:
    stage: JudgeStage
    reference_free: bool = False
    computational_advantage: bool = False
    implementation_complete: bool = False
    difficulty_scales: bool = False
    well_specified: bool = False
    loophole_free: bool = False
    issues: tuple[str, ...] = ()
    passed: bool = False

    def to_obj(self) -> dict:
        return {
            "computational_advantage": self.computational_advantage,
            "difficulty_scales": self.difficulty_scales,
            "issues": list(self.issues),
            "loophole_free": self.loophole_free,
            "passed": self.passed,
            "reference_free": self.reference_free,
            "stage": self.stage.value,
            "well_specified": self.well_specified,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "JudgeVerdict":
        return cls(
            stage=JudgeStage(obj["stage"]),
            reference_free=obj["reference_free"],
            computational_advantage=obj["computational_advantage"],
            implementation_complete=obj.get("implementation_complete", False),
            difficulty_scales=obj["difficulty_scales"],
            well_specified=obj["well_specified"],
            loophole_free=obj["loophole_free"],
            issues=tuple(obj["issues"]),
            passed=obj["passed"],
        )


def judge_pass_rule(stage: JudgeStage, flags: dict[str, bool]) -> bool:
    """The pass rules, applied by the engine over the judge's raw flags."""
    if stage is JudgeStage.CODE_REVIEW:
        return (
            (flags.get("reference_free", False) or flags.get("computational_advantage", False))
            and flags.get("implementation_complete", False)
            and flags.get("difficulty_scales", False)
        )
    return flags.get("well_specified", False) and flags.get("loophole_free", False)


def make_verdict(stage: JudgeStage, flags: dict[str, bool], issues: tuple[str, ...] = ()) -> JudgeVerdict:
    return JudgeVerdict(
        stage=stage,
        reference_free=flags.get("reference_free", False),
        computational_advantage=flags.get("computational_advantage", False),
        implementation_complete=flags.get("implementation_complete", False),
        difficulty_scales=flags.get("difficulty_scales", False),
        well_specified=flags.get("well_specified", False),
        loophole_free=flags.get("loophole_free", False),
        issues=issues,
        passed=judge_pass_rule(stage, flags),
    )


def failed_verdict(stage: JudgeStage, issues: tuple[str, ...]) -> JudgeVerdict:
    return JudgeVerdict(stage=stage, issues=issues, passed=False)


def parse_judge_flags(text: str, stage: JudgeStage) -> tuple[dict[str, bool], tuple[str, ...]] | None:
    """Extract the stage's boolean flags and issue list; None if unparseable."""
    required = STAGE1_FLAGS if stage is JudgeStage.CODE_REVIEW else STAGE2_FLAGS
    for pattern in (_FENCED_JSON, _BARE_JSON):
        match = pattern.search(text)
        if not match:
            continue
        blob = match.group(1) if pattern is _FENCED_JSON else match.group(0)
        try:
            obj = json.loads(blob)
        except json.JSONDecodeError:
            continue
        if not isinstance(obj, dict):
            continue
        if not all(isinstance(obj.get(flag), bool) for flag in required):
            continue
        flags = {flag: obj[flag] for flag in required}
        raw_issues = obj.get("issues", [])
        issues = tuple(str(i) for i in raw_issues) if isinstance(raw_issues, list) else ()
        return flags, issues
    return None
