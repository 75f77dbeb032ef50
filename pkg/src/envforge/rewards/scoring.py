"""RLVR reward computation: format score times answer score.

The verifier only runs when the tag structure is well-formed (a product with
a zero factor is zero regardless), and it receives the parsed answer
re-wrapped in the tag pattern every bundle verifier expects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..core.types import EnvironmentInterface, Observation, Response

# Verbatim training prompt prefix mandating the think/answer structure.
PROMPT_PREFIX = (
    "Solve the following problem step by step. First, think about the "
    "reasoning process in the mind and then provide the answer. The "
    "reasoning process is enclosed within <think> </think> and the final "
    "answer is enclosed within <answer> </answer> tags, respectively, i.e., "
    "<think> reasoning process here </think> <answer> answer here</answer>."
)

from .tags import parse_tags


@dataclass(frozen=True)
class RewardBreakdown:
    format_score: int
    answer_score: int
    total: int

    def __post_init__(self) -> None:
        if self.format_score not in (0, 1) or self.answer_score not in (0, 1):
            raise ValueError("component scores must be 0 or 1")
        if self.total != self.format_score * self.answer_score:
            raise ValueError("total must be the product of the components")


def attach_prompt_prefix(question: Observation | str) -> str:
    """Prefix a question with the tag-structure instructions.

    Prefixing an already-prefixed prompt is a caller bug and is rejected.
    """
    text = question.question_text if isinstance(question, Observation) else question
    if text.startswith(PROMPT_PREFIX):
        raise ValueError("question is already prefixed")
    return f"{PROMPT_PREFIX}\n\n{text}"


def score_response(env: EnvironmentInterface, instance, response: Response) -> RewardBreakdown:
    """Score one rollout against its environment verifier."""
    parsed = parse_tags(response.text)
    if not parsed.format_ok:
        return RewardBreakdown(format_score=0, answer_score=0, total=0)
    verdict = env.verify(instance, Response(f"<answer>{parsed.answer_text}</answer>"))
    answer_score = 1 if verdict.reward == 1 else 0
    return RewardBreakdown(format_score=1, answer_score=answer_score, total=answer_score)


def score(
    record,
    response: Response,
    resolver: Callable[[str], EnvironmentInterface],
) -> RewardBreakdown:
    """Score a rollout against a dataset record's verifier reference.

    The verifier is only resolved (and possibly spawned) when the format
    check passes. An unresolvable reference raises: that signals a corrupted
    dataset, not a bad rollout.
    """
    parsed = parse_tags(response.text)
    if not parsed.format_ok:
        return RewardBreakdown(format_score=0, answer_score=0, total=0)
    env = resolver(record.verifier_ref)
    verdict = env.verify(record.instance, Response(f"<answer>{parsed.answer_text}</answer>"))
    answer_score = 1 if verdict.reward == 1 else 0
    return RewardBreakdown(format_score=1, answer_score=answer_score, total=answer_score)
