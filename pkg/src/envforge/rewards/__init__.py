from .scoring import PROMPT_PREFIX, RewardBreakdown, attach_prompt_prefix, score, score_response
from .serve import serve_frames
from .tags import TagParse, parse_tags

__all__ = [
    "PROMPT_PREFIX",
    "RewardBreakdown",
    "TagParse",
    "attach_prompt_prefix",
    "parse_tags",
    "score",
    "score_response",
    "serve_frames",
]
