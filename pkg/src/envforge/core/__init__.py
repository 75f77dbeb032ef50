from .extraction import ANSWER_TAG_PATTERN, extract_answer
from .ops import render_observation, sample_instances, verify
from .serialization import (
    canonical_dumps,
    canonical_loads,
    derive_instance_seed,
    stable_digest,
    stable_u64,
    validate_payload,
)
from .types import (
    DIFFICULTY_LEVELS,
    EnvironmentInterface,
    ErrorKind,
    InstanceParams,
    Observation,
    Response,
    Verdict,
    error_verdict,
    validate_difficulty,
    validate_seed,
)

__all__ = [
    "ANSWER_TAG_PATTERN",
    "DIFFICULTY_LEVELS",
    "EnvironmentInterface",
    "ErrorKind",
    "InstanceParams",
    "Observation",
    "Response",
    "Verdict",
    "canonical_dumps",
    "canonical_loads",
    "derive_instance_seed",
    "error_verdict",
    "extract_answer",
    "render_observation",
    "sample_instances",
    "stable_digest",
    "stable_u64",
    "validate_difficulty",
    "validate_payload",
    "validate_seed",
    "verify",
]
