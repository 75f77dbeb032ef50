"""Core environment contract: instances, observations, verdicts.

An environment is the triple (instance sampler, observation renderer,
verifier). Instances are self-contained: verifying a response needs nothing
beyond the instance payload. All value types here are immutable after
construction and safe to share across worker threads.
"""

from __future__ import annotations

import abc
import enum
from dataclasses import dataclass
from typing import Any

from .serialization import canonical_dumps, canonical_loads, validate_payload

DIFFICULTY_LEVELS = (1, 2, 3, 4, 5)
MAX_SEED = 2**64 - 1


def validate_difficulty(level: int) -> int:
    if not isinstance(level, int) or isinstance(level, bool) or not 1 <= level <= 5:
        raise ValueError(f"difficulty must be an integer in 1..5, got {level!r}")
    return level


def validate_seed(seed: int) -> int:
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return seed


class ErrorKind(str, enum.Enum):
    NONE = "none"
    EXTRACTION_FAILED = "extraction_failed"
    RUNNER_ERROR = "runner_error"
    TIMEOUT = "timeout"
    RESOURCE_LIMIT = "resource_limit"


@dataclass(frozen=True)
class InstanceParams:
    """Structured parameters of one problem instance."""

    env_id: str
    difficulty: int
    seed: int
    payload: dict[str, Any]

    def __post_init__(self) -> None:
        validate_difficulty(self.difficulty)
        validate_seed(self.seed)
        validate_payload(self.payload)

    def to_json(self) -> str:
        return canonical_dumps(self.to_obj())

    def to_obj(self) -> dict[str, Any]:
        return {
            "difficulty": self.difficulty,
            "env_id": self.env_id,
            "payload": self.payload,
            "seed": self.seed,
        }

    @classmethod
    def from_obj(cls, obj: dict[str, Any]) -> "InstanceParams":
        return cls(
            env_id=obj["env_id"],
            difficulty=obj["difficulty"],
            seed=obj["seed"],
            payload=obj["payload"],
        )

    @classmethod
    def from_json(cls, text: str) -> "InstanceParams":
        return cls.from_obj(canonical_loads(text))


@dataclass(frozen=True)
class Observation:
    question_text: str
    answer_format_hint: str = ""

    def __post_init__(self) -> None:
        if not self.question_text:
            raise ValueError("question_text must be non-empty")


@dataclass(frozen=True)
class Response:
    """Any string is a legal action."""

    text: str


@dataclass(frozen=True)
class Verdict:
    """Binary verifier outcome plus failure diagnostics.

    Invariants: errored implies reward 0; error_kind is NONE exactly when
    errored is False.
    """

    reward: int
    errored: bool = False
    error_kind: ErrorKind = ErrorKind.NONE
    latency_ms: float = 0.0

    def __post_init__(self) -> None:
        if self.reward not in (0, 1):
            raise ValueError(f"reward must be 0 or 1, got {self.reward!r}")
        if self.errored and self.reward != 0:
            raise ValueError("errored verdicts must carry reward 0")
        if (self.error_kind is ErrorKind.NONE) == self.errored:
            raise ValueError("error_kind must be NONE exactly when errored is False")


def error_verdict(kind: ErrorKind, latency_ms: float = 0.0) -> Verdict:
    return Verdict(reward=0, errored=True, error_kind=kind, latency_ms=latency_ms)


class EnvironmentInterface(abc.ABC):
    """Contract shared by native and protocol-backed environments.

    observe and verify are deterministic functions of their inputs; sample is
    deterministic given (difficulty, count, seed). Implementations are
    read-only after construction and shareable across concurrent workers.
    """

    env_id: str

    @abc.abstractmethod
    def sample(self, difficulty: int, count: int, seed: int) -> list[InstanceParams]:
        """Draw `count` instances at the given difficulty."""

    @abc.abstractmethod
    def observe(self, instance: InstanceParams) -> Observation:
        """Render an instance as a natural-language question."""

    @abc.abstractmethod
    def verify(self, instance: InstanceParams, response: Response) -> Verdict:
        """Score a response; never raises for arbitrary response text."""
