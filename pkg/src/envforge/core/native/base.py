"""Base class for in-process reference environments.

Natives serve as golden oracles and protocol-conformance fixtures; there is
no attempt to cover the breadth of synthesized environments. Each native
knows its own oracle answer, which synthesized bundles do not.
"""

from __future__ import annotations

import abc
import random
import time
from typing import Any

from ..serialization import derive_instance_seed
from ..types import (
    ErrorKind,
    InstanceParams,
    EnvironmentInterface,
    Response,
    Verdict,
    error_verdict,
    validate_difficulty,
    validate_seed,
)


class NativeEnvironment(EnvironmentInterface):
    """Deterministic sampler scaffolding over a payload generator."""

    kind: str = ""

    def __init__(self, env_id: str | None = None, answer_take: str = "last"):
        self.env_id = env_id or self.kind
        self.answer_take = answer_take

    def sample(self, difficulty: int, count: int, seed: int) -> list[InstanceParams]:
        validate_difficulty(difficulty)
        validate_seed(seed)
        if count < 1:
            raise ValueError(f"count must be >= 1, got {count}")
        instances = []
        for index in range(count):
            instance_seed = derive_instance_seed(self.env_id, difficulty, index, seed)
            rng = random.Random(instance_seed)
            payload = self.generate_payload(difficulty, rng)
            instances.append(
                InstanceParams(
                    env_id=self.env_id,
                    difficulty=difficulty,
                    seed=instance_seed,
                    payload=payload,
                )
            )
        return instances

    def verify(self, instance: InstanceParams, response: Response) -> Verdict:
        start = time.monotonic()
        try:
            reward, kind = self.score(instance, response.text)
        except Exception:
            # Verifier totality: internal failures become errored verdicts.
            return error_verdict(ErrorKind.RUNNER_ERROR, latency_ms=_ms_since(start))
        latency = _ms_since(start)
        if kind is not ErrorKind.NONE:
            return error_verdict(kind, latency_ms=latency)
        return Verdict(reward=reward, latency_ms=latency)

    @abc.abstractmethod
    def generate_payload(self, difficulty: int, rng: random.Random) -> dict[str, Any]:
        """Build one instance payload from a seeded RNG."""

    @abc.abstractmethod
    def score(self, instance: InstanceParams, response_text: str) -> tuple[int, ErrorKind]:
        """Return (reward, error_kind); raising is treated as a runner error."""

    @abc.abstractmethod
    def oracle_answer(self, instance: InstanceParams) -> str:
        """A known-correct answer string (native environments only)."""


def _ms_since(start: float) -> float:
    return (time.monotonic() - start) * 1000.0
