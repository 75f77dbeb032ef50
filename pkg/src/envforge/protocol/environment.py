"""EnvironmentInterface adapter over a runner session pool.

Verify failures of any kind become errored verdicts with reward 0 (the
training-time error rule); generate/observe failures raise
EnvironmentRunnerError for the pipeline to handle.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Any

from ..core.types import (
    EnvironmentInterface,
    ErrorKind,
    InstanceParams,
    Observation,
    Response,
    Verdict,
    error_verdict,
)
from .frames import ProtocolResponse
from .policy import SandboxPolicy
from .pool import SessionPool
from .session import PREFIX_RESOURCE, PREFIX_TIMEOUT


class EnvironmentRunnerError(RuntimeError):
    """A generate/observe call could not be served by the runner."""


def classify_error_message(message: str | None) -> ErrorKind:
    if not message:
        return ErrorKind.RUNNER_ERROR
    if message.startswith(PREFIX_TIMEOUT):
        return ErrorKind.TIMEOUT
    if message.startswith(PREFIX_RESOURCE):
        return ErrorKind.RESOURCE_LIMIT
    return ErrorKind.RUNNER_ERROR


def verdict_from_response(response: ProtocolResponse, latency_ms: float) -> Verdict:
    """Map a verify response to a Verdict; ok=false is always reward 0/errored."""
    if not response.ok:
        return error_verdict(classify_error_message(response.error_message), latency_ms=latency_ms)
    reward = response.result.get("reward")
    if reward not in (0, 1):
        return error_verdict(ErrorKind.RUNNER_ERROR, latency_ms=latency_ms)
    return Verdict(reward=reward, latency_ms=latency_ms)


class ProtocolEnvironment(EnvironmentInterface):
    def __init__(
        self,
        env_id: str,
        entry_command: list[str],
        policy: SandboxPolicy | None = None,
        cwd: str | Path | None = None,
        pool_size: int = 1,
        max_requests_per_session: int = 1000,
    ):
        self.env_id = env_id
        self.policy = policy or SandboxPolicy()
        self._pool = SessionPool(
            entry_command,
            self.policy,
            cwd=cwd,
            size=pool_size,
            max_requests_per_session=max_requests_per_session,
        )

    def close(self) -> None:
        self._pool.close()

    def sample(self, difficulty: int, count: int, seed: int) -> list[InstanceParams]:
        payload = {"difficulty": difficulty, "count": count, "seed": seed}
        response = self._call("generate", payload)
        if not response.ok:
            raise EnvironmentRunnerError(f"{self.env_id}: generate failed: {response.error_message}")
        raw = response.result.get("instances")
        if not isinstance(raw, list):
            raise EnvironmentRunnerError(f"{self.env_id}: generate returned no instance list")
        instances = []
        for obj in raw:
            try:
                instance = InstanceParams.from_obj(obj)
            except (KeyError, TypeError, ValueError) as exc:
                raise EnvironmentRunnerError(f"{self.env_id}: bad instance document: {exc}") from exc
            if instance.env_id != self.env_id:
                raise EnvironmentRunnerError(
                    f"{self.env_id}: runner emitted instance for {instance.env_id!r}"
                )
            instances.append(instance)
        return instances

    def observe(self, instance: InstanceParams) -> Observation:
        response = self._call("observe", {"instance": instance.to_obj()})
        if not response.ok:
            raise EnvironmentRunnerError(f"{self.env_id}: observe failed: {response.error_message}")
        try:
            return Observation(
                question_text=response.result["question_text"],
                answer_format_hint=response.result.get("answer_format_hint", ""),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise EnvironmentRunnerError(f"{self.env_id}: bad observation: {exc}") from exc

    def verify(self, instance: InstanceParams, response: Response) -> Verdict:
        start = time.monotonic()
        try:
            resp = self._call(
                "verify", {"instance": instance.to_obj(), "response_text": response.text}
            )
        except Exception:
            # The supervising engine never crashes on a verify path.
            return error_verdict(
                ErrorKind.RUNNER_ERROR, latency_ms=(time.monotonic() - start) * 1000.0
            )
        return verdict_from_response(resp, latency_ms=(time.monotonic() - start) * 1000.0)

    def _call(self, op: str, payload: dict[str, Any]) -> ProtocolResponse:
        with self._pool.session() as session:
            return session.call(op, payload)
