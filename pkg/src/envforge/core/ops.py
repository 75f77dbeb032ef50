"""Safe entry points over the raw environment capabilities.

These wrappers enforce preconditions (count bounds, env_id ownership) and the
verifier-totality guarantee: `verify` never propagates a crash, it encodes
every failure mode in the Verdict.
"""

from __future__ import annotations

import time

from .types import (
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


def sample_instances(
    env: EnvironmentInterface, difficulty: int, count: int, seed: int
) -> list[InstanceParams]:
    validate_difficulty(difficulty)
    validate_seed(seed)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    instances = env.sample(difficulty, count, seed)
    if len(instances) != count:
        raise RuntimeError(
            f"{env.env_id}: sampler returned {len(instances)} instances, expected {count}"
        )
    return instances


def render_observation(env: EnvironmentInterface, instance: InstanceParams) -> Observation:
    _check_ownership(env, instance)
    return env.observe(instance)


def verify(env: EnvironmentInterface, instance: InstanceParams, response: Response) -> Verdict:
    _check_ownership(env, instance)
    start = time.monotonic()
    try:
        return env.verify(instance, response)
    except Exception:
        latency = (time.monotonic() - start) * 1000.0
        return error_verdict(ErrorKind.RUNNER_ERROR, latency_ms=latency)


def _check_ownership(env: EnvironmentInterface, instance: InstanceParams) -> None:
    if instance.env_id != env.env_id:
        raise ValueError(
            f"instance belongs to {instance.env_id!r}, not {env.env_id!r}"
        )
