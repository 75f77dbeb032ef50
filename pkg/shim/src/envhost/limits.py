"""OS resource limits for the bundle process.

The supervising engine communicates the sandbox policy through ENVPROTO_*
environment variables at spawn time. Address-space and CPU limits are
installed where the platform supports them; where not, serving continues and
a warning frame is emitted (the engine-side wall-clock timeout still
protects). Network access is not granted by anything here: the host makes no
network calls and bundles are stdlib-only by contract.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_MEMORY_CAP = "ENVPROTO_MEMORY_CAP_BYTES"
ENV_MAX_OUTPUT = "ENVPROTO_MAX_OUTPUT_BYTES"
ENV_CPU_SECONDS = "ENVPROTO_CPU_SECONDS"
ENV_NETWORK_ALLOWED = "ENVPROTO_NETWORK_ALLOWED"

DEFAULT_MAX_OUTPUT = 4 * 1024 * 1024
DEFAULT_CPU_SECONDS = 300


@dataclass(frozen=True)
class HostPolicy:
    memory_cap: int | None
    max_output: int
    cpu_seconds: int
    network_allowed: bool

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> "HostPolicy":
        env = os.environ if env is None else env
        return cls(
            memory_cap=_int_or_none(env.get(ENV_MEMORY_CAP)),
            max_output=_int_or_none(env.get(ENV_MAX_OUTPUT)) or DEFAULT_MAX_OUTPUT,
            cpu_seconds=_int_or_none(env.get(ENV_CPU_SECONDS)) or DEFAULT_CPU_SECONDS,
            network_allowed=env.get(ENV_NETWORK_ALLOWED) == "1",
        )


def _int_or_none(raw: str | None) -> int | None:
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        return None
    return value if value > 0 else None


def apply_limits(policy: HostPolicy) -> list[str]:
    """Install rlimits; returns human-readable warnings for anything skipped."""
    warnings: list[str] = []
    try:
        import resource
    except ImportError:
        return ["resource limits unsupported on this platform"]
    if policy.memory_cap is not None:
        try:
            resource.setrlimit(resource.RLIMIT_AS, (policy.memory_cap, policy.memory_cap))
        except (ValueError, OSError) as exc:
            warnings.append(f"address-space limit not installed: {exc}")
    try:
        resource.setrlimit(resource.RLIMIT_CPU, (policy.cpu_seconds, policy.cpu_seconds + 5))
    except (ValueError, OSError) as exc:
        warnings.append(f"cpu-time limit not installed: {exc}")
    return warnings
