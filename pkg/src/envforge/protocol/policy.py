"""Sandbox policy for untrusted runner processes.

Wall-clock timeouts are enforced engine-side (the supervisor kills the
runner); memory and CPU limits are applied runner-side via OS resource
limits, communicated through ENVPROTO_* environment variables. There is no
container/VM layer by design.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Paper verifiers are simple programs; generous margins avoid false negatives.
DEFAULT_OP_TIMEOUTS = {"generate": 30.0, "observe": 5.0, "verify": 10.0, "shutdown": 5.0}

ENV_MEMORY_CAP = "ENVPROTO_MEMORY_CAP_BYTES"
ENV_MAX_OUTPUT = "ENVPROTO_MAX_OUTPUT_BYTES"
ENV_CPU_SECONDS = "ENVPROTO_CPU_SECONDS"
ENV_NETWORK_ALLOWED = "ENVPROTO_NETWORK_ALLOWED"


@dataclass(frozen=True)
class SandboxPolicy:
    wall_clock_timeout: float = 30.0  # handshake/default deadline, seconds
    memory_cap: int = 512 * 1024 * 1024
    max_output: int = 4 * 1024 * 1024
    network_allowed: bool = False
    op_timeouts: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_OP_TIMEOUTS))

    def __post_init__(self) -> None:
        if self.wall_clock_timeout <= 0:
            raise ValueError("wall_clock_timeout must be positive")
        if self.memory_cap <= 0 or self.max_output <= 0:
            raise ValueError("memory and output caps must be positive")
        for op, value in self.op_timeouts.items():
            if value <= 0:
                raise ValueError(f"op timeout for {op!r} must be positive")

    def timeout_for(self, op: str) -> float:
        return self.op_timeouts.get(op, self.wall_clock_timeout)

    def child_env(self) -> dict[str, str]:
        """ENVPROTO_* variables advertised to the runner."""
        # Cumulative CPU backstop: sessions serve many requests, so scale
        # well past a single op's wall-clock budget.
        cpu_seconds = max(300, int(self.wall_clock_timeout * 10))
        return {
            ENV_MEMORY_CAP: str(self.memory_cap),
            ENV_MAX_OUTPUT: str(self.max_output),
            ENV_CPU_SECONDS: str(cpu_seconds),
            ENV_NETWORK_ALLOWED: "1" if self.network_allowed else "0",
        }
