"""Environment reference resolution.

A verifier ref is either in-process ("native:<kind>" or
"native:<kind>:<env_id>" for aliased scale fixtures) or a path to a bundle
manifest directory served over the wire protocol. The resolver caches
protocol environments so session pools are shared per bundle.
"""

from __future__ import annotations

import json
from pathlib import Path

from .core.native import NATIVE_KINDS, create_native
from .core.types import EnvironmentInterface
from .protocol.environment import ProtocolEnvironment
from .protocol.policy import SandboxPolicy


class UnresolvableEnvironmentError(KeyError):
    """The ref does not name a usable environment (corrupted dataset/state)."""


class EnvironmentResolver:
    def __init__(
        self,
        base_dir: str | Path | None = None,
        policy: SandboxPolicy | None = None,
        pool_size: int = 1,
        max_requests_per_session: int = 1000,
    ):
        self.base_dir = Path(base_dir) if base_dir is not None else None
        self.policy = policy or SandboxPolicy()
        self.pool_size = pool_size
        self.max_requests = max_requests_per_session
        self._cache: dict[str, EnvironmentInterface] = {}

    def resolve(self, ref: str) -> EnvironmentInterface:
        if ref in self._cache:
            return self._cache[ref]
        env = self._build(ref)
        self._cache[ref] = env
        return env

    __call__ = resolve

    def close(self) -> None:
        for env in self._cache.values():
            close = getattr(env, "close", None)
            if close is not None:
                close()
        self._cache.clear()

    def _build(self, ref: str) -> EnvironmentInterface:
        if ref.startswith("native:"):
            parts = ref.split(":")
            kind = parts[1] if len(parts) > 1 else ""
            env_id = parts[2] if len(parts) > 2 else None
            if kind not in NATIVE_KINDS:
                raise UnresolvableEnvironmentError(f"unknown native environment {kind!r}")
            return create_native(kind, env_id=env_id)
        manifest_path = Path(ref)
        if self.base_dir is not None and not manifest_path.is_absolute():
            manifest_path = self.base_dir / manifest_path
        if manifest_path.is_dir():
            manifest_path = manifest_path / "manifest.json"
        if not manifest_path.exists():
            raise UnresolvableEnvironmentError(f"bundle manifest not found: {ref!r}")
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
            entry_command = list(manifest["entry_command"])
            env_id = manifest["env_id"]
        except (ValueError, KeyError, TypeError) as exc:
            raise UnresolvableEnvironmentError(f"bad bundle manifest {ref!r}: {exc}") from exc
        return ProtocolEnvironment(
            env_id,
            entry_command,
            policy=self.policy,
            cwd=manifest_path.parent,
            pool_size=self.pool_size,
            max_requests_per_session=self.max_requests,
        )


def native_ref(kind: str, env_id: str | None = None) -> str:
    return f"native:{kind}" if env_id is None else f"native:{kind}:{env_id}"
