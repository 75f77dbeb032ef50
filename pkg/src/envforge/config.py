"""Pipeline configuration: one JSON document, validated strictly on load.

Unknown keys anywhere in the tree are rejected so typos fail fast instead of
silently running with defaults. Credentials never live in the file; only the
name of the environment variable that holds them does.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .protocol.policy import DEFAULT_OP_TIMEOUTS, SandboxPolicy


class ConfigError(ValueError):
    pass


@dataclass
class ProviderConfig:
    kind: str = "mock"  # mock | http
    model: str = ""
    endpoint: str = ""
    api_key_env: str = "ENVFORGE_API_KEY"
    requests_per_second: float | None = None
    retries: int = 1

    def validate(self) -> None:
        if self.kind not in ("mock", "http"):
            raise ConfigError(f"provider.kind must be mock or http, got {self.kind!r}")
        if self.kind == "http" and (not self.model or not self.endpoint):
            raise ConfigError("provider.kind=http requires model and endpoint")
        if self.requests_per_second is not None and self.requests_per_second <= 0:
            raise ConfigError("provider.requests_per_second must be positive")


@dataclass
class SamplingConfig:
    temperature: float = 0.7
    max_tokens: int = 8192

    def validate(self) -> None:
        if self.temperature < 0:
            raise ConfigError("sampling.temperature must be >= 0")
        if self.max_tokens < 1:
            raise ConfigError("sampling.max_tokens must be >= 1")


@dataclass
class SandboxConfig:
    wall_clock_timeout: float = 30.0
    memory_cap_bytes: int = 512 * 1024 * 1024
    max_output_bytes: int = 4 * 1024 * 1024
    network_allowed: bool = False
    op_timeouts: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_OP_TIMEOUTS))

    def validate(self) -> None:
        try:
            self.to_policy()
        except ValueError as exc:
            raise ConfigError(f"sandbox: {exc}") from exc

    def to_policy(self) -> SandboxPolicy:
        return SandboxPolicy(
            wall_clock_timeout=self.wall_clock_timeout,
            memory_cap=self.memory_cap_bytes,
            max_output=self.max_output_bytes,
            network_allowed=self.network_allowed,
            op_timeouts=dict(self.op_timeouts),
        )


@dataclass
class SynthesisConfig:
    attempts: int = 8
    probes_per_level: int = 3
    keywords: list[str] | None = None  # explicit keyword list (fixtures/tests)
    extra_keywords: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if self.attempts < 1:
            raise ConfigError("synthesis.attempts must be >= 1")
        if self.probes_per_level < 1:
            raise ConfigError("synthesis.probes_per_level must be >= 1")
        if self.keywords is not None and not self.keywords:
            raise ConfigError("synthesis.keywords, when given, must be non-empty")


@dataclass
class CalibrationConfig:
    alpha: float = 0.05
    samples_per_level: int = 16
    method: str = "logistic"

    def validate(self) -> None:
        if not 0 < self.alpha < 1:
            raise ConfigError("calibration.alpha must be in (0, 1)")
        if self.samples_per_level < 1:
            raise ConfigError("calibration.samples_per_level must be >= 1")
        if self.method not in ("logistic", "ols_rates"):
            raise ConfigError("calibration.method must be logistic or ols_rates")


@dataclass
class DatasetSection:
    name: str = "main"
    env_count: int = 1
    per_env: int = 40
    val_total: int = 500

    def validate(self) -> None:
        if self.env_count < 1 or self.per_env < 1:
            raise ConfigError("dataset.env_count and dataset.per_env must be >= 1")
        if self.val_total < 0:
            raise ConfigError("dataset.val_total must be >= 0")


@dataclass
class EntropyConfig:
    sample_size: int = 1000
    batch_size: int = 10
    embedding_dim: int = 768
    embedder: str = "hashing"  # hashing | remote
    endpoint: str = ""
    model: str = ""
    taus: list[float] | None = None

    def validate(self) -> None:
        if self.sample_size < 1 or self.batch_size < 1:
            raise ConfigError("entropy.sample_size and entropy.batch_size must be >= 1")
        if self.embedder not in ("hashing", "remote"):
            raise ConfigError("entropy.embedder must be hashing or remote")
        if self.embedder == "remote" and (not self.endpoint or not self.model):
            raise ConfigError("entropy.embedder=remote requires endpoint and model")
        if self.taus is not None and any(b < a for a, b in zip(self.taus, self.taus[1:])):
            raise ConfigError("entropy.taus must be ascending")


@dataclass
class PipelineConfig:
    workspace: str = "workspace"
    seed: int = 0
    workers: int = 1
    runner_command: list[str] = field(default_factory=lambda: ["python3", "-m", "envhost", "{bundle}"])
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    sandbox: SandboxConfig = field(default_factory=SandboxConfig)
    synthesis: SynthesisConfig = field(default_factory=SynthesisConfig)
    calibration: CalibrationConfig = field(default_factory=CalibrationConfig)
    dataset: DatasetSection = field(default_factory=DatasetSection)
    entropy: EntropyConfig = field(default_factory=EntropyConfig)

    def validate(self) -> None:
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.runner_command or not any("{bundle}" in part for part in self.runner_command):
            raise ConfigError("runner_command must reference the {bundle} placeholder")
        for section in (
            self.provider,
            self.sampling,
            self.sandbox,
            self.synthesis,
            self.calibration,
            self.dataset,
            self.entropy,
        ):
            section.validate()

    @property
    def workspace_path(self) -> Path:
        return Path(self.workspace)


_SECTIONS = {
    "provider": ProviderConfig,
    "sampling": SamplingConfig,
    "sandbox": SandboxConfig,
    "synthesis": SynthesisConfig,
    "calibration": CalibrationConfig,
    "dataset": DatasetSection,
    "entropy": EntropyConfig,
}


def load_config(path: str | Path) -> PipelineConfig:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_obj(obj)


def config_from_obj(obj: Any) -> PipelineConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")
    config = PipelineConfig()
    top_fields = {f.name for f in dataclasses.fields(PipelineConfig)}
    for key, value in obj.items():
        if key not in top_fields:
            raise ConfigError(f"unknown config key {key!r}")
        if key in _SECTIONS:
            setattr(config, key, _section_from_obj(_SECTIONS[key], value, key))
        else:
            setattr(config, key, value)
    config.validate()
    return config


def _section_from_obj(cls, obj: Any, path: str):
    if not isinstance(obj, dict):
        raise ConfigError(f"{path} must be a JSON object")
    known = {f.name for f in dataclasses.fields(cls)}
    section = cls()
    for key, value in obj.items():
        if key not in known:
            raise ConfigError(f"unknown config key {path}.{key}")
        setattr(section, key, value)
    return section
