"""Procedural (question, verifier) dataset emission.

Stage 4 is entirely procedural: given N accepted environments and M instances
per environment, records are regenerated from seeds alone, so deleting the
record file and rebuilding from the manifest is byte-identical. Train and
validation draw from distinct seed namespaces, keeping their record ids
disjoint by construction.
"""

from __future__ import annotations

import csv
import hashlib
import io
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from ..core.ops import render_observation, sample_instances
from ..core.serialization import canonical_dumps, canonical_loads, stable_digest, stable_u64
from ..core.types import DIFFICULTY_LEVELS, EnvironmentInterface, InstanceParams
from ..rewards.scoring import attach_prompt_prefix

MANIFEST_FORMAT = 1


def uniform_difficulty_split(per_env: int) -> dict[int, int]:
    """Uniform split over levels 1..5; remainders go to the lowest levels."""
    base, remainder = divmod(per_env, len(DIFFICULTY_LEVELS))
    return {
        level: base + (1 if i < remainder else 0)
        for i, level in enumerate(DIFFICULTY_LEVELS)
    }


@dataclass(frozen=True)
class DatasetConfig:
    env_count: int
    per_env: int
    dataset_seed: int
    split: str = "train"
    name: str = "main"
    difficulty_split: dict[int, int] | None = None

    def __post_init__(self) -> None:
        if self.env_count < 1:
            raise ValueError("env_count must be >= 1")
        if self.per_env < 1:
            raise ValueError("per_env must be >= 1")
        if self.split not in ("train", "val"):
            raise ValueError(f"split must be train or val, got {self.split!r}")
        if self.difficulty_split is not None:
            if sorted(self.difficulty_split) != list(DIFFICULTY_LEVELS):
                raise ValueError("difficulty_split must cover levels 1..5")
            if sum(self.difficulty_split.values()) != self.per_env:
                raise ValueError("difficulty_split must sum to per_env")

    def effective_split(self) -> dict[int, int]:
        return dict(self.difficulty_split) if self.difficulty_split else uniform_difficulty_split(self.per_env)


@dataclass(frozen=True)
class DatasetRecord:
    record_id: str
    env_id: str
    difficulty: int
    instance: InstanceParams
    prompt: str
    verifier_ref: str

    def to_obj(self) -> dict:
        return {
            "difficulty": self.difficulty,
            "env_id": self.env_id,
            "instance": self.instance.to_obj(),
            "prompt": self.prompt,
            "record_id": self.record_id,
            "verifier_ref": self.verifier_ref,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "DatasetRecord":
        return cls(
            record_id=obj["record_id"],
            env_id=obj["env_id"],
            difficulty=obj["difficulty"],
            instance=InstanceParams.from_obj(obj["instance"]),
            prompt=obj["prompt"],
            verifier_ref=obj["verifier_ref"],
        )


@dataclass
class DatasetManifest:
    name: str
    split: str
    dataset_seed: int
    env_refs: list[str]  # final env list actually used, in build order
    per_env_counts: dict[str, int]
    difficulty_split: dict[int, int] | None
    record_count: int
    per_level_counts: dict[int, int]
    content_sha256: str
    records_file: str
    replacements: list[dict] = field(default_factory=list)

    def to_obj(self) -> dict:
        return {
            "content_sha256": self.content_sha256,
            "dataset_seed": self.dataset_seed,
            "difficulty_split": None
            if self.difficulty_split is None
            else {str(k): v for k, v in self.difficulty_split.items()},
            "env_refs": self.env_refs,
            "format_version": MANIFEST_FORMAT,
            "name": self.name,
            "per_env_counts": self.per_env_counts,
            "per_level_counts": {str(k): v for k, v in self.per_level_counts.items()},
            "record_count": self.record_count,
            "records_file": self.records_file,
            "replacements": self.replacements,
            "split": self.split,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "DatasetManifest":
        return cls(
            name=obj["name"],
            split=obj["split"],
            dataset_seed=obj["dataset_seed"],
            env_refs=list(obj["env_refs"]),
            per_env_counts=dict(obj["per_env_counts"]),
            difficulty_split=None
            if obj["difficulty_split"] is None
            else {int(k): v for k, v in obj["difficulty_split"].items()},
            record_count=obj["record_count"],
            per_level_counts={int(k): v for k, v in obj["per_level_counts"].items()},
            content_sha256=obj["content_sha256"],
            records_file=obj["records_file"],
            replacements=list(obj.get("replacements", [])),
        )


def record_id_for(env_id: str, difficulty: int, instance_seed: int) -> str:
    return stable_digest("record", env_id, difficulty, instance_seed)


def sample_env_subset(env_refs: Sequence[str], n: int, dataset_seed: int) -> list[str]:
    """Uniform subset without replacement, deterministic under seed."""
    if n > len(env_refs):
        raise ValueError(f"requested {n} environments but only {len(env_refs)} available")
    ordered = sorted(env_refs)
    rng = random.Random(stable_u64("env-subset", dataset_seed))
    return sorted(rng.sample(ordered, n))


def generate_env_records(
    env: EnvironmentInterface,
    verifier_ref: str,
    counts: dict[int, int],
    dataset_seed: int,
    split: str,
) -> list[DatasetRecord]:
    """All records for one environment; seeds derive from the split namespace."""
    base_seed = stable_u64("dataset", dataset_seed, split)
    records = []
    for difficulty, count in sorted(counts.items()):
        if count == 0:
            continue
        instances = sample_instances(env, difficulty, count, base_seed)
        for instance in instances:
            observation = render_observation(env, instance)
            records.append(
                DatasetRecord(
                    record_id=record_id_for(env.env_id, difficulty, instance.seed),
                    env_id=env.env_id,
                    difficulty=difficulty,
                    instance=instance,
                    prompt=attach_prompt_prefix(observation),
                    verifier_ref=verifier_ref,
                )
            )
    return records


def build_dataset(
    config: DatasetConfig,
    envs: Sequence[tuple[str, EnvironmentInterface]],
    out_dir: str | Path,
    resolver: Callable[[str], EnvironmentInterface] | None = None,
) -> DatasetManifest:
    """Emit exactly env_count * per_env records to out_dir.

    `envs` is the pool of (verifier_ref, environment) candidates; the subset
    actually used is sampled deterministically. An environment that fails to
    generate is replaced by the next unused candidate (logged in the
    manifest); running out of spares is a hard error.
    """
    if config.env_count > len(envs):
        raise ValueError(
            f"config needs {config.env_count} environments, pool has {len(envs)}"
        )
    by_ref = dict(envs)
    if len(by_ref) != len(envs):
        raise ValueError("duplicate verifier refs in environment pool")
    chosen = sample_env_subset(list(by_ref), config.env_count, config.dataset_seed)
    spares = [ref for ref in sorted(by_ref) if ref not in set(chosen)]
    counts = config.effective_split()

    env_refs_used: list[str] = []
    replacements: list[dict] = []
    all_records: list[DatasetRecord] = []
    queue = list(chosen)
    while queue:
        ref = queue.pop(0)
        env = by_ref[ref]
        try:
            records = generate_env_records(env, ref, counts, config.dataset_seed, config.split)
        except Exception as exc:
            if not spares:
                raise RuntimeError(
                    f"environment {ref} failed to generate and no spares remain"
                ) from exc
            replacement = spares.pop(0)
            replacements.append({"failed": ref, "replacement": replacement, "reason": str(exc)})
            queue.insert(0, replacement)
            continue
        env_refs_used.append(ref)
        all_records.extend(records)

    return _write_dataset(config, env_refs_used, counts, all_records, replacements, out_dir)


def build_proportional_dataset(
    total: int,
    envs: Sequence[tuple[str, EnvironmentInterface]],
    dataset_seed: int,
    out_dir: str | Path,
    split: str = "val",
    name: str = "val",
) -> DatasetManifest:
    """A fixed-size set spread across all environments proportionally.

    Per-environment shares differ by at most one; the remainder goes to a
    seeded shuffle of the refs, and each share splits over difficulty levels
    lowest-first.
    """
    if total < 1:
        raise ValueError("total must be >= 1")
    if not envs:
        raise ValueError("environment pool is empty")
    by_ref = dict(envs)
    refs = sorted(by_ref)
    base, remainder = divmod(total, len(refs))
    rng = random.Random(stable_u64("val-remainder", dataset_seed))
    bonus = set(rng.sample(refs, remainder)) if remainder else set()
    all_records: list[DatasetRecord] = []
    env_refs_used = []
    per_env_counts: dict[str, int] = {}
    for ref in refs:
        share = base + (1 if ref in bonus else 0)
        if share == 0:
            continue
        counts = uniform_difficulty_split(share)
        all_records.extend(
            generate_env_records(by_ref[ref], ref, counts, dataset_seed, split)
        )
        env_refs_used.append(ref)
        per_env_counts[ref] = share
    manifest = _write_records(
        name=name,
        split=split,
        dataset_seed=dataset_seed,
        env_refs=env_refs_used,
        per_env_counts=per_env_counts,
        difficulty_split=None,
        records=all_records,
        replacements=[],
        out_dir=out_dir,
    )
    return manifest


def _write_dataset(
    config: DatasetConfig,
    env_refs: list[str],
    counts: dict[int, int],
    records: list[DatasetRecord],
    replacements: list[dict],
    out_dir: str | Path,
) -> DatasetManifest:
    expected = config.env_count * config.per_env
    if len(records) != expected:
        raise RuntimeError(f"expected {expected} records, generated {len(records)}")
    return _write_records(
        name=config.name,
        split=config.split,
        dataset_seed=config.dataset_seed,
        env_refs=env_refs,
        per_env_counts={ref: config.per_env for ref in env_refs},
        difficulty_split=counts,
        records=records,
        replacements=replacements,
        out_dir=out_dir,
    )


def _write_records(
    name: str,
    split: str,
    dataset_seed: int,
    env_refs: list[str],
    per_env_counts: dict[str, int],
    difficulty_split: dict[int, int] | None,
    records: list[DatasetRecord],
    replacements: list[dict],
    out_dir: str | Path,
) -> DatasetManifest:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = sorted(records, key=lambda r: r.record_id)
    ids = [r.record_id for r in records]
    if len(set(ids)) != len(ids):
        raise RuntimeError("record_id collision in dataset build")
    body = "".join(canonical_dumps(r.to_obj()) + "\n" for r in records)
    records_path = out_dir / "records.jsonl"
    _atomic_write(records_path, body)
    per_level: dict[int, int] = {level: 0 for level in DIFFICULTY_LEVELS}
    for record in records:
        per_level[record.difficulty] += 1
    manifest = DatasetManifest(
        name=name,
        split=split,
        dataset_seed=dataset_seed,
        env_refs=env_refs,
        per_env_counts=per_env_counts,
        difficulty_split=difficulty_split,
        record_count=len(records),
        per_level_counts=per_level,
        content_sha256=hashlib.sha256(body.encode("utf-8")).hexdigest(),
        records_file=records_path.name,
        replacements=replacements,
    )
    _atomic_write(out_dir / "manifest.json", canonical_dumps(manifest.to_obj()) + "\n")
    _atomic_write(out_dir / "summary.csv", summary_csv(records))
    return manifest


def rebuild_dataset(
    manifest: DatasetManifest,
    resolver: Callable[[str], EnvironmentInterface],
    out_dir: str | Path,
) -> DatasetManifest:
    """Regenerate the record file from the manifest alone."""
    records: list[DatasetRecord] = []
    for ref in manifest.env_refs:
        env = resolver(ref)
        share = manifest.per_env_counts[ref]
        counts = (
            dict(manifest.difficulty_split)
            if manifest.difficulty_split is not None
            else uniform_difficulty_split(share)
        )
        records.extend(
            generate_env_records(env, ref, counts, manifest.dataset_seed, manifest.split)
        )
    rebuilt = _write_records(
        name=manifest.name,
        split=manifest.split,
        dataset_seed=manifest.dataset_seed,
        env_refs=manifest.env_refs,
        per_env_counts=manifest.per_env_counts,
        difficulty_split=manifest.difficulty_split,
        records=records,
        replacements=manifest.replacements,
        out_dir=out_dir,
    )
    if rebuilt.content_sha256 != manifest.content_sha256:
        raise RuntimeError("rebuild produced different bytes than the manifest records")
    return rebuilt


def load_manifest(path: str | Path) -> DatasetManifest:
    return DatasetManifest.from_obj(canonical_loads(Path(path).read_text(encoding="utf-8")))


def load_records(dataset_dir: str | Path) -> list[DatasetRecord]:
    dataset_dir = Path(dataset_dir)
    manifest = load_manifest(dataset_dir / "manifest.json")
    lines = (dataset_dir / manifest.records_file).read_text(encoding="utf-8").splitlines()
    return [DatasetRecord.from_obj(canonical_loads(line)) for line in lines if line]


def summary_csv(records: Sequence[DatasetRecord]) -> str:
    """Per-environment difficulty counts."""
    counts: dict[str, dict[int, int]] = {}
    for record in records:
        counts.setdefault(record.env_id, {level: 0 for level in DIFFICULTY_LEVELS})
        counts[record.env_id][record.difficulty] += 1
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["env_id"] + [f"level_{level}" for level in DIFFICULTY_LEVELS] + ["total"])
    for env_id in sorted(counts):
        row = [counts[env_id][level] for level in DIFFICULTY_LEVELS]
        writer.writerow([env_id] + row + [sum(row)])
    return buffer.getvalue()


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)
