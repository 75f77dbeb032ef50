"""Workspace layout and byte-stable persistence helpers.

One directory holds all pipeline state, trivially inspectable and portable:

    state/keywords.json        seeded keyword list
    state/synth/<slug>.json    per-keyword synthesis completion markers
    state/specs/<env_id>.json  environment specs (lifecycle + verdicts)
    state/bundles/<env_id>/    bundle source + manifest
    calibration/<env_id>.json  calibration reports (+ .csv curves)
    datasets/<name>/           records.jsonl + manifest.json + summary.csv
    analysis/                  entropy curve exports + descriptor cache
    provider_log.jsonl         append-only provider audit log
    report.json                machine-readable run report

Nothing persisted contains timestamps or absolute paths, so two identical
runs produce byte-identical workspaces wherever they live.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

from .core.serialization import canonical_dumps, canonical_loads


class Workspace:
    def __init__(self, root: str | Path):
        self.root = Path(root)

    # -- layout --------------------------------------------------------------
    @property
    def state_dir(self) -> Path:
        return self.root / "state"

    @property
    def keywords_path(self) -> Path:
        return self.state_dir / "keywords.json"

    def synth_marker(self, slug: str) -> Path:
        return self.state_dir / "synth" / f"{slug}.json"

    @property
    def calibration_dir(self) -> Path:
        return self.root / "calibration"

    def calibration_path(self, env_id: str) -> Path:
        return self.calibration_dir / f"{env_id}.json"

    def dataset_dir(self, name: str) -> Path:
        return self.root / "datasets" / name

    @property
    def analysis_dir(self) -> Path:
        return self.root / "analysis"

    @property
    def provider_log_path(self) -> Path:
        return self.root / "provider_log.jsonl"

    @property
    def report_path(self) -> Path:
        return self.root / "report.json"

    # -- io -------------------------------------------------------------------
    def write_json(self, path: Path, obj) -> None:
        self.write_text(path, canonical_dumps(obj) + "\n")

    def read_json(self, path: Path):
        return canonical_loads(path.read_text(encoding="utf-8"))

    def write_text(self, path: Path, text: str) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)


def hash_workspace(root: str | Path, exclude: tuple[str, ...] = ()) -> str:
    """Order-independent digest over relative paths and file bytes."""
    root = Path(root)
    digest = hashlib.sha256()
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        rel = path.relative_to(root).as_posix()
        if any(rel.startswith(prefix) for prefix in exclude):
            continue
        digest.update(rel.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(path.read_bytes())
        digest.update(b"\x01")
    return digest.hexdigest()
