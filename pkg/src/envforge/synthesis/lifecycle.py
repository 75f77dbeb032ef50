"""Environment lifecycle state machine and persistence.

Statuses move along the DAG

    draft -> accepted | judged_fail
    judged_fail -> revised
    revised -> accepted | rejected

with no other edges. Every spec persists as one canonical-JSON document under
state/specs/<env_id>.json; bundle source lives next door under
state/bundles/<env_id>/. The store enables idempotent resume: a rerun skips
anything already terminal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

from ..core.serialization import canonical_dumps, canonical_loads
from .bundles import BundleRef
from .judging import JudgeVerdict


class Status(str, enum.Enum):
    DRAFT = "draft"
    JUDGED_FAIL = "judged_fail"
    REVISED = "revised"
    ACCEPTED = "accepted"
    REJECTED = "rejected"


ALLOWED_TRANSITIONS: frozenset[tuple[Status, Status]] = frozenset(
    {
        (Status.DRAFT, Status.ACCEPTED),
        (Status.DRAFT, Status.JUDGED_FAIL),
        (Status.JUDGED_FAIL, Status.REVISED),
        (Status.REVISED, Status.ACCEPTED),
        (Status.REVISED, Status.REJECTED),
    }
)

MAX_REVISIONS = 1  # discard after a failed revision


class LifecycleError(RuntimeError):
    pass


@dataclass
class EnvironmentSpec:
    env_id: str
    keyword: str
    title: str
    source: str
    bundle: BundleRef
    status: Status = Status.DRAFT
    judge_records: list[JudgeVerdict] = field(default_factory=list)
    revision_count: int = 0

    def transition(self, new_status: Status) -> None:
        if (self.status, new_status) not in ALLOWED_TRANSITIONS:
            raise LifecycleError(f"illegal transition {self.status.value} -> {new_status.value}")
        if new_status is Status.ACCEPTED:
            self._check_accept_invariant()
        self.status = new_status

    def _check_accept_invariant(self) -> None:
        # accepted => the last verdict of each stage passed
        last = {}
        for record in self.judge_records:
            last[record.stage] = record
        if len(last) < 2 or not all(v.passed for v in last.values()):
            raise LifecycleError("accepted requires passing final verdicts from both stages")

    def all_issues(self) -> tuple[str, ...]:
        issues: list[str] = []
        for record in self.judge_records:
            issues.extend(record.issues)
        return tuple(issues)

    def to_obj(self) -> dict:
        return {
            "bundle": {
                "bundle_dir": self.bundle.bundle_dir,
                "env_id": self.bundle.env_id,
                "source_hash": self.bundle.source_hash,
            },
            "env_id": self.env_id,
            "judge_records": [record.to_obj() for record in self.judge_records],
            "keyword": self.keyword,
            "revision_count": self.revision_count,
            "status": self.status.value,
            "title": self.title,
        }

    @classmethod
    def from_obj(cls, obj: dict, source: str) -> "EnvironmentSpec":
        return cls(
            env_id=obj["env_id"],
            keyword=obj["keyword"],
            title=obj["title"],
            source=source,
            bundle=BundleRef(
                env_id=obj["bundle"]["env_id"],
                bundle_dir=obj["bundle"]["bundle_dir"],
                source_hash=obj["bundle"]["source_hash"],
            ),
            status=Status(obj["status"]),
            judge_records=[JudgeVerdict.from_obj(r) for r in obj["judge_records"]],
            revision_count=obj["revision_count"],
        )


class SpecStore:
    """One JSON document per spec under the workspace."""

    def __init__(self, workspace_root: str | Path):
        self.root = Path(workspace_root)
        self.specs_dir = self.root / "state" / "specs"

    def save(self, spec: EnvironmentSpec) -> None:
        self.specs_dir.mkdir(parents=True, exist_ok=True)
        path = self.specs_dir / f"{spec.env_id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(canonical_dumps(spec.to_obj()) + "\n", encoding="utf-8")
        tmp.replace(path)

    def load(self, env_id: str) -> EnvironmentSpec:
        obj = canonical_loads((self.specs_dir / f"{env_id}.json").read_text(encoding="utf-8"))
        source = (self.root / obj["bundle"]["bundle_dir"] / "bundle.py").read_text(encoding="utf-8")
        return EnvironmentSpec.from_obj(obj, source)

    def load_all(self) -> list[EnvironmentSpec]:
        if not self.specs_dir.exists():
            return []
        return [self.load(path.stem) for path in sorted(self.specs_dir.glob("*.json"))]

    def exists(self, env_id: str) -> bool:
        return (self.specs_dir / f"{env_id}.json").exists()

    def manifest_ref(self, spec: EnvironmentSpec) -> str:
        """Workspace-relative verifier ref for this spec's bundle."""
        return spec.bundle.bundle_dir
