"""Bundle parsing and persistence.

A bundle is the executable artifact of one synthesized environment: source
text plus a manifest naming the entry command. Generations must define the
pinned code-structure template — generate_instance(difficulty),
render_question(instance), verify(response_text, instance) — checked
syntactically here (never by importing untrusted code into the engine).
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from pathlib import Path

from ..core.serialization import canonical_dumps, stable_digest

REQUIRED_FUNCTIONS = ("generate_instance", "render_question", "verify")
_TITLE_LINE = re.compile(r"^#\s*title:\s*(.+)$", re.MULTILINE)

BUNDLE_FILENAME = "bundle.py"
MANIFEST_FILENAME = "manifest.json"


@dataclass(frozen=True)
class BundleParse:
    ok: bool
    missing: tuple[str, ...]
    title: str | None
    error: str | None = None


def parse_bundle_source(source: str) -> BundleParse:
    """Syntactic template-conformance check; no execution."""
    try:
        tree = ast.parse(source)
    except SyntaxError as exc:
        return BundleParse(ok=False, missing=REQUIRED_FUNCTIONS, title=None, error=f"syntax error: {exc}")
    defined = {
        node.name for node in tree.body if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef))
    }
    missing = tuple(name for name in REQUIRED_FUNCTIONS if name not in defined)
    match = _TITLE_LINE.search(source)
    title = match.group(1).strip() if match else None
    return BundleParse(ok=not missing, missing=missing, title=title)


def bundle_env_id(keyword_slug: str, attempt: int, source: str) -> str:
    """Content-derived identifier: stable across reruns of the same pipeline."""
    return f"{keyword_slug}-{stable_digest('env', keyword_slug, attempt, source, size=5)}"


@dataclass(frozen=True)
class BundleRef:
    """Workspace-relative locations of a persisted bundle."""

    env_id: str
    bundle_dir: str  # relative to the workspace root
    source_hash: str

    @property
    def manifest_path(self) -> str:
        return f"{self.bundle_dir}/{MANIFEST_FILENAME}"


def write_bundle(
    workspace_root: Path,
    env_id: str,
    source: str,
    runner_command: list[str],
    declared_difficulties: list[int] = [1, 2, 3, 4, 5],
) -> BundleRef:
    """Persist source + manifest under state/bundles/<env_id>/.

    The manifest's entry command comes from the runner template, with
    "{bundle}" replaced by the bundle filename; it runs with the bundle
    directory as its working directory, keeping manifests relocatable.
    """
    bundle_dir = workspace_root / "state" / "bundles" / env_id
    bundle_dir.mkdir(parents=True, exist_ok=True)
    entry_command = [part.replace("{bundle}", BUNDLE_FILENAME) for part in runner_command]
    manifest = {
        "declared_difficulties": declared_difficulties,
        "entry_command": entry_command,
        "env_id": env_id,
    }
    _atomic_write(bundle_dir / BUNDLE_FILENAME, source)
    _atomic_write(bundle_dir / MANIFEST_FILENAME, canonical_dumps(manifest) + "\n")
    return BundleRef(
        env_id=env_id,
        bundle_dir=str(Path("state") / "bundles" / env_id),
        source_hash=stable_digest("source", source),
    )


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)
