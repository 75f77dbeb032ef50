"""Canonical JSON serialization and stable hashing.

Every persisted artifact (instances, specs, dataset records, reports) goes
through `canonical_dumps` so serializations are byte-comparable: UTF-8,
alphabetically sorted keys, compact separators, no trailing whitespace.
"""

from __future__ import annotations

import json
from hashlib import blake2b
from typing import Any

_PAYLOAD_TYPES = (str, bool, int, float)


def canonical_dumps(obj: Any) -> str:
    """Serialize to the canonical byte-stable JSON form."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def canonical_loads(text: str) -> Any:
    return json.loads(text)


def stable_digest(*parts: Any, size: int = 16) -> str:
    """Hex digest over the parts, independent of process hash seeds."""
    h = blake2b(digest_size=size)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")  # separator so ("ab","c") != ("a","bc")
    return h.hexdigest()


def stable_u64(*parts: Any) -> int:
    """64-bit unsigned hash used for seed derivation."""
    h = blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


def derive_instance_seed(env_id: str, difficulty: int, index: int, base_seed: int) -> int:
    """Per-instance seed: stable regeneration without storing instances."""
    return stable_u64(env_id, difficulty, index, base_seed)


def validate_payload(value: Any, path: str = "payload") -> None:
    """Reject anything outside the structured-document tree model.

    Allowed: strings, booleans, ints, floats, lists, and string-keyed maps.
    """
    if isinstance(value, dict):
        for key, item in value.items():
            if not isinstance(key, str):
                raise ValueError(f"{path}: map keys must be strings, got {type(key).__name__}")
            validate_payload(item, f"{path}.{key}")
        return
    if isinstance(value, list):
        for i, item in enumerate(value):
            validate_payload(item, f"{path}[{i}]")
        return
    if isinstance(value, bool) or isinstance(value, _PAYLOAD_TYPES):
        return
    raise ValueError(f"{path}: unsupported payload type {type(value).__name__}")
