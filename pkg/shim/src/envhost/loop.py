"""The request/response serve loop.

Strictly single-threaded: one frame in, one frame out, until shutdown or
EOF. Exceptions inside bundle callables become ok=false responses, never a
process exit. Bundle writes to stdout are counted against the output cap and
never touch the protocol channel (the caller hands this loop a private
stream and repoints the real descriptors).
"""

from __future__ import annotations

import io
import json
import random
from hashlib import blake2b
from typing import IO

from .binding import BundleBinding

PROTOCOL_VERSION = 1


class OutputLimitExceeded(RuntimeError):
    pass


class LimitedSink(io.TextIOBase):
    """Discards bundle prints but enforces the per-request output budget."""

    def __init__(self, max_bytes: int):
        self.max_bytes = max_bytes
        self.written = 0

    def write(self, text: str) -> int:
        self.written += len(text)
        if self.written > self.max_bytes:
            raise OutputLimitExceeded(f"bundle output exceeded {self.max_bytes} bytes")
        return len(text)

    def reset(self) -> None:
        self.written = 0


def instance_seed(env_id: str, difficulty: int, index: int, base_seed: int) -> int:
    """Derivation shared with the engine: blake2b over separator-joined parts."""
    h = blake2b(digest_size=8)
    for part in (env_id, difficulty, index, base_seed):
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


def hello_frame() -> dict:
    return {"op": "hello", "protocol_version": PROTOCOL_VERSION}


def warning_frame(message: str) -> dict:
    return {"op": "warning", "message": message}


def serve_loop(
    binding: BundleBinding,
    env_id: str,
    in_stream: IO[str],
    out_stream: IO[str],
    sink: LimitedSink | None = None,
) -> int:
    """Answer frames until shutdown (exit 0) or EOF; each frame exactly once."""
    for line in in_stream:
        line = line.strip()
        if not line:
            continue
        rid = None
        try:
            request = json.loads(line)
            rid = request.get("id")
            op = request.get("op")
        except (ValueError, AttributeError):
            _emit(out_stream, {"id": 0, "ok": False, "result": {},
                               "error_message": "runner_error: malformed request frame"})
            continue
        if op == "shutdown":
            _emit(out_stream, {"id": rid, "ok": True, "result": {}})
            return 0
        if sink is not None:
            sink.reset()
        try:
            result = _dispatch(binding, env_id, op, request.get("payload", {}))
            reply = {"id": rid, "ok": True, "result": result}
        except OutputLimitExceeded as exc:
            reply = {"id": rid, "ok": False, "result": {}, "error_message": f"resource_limit: {exc}"}
        except MemoryError:
            reply = {"id": rid, "ok": False, "result": {},
                     "error_message": "resource_limit: bundle exceeded the memory cap"}
        except Exception as exc:
            reply = {"id": rid, "ok": False, "result": {},
                     "error_message": f"runner_error: {type(exc).__name__}: {exc}"}
        _emit(out_stream, reply)
    return 0


def _dispatch(binding: BundleBinding, env_id: str, op: str, payload: dict) -> dict:
    if op == "generate":
        difficulty = payload["difficulty"]
        count = payload["count"]
        base_seed = payload["seed"]
        instances = []
        for index in range(count):
            seed = instance_seed(env_id, difficulty, index, base_seed)
            random.seed(seed)  # bundles use bare `random` per the template
            instances.append(
                {
                    "difficulty": difficulty,
                    "env_id": env_id,
                    "payload": binding.generate_fn(difficulty),
                    "seed": seed,
                }
            )
        return {"instances": instances}
    if op == "observe":
        question = binding.observe_fn(payload["instance"]["payload"])
        return {"question_text": question, "answer_format_hint": binding.answer_format_hint}
    if op == "verify":
        ok = binding.verify_fn(payload["response_text"], payload["instance"]["payload"])
        return {"reward": 1 if ok else 0}
    raise ValueError(f"unknown op {op!r}")


def _emit(out_stream: IO[str], obj: dict) -> None:
    out_stream.write(json.dumps(obj, sort_keys=True) + "\n")
    out_stream.flush()
