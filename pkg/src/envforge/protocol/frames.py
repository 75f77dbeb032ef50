"""Newline-delimited JSON frames exchanged with environment runners.

One frame per line, UTF-8. The runner announces itself with a hello frame
before serving; requests and responses are matched pairwise by id. This
transport is deliberately trivial so a bundle in any language can implement
it without linking against the engine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PROTOCOL_VERSION = 1
OPS = ("generate", "observe", "verify", "shutdown")

HELLO_FRAME = {"op": "hello", "protocol_version": PROTOCOL_VERSION}


class FrameError(ValueError):
    """A line that is not a well-formed protocol frame."""


@dataclass(frozen=True)
class ProtocolRequest:
    id: int
    op: str
    payload: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.op not in OPS:
            raise FrameError(f"unknown op {self.op!r}")
        if not isinstance(self.id, int) or isinstance(self.id, bool) or self.id < 0:
            raise FrameError(f"request id must be a non-negative integer, got {self.id!r}")


@dataclass(frozen=True)
class ProtocolResponse:
    id: int
    ok: bool
    result: dict[str, Any] = field(default_factory=dict)
    error_message: str | None = None

    def __post_init__(self) -> None:
        if not self.ok and not self.error_message:
            raise FrameError("ok=false responses must carry an error_message")


def encode_request(req: ProtocolRequest) -> str:
    return json.dumps({"id": req.id, "op": req.op, "payload": req.payload}, sort_keys=True)


def decode_request(line: str) -> ProtocolRequest:
    obj = _load_frame(line)
    try:
        return ProtocolRequest(id=obj["id"], op=obj["op"], payload=obj.get("payload", {}))
    except KeyError as exc:
        raise FrameError(f"request frame missing field {exc}") from exc


def encode_response(resp: ProtocolResponse) -> str:
    obj: dict[str, Any] = {"id": resp.id, "ok": resp.ok, "result": resp.result}
    if resp.error_message is not None:
        obj["error_message"] = resp.error_message
    return json.dumps(obj, sort_keys=True)


def decode_response(line: str) -> ProtocolResponse:
    obj = _load_frame(line)
    try:
        return ProtocolResponse(
            id=obj["id"],
            ok=obj["ok"],
            result=obj.get("result", {}),
            error_message=obj.get("error_message"),
        )
    except KeyError as exc:
        raise FrameError(f"response frame missing field {exc}") from exc


def decode_hello(line: str) -> dict[str, Any]:
    obj = _load_frame(line)
    if obj.get("op") != "hello":
        raise FrameError(f"expected hello frame, got op {obj.get('op')!r}")
    return obj


def _load_frame(line: str) -> dict[str, Any]:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FrameError(f"frame is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise FrameError("frame must be a JSON object")
    return obj
