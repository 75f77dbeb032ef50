"""Reward serve mode: newline-delimited JSON scoring over standard streams.

Trainers poll rewards at high volume; each frame is scored statelessly and
malformed input gets a structured error reply, never a crash. The loop ends
on EOF.
"""

from __future__ import annotations

import json
from typing import Callable, IO, Mapping

from ..core.types import EnvironmentInterface, Response
from .scoring import score


def serve_frames(
    records: Mapping[str, object],
    resolver: Callable[[str], EnvironmentInterface],
    in_stream: IO[str],
    out_stream: IO[str],
) -> int:
    """Answer scoring frames until EOF; returns the number served."""
    served = 0
    for line in in_stream:
        line = line.strip()
        if not line:
            continue
        reply = _handle(line, records, resolver)
        out_stream.write(json.dumps(reply, sort_keys=True) + "\n")
        out_stream.flush()
        served += 1
    return served


def _handle(
    line: str,
    records: Mapping[str, object],
    resolver: Callable[[str], EnvironmentInterface],
) -> dict:
    try:
        frame = json.loads(line)
    except json.JSONDecodeError:
        return {"error": "malformed frame: not valid JSON"}
    if not isinstance(frame, dict) or "record_id" not in frame or "response_text" not in frame:
        return {"error": "malformed frame: expected {record_id, response_text}"}
    record_id = frame["record_id"]
    record = records.get(record_id)
    if record is None:
        return {"error": "unknown record_id", "record_id": record_id}
    breakdown = score(record, Response(str(frame["response_text"])), resolver)
    return {
        "record_id": record_id,
        "format_score": breakdown.format_score,
        "answer_score": breakdown.answer_score,
        "total": breakdown.total,
    }
