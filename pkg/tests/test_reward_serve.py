from __future__ import annotations

import io
import json
from dataclasses import dataclass

from envforge.core import InstanceParams
from envforge.core.native import GridPathEnv
from envforge.rewards import serve_frames

from conftest import REFERENCE_GRID, REFERENCE_GRID_COST


@dataclass
class FakeRecord:
    instance: InstanceParams
    verifier_ref: str


def make_records():
    instance = InstanceParams(
        env_id="grid_path_cost", difficulty=2, seed=0, payload={"grid": REFERENCE_GRID, "size": 4}
    )
    return {"rec-1": FakeRecord(instance=instance, verifier_ref="native:grid_path_cost")}


def run_serve(lines: list[str]) -> list[dict]:
    env = GridPathEnv()
    out = io.StringIO()
    served = serve_frames(make_records(), lambda ref: env, io.StringIO("\n".join(lines) + "\n"), out)
    replies = [json.loads(line) for line in out.getvalue().splitlines()]
    assert served == len(replies)
    return replies


def test_scores_oracle_answer() -> None:
    frame = json.dumps(
        {"record_id": "rec-1", "response_text": f"<think>x</think><answer>{REFERENCE_GRID_COST}</answer>"}
    )
    [reply] = run_serve([frame])
    assert reply == {"record_id": "rec-1", "format_score": 1, "answer_score": 1, "total": 1}


def test_malformed_frame_gets_structured_error_and_service_stays_up() -> None:
    frames = [
        "this is not json",
        json.dumps({"record_id": "rec-1"}),
        json.dumps({"record_id": "missing", "response_text": "x"}),
        json.dumps({"record_id": "rec-1", "response_text": "<think>a</think><answer>0</answer>"}),
    ]
    replies = run_serve(frames)
    assert "error" in replies[0]
    assert "error" in replies[1]
    assert replies[2]["error"] == "unknown record_id"
    assert replies[3]["total"] == 0  # service survived the malformed frames
