"""The canned grid-path bundle returned by the deterministic mock provider.

The source follows the pinned code-structure template (generate_instance /
render_question / verify) and is additionally self-executing: run as a
script it serves the wire protocol with stdlib-only code, so fixture
pipelines work without any runtime shim installed.
"""

FIXTURE_BUNDLE_SOURCE = '''\
# title: Grid Path Cost Optimization
"""Reasoning environment: minimum-cost monotone paths through a digit grid."""
import json
import random
import re
import sys
from hashlib import blake2b
from pathlib import Path


def generate_instance(difficulty):
    size = difficulty + 2
    grid = [[random.randint(1, 9) for _ in range(size)] for _ in range(size)]
    return {"grid": grid, "size": size}


def render_question(instance):
    rows = "\\n".join(" ".join(str(v) for v in row) for row in instance["grid"])
    return (
        "Find minimum cost path from top-left to bottom-right "
        "(only right/down moves):\\n\\n"
        + rows
        + "\\n\\nAnswer: <answer>NUMBER</answer>"
    )


def solve_grid(grid):
    n = len(grid)
    dp = [[0] * n for _ in range(n)]
    dp[0][0] = grid[0][0]
    for i in range(n):
        for j in range(n):
            if i == 0 and j == 0:
                continue
            best = None
            if i > 0:
                best = dp[i - 1][j]
            if j > 0:
                best = dp[i][j - 1] if best is None else min(best, dp[i][j - 1])
            dp[i][j] = best + grid[i][j]
    return dp[n - 1][n - 1]


def verify(response_text, instance):
    match = re.search(r"<answer>\\s*(\\d+)\\s*</answer>", response_text)
    if not match:
        return False
    return int(match.group(1)) == solve_grid(instance["grid"])


def _instance_seed(env_id, difficulty, index, base_seed):
    h = blake2b(digest_size=8)
    for part in (env_id, difficulty, index, base_seed):
        h.update(str(part).encode("utf-8"))
        h.update(b"\\x1f")
    return int.from_bytes(h.digest(), "big")


def _serve(env_id):
    out = sys.stdout
    out.write(json.dumps({"op": "hello", "protocol_version": 1}) + "\\n")
    out.flush()
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        rid = None
        try:
            req = json.loads(line)
            rid = req.get("id")
            op = req.get("op")
            payload = req.get("payload", {})
            if op == "generate":
                instances = []
                for index in range(payload["count"]):
                    seed = _instance_seed(env_id, payload["difficulty"], index, payload["seed"])
                    random.seed(seed)
                    instances.append({
                        "difficulty": payload["difficulty"],
                        "env_id": env_id,
                        "payload": generate_instance(payload["difficulty"]),
                        "seed": seed,
                    })
                reply = {"id": rid, "ok": True, "result": {"instances": instances}}
            elif op == "observe":
                question = render_question(payload["instance"]["payload"])
                reply = {"id": rid, "ok": True, "result": {
                    "question_text": question,
                    "answer_format_hint": "<answer>NUMBER</answer>",
                }}
            elif op == "verify":
                ok = verify(payload["response_text"], payload["instance"]["payload"])
                reply = {"id": rid, "ok": True, "result": {"reward": 1 if ok else 0}}
            elif op == "shutdown":
                out.write(json.dumps({"id": rid, "ok": True, "result": {}}) + "\\n")
                out.flush()
                return 0
            else:
                reply = {"id": rid, "ok": False, "result": {},
                         "error_message": "runner_error: unknown op %r" % (op,)}
        except Exception as exc:
            reply = {"id": rid, "ok": False, "result": {},
                     "error_message": "runner_error: %s" % (exc,)}
        out.write(json.dumps(reply) + "\\n")
        out.flush()
    return 0


if __name__ == "__main__":
    manifest_path = Path(__file__).with_name("manifest.json")
    bundle_env_id = "grid_path_cost"
    if manifest_path.exists():
        bundle_env_id = json.loads(manifest_path.read_text())["env_id"]
    sys.exit(_serve(bundle_env_id))
'''
