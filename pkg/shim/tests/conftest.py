"""Test helpers: a minimal protocol supervisor (independent of any engine)."""

from __future__ import annotations

import json
import os
import select
import subprocess
import sys
import time
from pathlib import Path

FIXTURES = Path(__file__).parent / "fixtures"
SRC = Path(__file__).parent.parent / "src"


class MiniSupervisor:
    """Spawn `python -m envhost <bundle>` and exchange frames with deadlines."""

    def __init__(self, bundle: Path, env: dict[str, str] | None = None, env_id: str | None = None):
        child_env = {
            "PATH": os.environ.get("PATH", ""),
            "PYTHONPATH": str(SRC),
            "PYTHONIOENCODING": "utf-8",
        }
        if env:
            child_env.update(env)
        command = [sys.executable, "-m", "envhost", str(bundle)]
        if env_id:
            command += ["--env-id", env_id]
        self.proc = subprocess.Popen(
            command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            env=child_env,
        )
        os.set_blocking(self.proc.stdout.fileno(), False)
        self._buf = bytearray()
        self._next_id = 1

    def read_frame(self, timeout: float = 10.0, max_bytes: int = 8 * 1024 * 1024):
        """Returns a decoded frame, or the string "timeout"/"eof"/"overflow"."""
        deadline = time.monotonic() + timeout
        fd = self.proc.stdout.fileno()
        while True:
            newline = self._buf.find(b"\n")
            if newline >= 0:
                line = bytes(self._buf[:newline])
                del self._buf[: newline + 1]
                return json.loads(line.decode("utf-8"))
            if len(self._buf) > max_bytes:
                return "overflow"
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return "timeout"
            ready, _, _ = select.select([fd], [], [], min(remaining, 0.2))
            if not ready:
                continue
            chunk = os.read(fd, 65536)
            if not chunk:
                return "eof"
            self._buf.extend(chunk)

    def handshake(self, timeout: float = 10.0) -> list[dict]:
        """Read frames until hello; returns any preceding warning frames."""
        warnings = []
        while True:
            frame = self.read_frame(timeout)
            assert isinstance(frame, dict), f"handshake failed: {frame}"
            if frame.get("op") == "warning":
                warnings.append(frame)
                continue
            assert frame == {"op": "hello", "protocol_version": 1}, frame
            return warnings

    def call(self, op: str, payload: dict, timeout: float = 10.0):
        rid = self._next_id
        self._next_id += 1
        frame = json.dumps({"id": rid, "op": op, "payload": payload}) + "\n"
        self.proc.stdin.write(frame.encode("utf-8"))
        self.proc.stdin.flush()
        reply = self.read_frame(timeout)
        if isinstance(reply, dict):
            assert reply.get("id") == rid, f"id mismatch: {reply}"
        return reply

    def kill(self) -> None:
        if self.proc.poll() is None:
            self.proc.kill()
        self.proc.wait(timeout=5)

    def close(self) -> int:
        if self.proc.poll() is None:
            try:
                reply = self.call("shutdown", {}, timeout=5.0)
                if isinstance(reply, dict) and reply.get("ok"):
                    return self.proc.wait(timeout=5)
            except (BrokenPipeError, OSError):
                pass
        self.kill()
        return self.proc.returncode


def reference_min_cost(grid: list[list[int]]) -> int:
    """Independent DP oracle for the grid bundle's expected answers."""
    n = len(grid)
    dp = [[0] * n for _ in range(n)]
    dp[0][0] = grid[0][0]
    for i in range(n):
        for j in range(n):
            if i == 0 and j == 0:
                continue
            options = []
            if i > 0:
                options.append(dp[i - 1][j])
            if j > 0:
                options.append(dp[i][j - 1])
            dp[i][j] = min(options) + grid[i][j]
    return dp[n - 1][n - 1]
