"""Runner process supervision: spawn, handshake, bounded request/response.

The supervisor never crashes on runner misbehavior. Spawn and handshake
failures raise (the caller decides retry/discard); once a session is live,
`call` always returns a ProtocolResponse — timeouts, floods, broken pipes,
and malformed frames become synthetic ok=false responses with a
machine-readable error prefix, and the runner is killed.
"""

from __future__ import annotations

import os
import select
import subprocess
import time
from pathlib import Path
from typing import Any

import json

from .frames import (
    FrameError,
    PROTOCOL_VERSION,
    ProtocolRequest,
    ProtocolResponse,
    encode_request,
    decode_response,
)
from .policy import SandboxPolicy

# Synthetic error_message prefixes; the verdict mapper keys off these.
PREFIX_TIMEOUT = "timeout"
PREFIX_RESOURCE = "resource_limit"
PREFIX_RUNNER = "runner_error"

_MAX_PREAMBLE_WARNINGS = 8
_PASSTHROUGH_ENV = ("PATH", "HOME", "LANG", "LC_ALL", "PYTHONPATH", "TMPDIR")


class RunnerSpawnError(RuntimeError):
    """The runner process could not be started or died before the handshake."""


class HandshakeError(RuntimeError):
    """No well-formed hello frame arrived within the timeout."""


class ProtocolVersionError(RuntimeError):
    """The runner speaks a different protocol version."""


class _BoundedLineReader:
    """Reads newline-terminated frames from a pipe with deadline and size cap."""

    def __init__(self, fd: int):
        self._fd = fd
        self._buf = bytearray()
        os.set_blocking(fd, False)

    def read_line(self, deadline: float, max_bytes: int) -> tuple[bytes | None, str]:
        """Returns (line, "ok") or (None, "timeout" | "overflow" | "eof")."""
        while True:
            newline = self._buf.find(b"\n")
            if newline >= 0:
                line = bytes(self._buf[:newline])
                del self._buf[: newline + 1]
                if len(line) > max_bytes:
                    return None, "overflow"
                return line, "ok"
            if len(self._buf) > max_bytes:
                return None, "overflow"
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return None, "timeout"
            ready, _, _ = select.select([self._fd], [], [], min(remaining, 0.25))
            if not ready:
                continue
            try:
                chunk = os.read(self._fd, 65536)
            except BlockingIOError:
                continue
            if not chunk:
                return None, "eof"
            self._buf.extend(chunk)


class RunnerSession:
    """One supervised runner process with strict request/response alternation.

    Not thread-safe; concurrency comes from pooling sessions, never from
    sharing one.
    """

    def __init__(self, proc: subprocess.Popen, policy: SandboxPolicy, entry_command: list[str]):
        self._proc = proc
        self.policy = policy
        self.entry_command = entry_command
        self._reader = _BoundedLineReader(proc.stdout.fileno())
        self._next_id = 1
        self.request_count = 0
        self._dead = False

    @property
    def alive(self) -> bool:
        return not self._dead and self._proc.poll() is None

    def call(self, op: str, payload: dict[str, Any], timeout: float | None = None) -> ProtocolResponse:
        request = ProtocolRequest(id=self._next_id, op=op, payload=payload)
        self._next_id += 1
        self.request_count += 1
        budget = timeout if timeout is not None else self.policy.timeout_for(op)
        if not self.alive:
            return self._synthetic(request.id, PREFIX_RUNNER, "runner is not alive")
        try:
            self._proc.stdin.write(encode_request(request).encode("utf-8") + b"\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError):
            self.kill()
            return self._synthetic(request.id, PREFIX_RUNNER, "broken pipe writing request")

        deadline = time.monotonic() + budget
        line, status = self._reader.read_line(deadline, self.policy.max_output)
        if status == "timeout":
            self.kill()
            return self._synthetic(request.id, PREFIX_TIMEOUT, f"no response within {budget}s")
        if status == "overflow":
            self.kill()
            return self._synthetic(
                request.id, PREFIX_RESOURCE, f"output exceeded {self.policy.max_output} bytes"
            )
        if status == "eof":
            self.kill()
            return self._synthetic(request.id, PREFIX_RUNNER, "runner exited mid-request")
        try:
            response = decode_response(line.decode("utf-8", errors="replace"))
        except FrameError as exc:
            self.kill()
            return self._synthetic(request.id, PREFIX_RUNNER, f"malformed response frame: {exc}")
        if response.id != request.id:
            self.kill()
            return self._synthetic(
                request.id, PREFIX_RUNNER, f"response id {response.id} does not match {request.id}"
            )
        return response

    def kill(self) -> None:
        self._dead = True
        if self._proc.poll() is None:
            self._proc.kill()
        try:
            self._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:  # pragma: no cover - kernel-level stall
            pass
        self._close_pipes()

    def close(self) -> None:
        """Polite shutdown; falls back to kill."""
        if self.alive:
            response = self.call("shutdown", {}, timeout=self.policy.timeout_for("shutdown"))
            if response.ok:
                try:
                    self._proc.wait(timeout=2)
                except subprocess.TimeoutExpired:
                    pass
        self.kill()

    def _synthetic(self, request_id: int, prefix: str, detail: str) -> ProtocolResponse:
        return ProtocolResponse(id=request_id, ok=False, error_message=f"{prefix}: {detail}")

    def _close_pipes(self) -> None:
        for stream in (self._proc.stdin, self._proc.stdout):
            if stream is not None:
                try:
                    stream.close()
                except OSError:
                    pass


def spawn_runner(
    entry_command: list[str],
    policy: SandboxPolicy,
    cwd: str | Path | None = None,
) -> RunnerSession:
    """Start a runner and complete the hello handshake.

    Raises RunnerSpawnError, HandshakeError, or ProtocolVersionError; these
    are the only paths that raise, so callers can retry or discard bundles.
    """
    env = {key: os.environ[key] for key in _PASSTHROUGH_ENV if key in os.environ}
    env["PYTHONIOENCODING"] = "utf-8"
    env.update(policy.child_env())
    try:
        proc = subprocess.Popen(
            entry_command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            cwd=None if cwd is None else str(cwd),
            env=env,
        )
    except OSError as exc:
        raise RunnerSpawnError(f"failed to spawn {entry_command!r}: {exc}") from exc

    session = RunnerSession(proc, policy, entry_command)
    deadline = time.monotonic() + policy.wall_clock_timeout
    warnings_seen = 0
    while True:
        line, status = session._reader.read_line(deadline, policy.max_output)
        if status == "eof":
            code = proc.poll()
            session.kill()
            raise RunnerSpawnError(f"runner exited before handshake (exit code {code})")
        if status == "timeout":
            session.kill()
            raise HandshakeError(f"no handshake within {policy.wall_clock_timeout}s")
        if status == "overflow":
            session.kill()
            raise HandshakeError("runner flooded the channel before the handshake")
        try:
            frame = json.loads(line.decode("utf-8", errors="replace"))
            if not isinstance(frame, dict):
                raise FrameError("handshake frame must be a JSON object")
        except (FrameError, ValueError) as exc:
            session.kill()
            raise HandshakeError(f"invalid handshake frame: {exc}") from exc
        # Runners may emit bounded warning frames (e.g. unsupported rlimits)
        # before hello; skip them.
        if frame.get("op") == "warning":
            warnings_seen += 1
            if warnings_seen > _MAX_PREAMBLE_WARNINGS:
                session.kill()
                raise HandshakeError("too many preamble warning frames")
            continue
        if frame.get("op") != "hello":
            session.kill()
            raise HandshakeError(f"expected hello frame, got op {frame.get('op')!r}")
        if "protocol_version" not in frame:
            session.kill()
            raise HandshakeError("hello frame missing protocol_version")
        if frame["protocol_version"] != PROTOCOL_VERSION:
            session.kill()
            raise ProtocolVersionError(
                f"runner speaks protocol {frame['protocol_version']!r}, engine speaks {PROTOCOL_VERSION}"
            )
        return session
