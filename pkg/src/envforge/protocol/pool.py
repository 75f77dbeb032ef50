"""Session pooling: amortize runner startup over many requests.

One session is single-threaded; the pool hands out exclusive sessions to
concurrent callers and recycles them after a configurable request count or
when they die.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator

from .policy import SandboxPolicy
from .session import RunnerSession, spawn_runner


class SessionPool:
    def __init__(
        self,
        entry_command: list[str],
        policy: SandboxPolicy,
        cwd: str | Path | None = None,
        size: int = 1,
        max_requests_per_session: int = 1000,
    ):
        if size < 1:
            raise ValueError("pool size must be >= 1")
        self.entry_command = list(entry_command)
        self.policy = policy
        self.cwd = cwd
        self.size = size
        self.max_requests = max_requests_per_session
        self._idle: list[RunnerSession] = []
        self._leased = 0
        self._lock = threading.Lock()
        self._available = threading.Condition(self._lock)
        self._closed = False

    @contextmanager
    def session(self) -> Iterator[RunnerSession]:
        session = self._acquire()
        try:
            yield session
        finally:
            self._release(session)

    def close(self) -> None:
        with self._lock:
            self._closed = True
            idle, self._idle = self._idle, []
        for session in idle:
            session.close()

    def _acquire(self) -> RunnerSession:
        with self._available:
            if self._closed:
                raise RuntimeError("pool is closed")
            while True:
                while self._idle:
                    session = self._idle.pop()
                    if session.alive and session.request_count < self.max_requests:
                        self._leased += 1
                        return session
                    session.kill()
                if self._leased < self.size:
                    self._leased += 1
                    break
                self._available.wait()
        try:
            return spawn_runner(self.entry_command, self.policy, cwd=self.cwd)
        except Exception:
            with self._available:
                self._leased -= 1
                self._available.notify()
            raise

    def _release(self, session: RunnerSession) -> None:
        with self._available:
            self._leased -= 1
            recycle = session.alive and session.request_count < self.max_requests and not self._closed
            if recycle:
                self._idle.append(session)
            self._available.notify()
        if not recycle:
            session.kill()
