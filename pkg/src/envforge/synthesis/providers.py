"""LLM provider abstraction: swappable backends behind one completion call.

A provider is anything with `complete(prompt, params) -> str`. The engine
wraps calls with auditing (every call is logged with stage and keyword so a
run can be replayed against the mock provider) and optional retry/rate-limit
policies for long unattended batch runs.
"""

from __future__ import annotations

import json
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

from ..core.serialization import canonical_dumps


@dataclass(frozen=True)
class SamplingParams:
    temperature: float = 0.7
    max_tokens: int = 8192

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


class LlmProvider(Protocol):
    provider_id: str

    def complete(self, prompt: str, params: SamplingParams) -> str: ...


class ProviderError(RuntimeError):
    """The provider could not produce a completion."""


class ProviderTransportError(ProviderError):
    """Transient transport failure; safe to retry."""


class RetryingProvider:
    """One retry on transport errors with exponential backoff."""

    def __init__(
        self,
        inner: LlmProvider,
        retries: int = 1,
        backoff: float = 0.5,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.inner = inner
        self.provider_id = inner.provider_id
        self.retries = retries
        self.backoff = backoff
        self._sleep = sleep

    def complete(self, prompt: str, params: SamplingParams) -> str:
        attempt = 0
        while True:
            try:
                return self.inner.complete(prompt, params)
            except ProviderTransportError:
                if attempt >= self.retries:
                    raise
                self._sleep(self.backoff * (2**attempt))
                attempt += 1


class TokenBucket:
    """At most `rate` acquisitions per second, shared across workers."""

    def __init__(self, rate: float, capacity: float | None = None, clock=time.monotonic, sleep=time.sleep):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate
        self.capacity = capacity if capacity is not None else max(1.0, rate)
        self._tokens = self.capacity
        self._updated = clock()
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._updated) * self.rate)
                self._updated = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.rate
            self._sleep(wait)


class RateLimitedProvider:
    def __init__(self, inner: LlmProvider, bucket: TokenBucket):
        self.inner = inner
        self.provider_id = inner.provider_id
        self.bucket = bucket

    def complete(self, prompt: str, params: SamplingParams) -> str:
        self.bucket.acquire()
        return self.inner.complete(prompt, params)


class AuditLog:
    """Append-only JSONL record of every provider call."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def record(
        self,
        stage: str,
        keyword: str,
        provider_id: str,
        params: SamplingParams,
        prompt: str,
        response: str,
    ) -> None:
        entry = {
            "keyword": keyword,
            "max_tokens": params.max_tokens,
            "prompt": prompt,
            "provider_id": provider_id,
            "response": response,
            "stage": stage,
            "temperature": params.temperature,
        }
        line = canonical_dumps(entry) + "\n"
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(line)

    def entries(self) -> list[dict]:
        if not self.path.exists():
            return []
        return [json.loads(line) for line in self.path.read_text(encoding="utf-8").splitlines() if line]


def provider_call(
    provider: LlmProvider,
    prompt: str,
    params: SamplingParams,
    audit: AuditLog | None = None,
    stage: str = "",
    keyword: str = "",
) -> str:
    response = provider.complete(prompt, params)
    if audit is not None:
        audit.record(stage, keyword, provider.provider_id, params, prompt, response)
    return response


class HttpChatProvider:
    """Minimal client for an OpenAI-compatible chat-completions endpoint.

    Credentials come from the named environment variable, never from config
    files. Transport failures raise ProviderTransportError so the retry
    wrapper can take over.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = "ENVFORGE_API_KEY",
        timeout: float = 120.0,
        opener: Callable | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.provider_id = f"http:{model}"
        self._opener = opener or urllib.request.urlopen

    def build_request(self, prompt: str, params: SamplingParams) -> urllib.request.Request:
        import os

        body = json.dumps(
            {
                "model": self.model,
                "messages": [{"role": "user", "content": prompt}],
                "temperature": params.temperature,
                "max_tokens": params.max_tokens,
            }
        ).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        return urllib.request.Request(self.endpoint, data=body, headers=headers, method="POST")

    def complete(self, prompt: str, params: SamplingParams) -> str:
        request = self.build_request(prompt, params)
        try:
            with self._opener(request, timeout=self.timeout) as response:
                payload = json.loads(response.read().decode("utf-8"))
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            raise ProviderTransportError(f"transport failure: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ProviderError(f"endpoint returned non-JSON body: {exc}") from exc
        try:
            return payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected completion shape: {exc}") from exc
