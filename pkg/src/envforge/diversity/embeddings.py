"""Embedding providers for descriptor analysis.

The analysis is encoder-independent, so the provider is an abstract
capability with two built-ins: a deterministic hashing embedder for offline
runs and tests, and a thin client for a remote embeddings endpoint.
"""

from __future__ import annotations

import json
import math
import re
import urllib.error
import urllib.request
from typing import Callable, Protocol, Sequence

import numpy as np

from ..core.serialization import stable_u64

REFERENCE_DIM = 768

_TOKEN = re.compile(r"[a-z0-9]+")


class EmbeddingProvider(Protocol):
    provider_id: str
    dim: int

    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


class EmbeddingError(RuntimeError):
    pass


class HashingEmbedder:
    """Deterministic bag-of-tokens embedding: hashed buckets with signs.

    Not a semantic encoder; it gives stable, well-spread vectors so the
    clustering and entropy machinery can be exercised offline.
    """

    def __init__(self, dim: int = REFERENCE_DIM):
        if dim < 2:
            raise ValueError("dim must be >= 2")
        self.dim = dim
        self.provider_id = f"hashing:{dim}"

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim))
        out = np.zeros((len(texts), self.dim))
        for row, text in enumerate(texts):
            tokens = _TOKEN.findall(text.lower())
            if not tokens:
                tokens = ["<empty>"]
            for token in tokens:
                h = stable_u64("embed", token)
                bucket = h % self.dim
                sign = 1.0 if (h >> 32) & 1 else -1.0
                out[row, bucket] += sign
            norm = math.sqrt(float(out[row] @ out[row]))
            if norm == 0.0:
                out[row, stable_u64("embed-fallback", text) % self.dim] = 1.0
                norm = 1.0
            out[row] /= norm
        return out


class RemoteEmbedder:
    """Client for an OpenAI-compatible embeddings endpoint."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = "ENVFORGE_API_KEY",
        dim: int = REFERENCE_DIM,
        timeout: float = 60.0,
        opener: Callable | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.dim = dim
        self.timeout = timeout
        self.provider_id = f"remote:{model}"
        self._opener = opener or urllib.request.urlopen

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        import os

        if not texts:
            return np.zeros((0, self.dim))
        body = json.dumps({"model": self.model, "input": list(texts)}).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        request = urllib.request.Request(self.endpoint, data=body, headers=headers, method="POST")
        try:
            with self._opener(request, timeout=self.timeout) as response:
                payload = json.loads(response.read().decode("utf-8"))
            vectors = [item["embedding"] for item in payload["data"]]
        except (urllib.error.URLError, OSError, KeyError, TypeError, ValueError) as exc:
            raise EmbeddingError(f"embedding request failed: {exc}") from exc
        matrix = np.asarray(vectors, dtype=float)
        if matrix.shape != (len(texts), matrix.shape[1]):
            raise EmbeddingError("endpoint returned a ragged embedding matrix")
        return matrix


def validate_embeddings(embeddings: np.ndarray) -> np.ndarray:
    matrix = np.asarray(embeddings, dtype=float)
    if matrix.ndim != 2:
        raise ValueError("embeddings must be a 2-D array (n, dim)")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("embeddings must be finite")
    return matrix
