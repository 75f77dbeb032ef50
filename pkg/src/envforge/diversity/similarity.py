"""Cross-dataset caption similarity: streaming mean and top-percentile.

All cross pairs between the two caption sets are scored by cosine
similarity in row blocks, so the full pair matrix never materializes; the
top percentile comes from a bounded min-heap of the largest similarities.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingError, EmbeddingProvider, validate_embeddings


@dataclass(frozen=True)
class SimilaritySummary:
    mean_similarity: float
    top_percentile_similarity: float  # the k-th largest, k = ceil(fraction * pairs)
    top_fraction: float
    pair_count: int
    top_count: int
    covered_a: int = -1  # captions successfully embedded (-1: not tracked)
    covered_b: int = -1
    embedding_errors: tuple[str, ...] = ()


def cross_dataset_similarity(
    captions_a: Sequence[str],
    captions_b: Sequence[str],
    embedder: EmbeddingProvider,
    top_fraction: float = 0.01,
    block_rows: int = 256,
    embed_batch: int = 64,
) -> SimilaritySummary:
    """Cosine similarity over all cross pairs of the two caption sets.

    Captions embed in batches; a failing batch is dropped and reported, so an
    embedding outage yields partial coverage rather than nothing. Zero
    coverage on either side is an error.
    """
    if not captions_a or not captions_b:
        raise ValueError("both caption lists must be non-empty")
    if not 0 < top_fraction <= 1:
        raise ValueError("top_fraction must be in (0, 1]")
    errors: list[str] = []
    emb_a = _embed_batches(captions_a, embedder, embed_batch, "a", errors)
    emb_b = _embed_batches(captions_b, embedder, embed_batch, "b", errors)
    if emb_a is None or emb_b is None:
        raise EmbeddingError(f"no captions could be embedded: {errors}")
    summary = similarity_from_embeddings(emb_a, emb_b, top_fraction, block_rows)
    return SimilaritySummary(
        mean_similarity=summary.mean_similarity,
        top_percentile_similarity=summary.top_percentile_similarity,
        top_fraction=summary.top_fraction,
        pair_count=summary.pair_count,
        top_count=summary.top_count,
        covered_a=emb_a.shape[0],
        covered_b=emb_b.shape[0],
        embedding_errors=tuple(errors),
    )


def _embed_batches(
    captions: Sequence[str],
    embedder: EmbeddingProvider,
    batch: int,
    side: str,
    errors: list[str],
):
    chunks = []
    for start in range(0, len(captions), batch):
        piece = list(captions[start : start + batch])
        try:
            chunks.append(validate_embeddings(embedder.embed(piece)))
        except (EmbeddingError, ValueError) as exc:
            errors.append(f"side {side}, captions {start}..{start + len(piece) - 1}: {exc}")
    if not chunks:
        return None
    return np.vstack(chunks)


def similarity_from_embeddings(
    emb_a: np.ndarray,
    emb_b: np.ndarray,
    top_fraction: float = 0.01,
    block_rows: int = 256,
) -> SimilaritySummary:
    unit_a = _unit_rows(emb_a)
    unit_b = _unit_rows(emb_b)
    pair_count = unit_a.shape[0] * unit_b.shape[0]
    top_count = max(1, math.ceil(top_fraction * pair_count))

    total = 0.0
    heap: list[float] = []  # min-heap of the top_count largest similarities
    for start in range(0, unit_a.shape[0], block_rows):
        block = unit_a[start : start + block_rows] @ unit_b.T
        total += float(block.sum())
        for value in block.ravel():
            value = float(value)
            if len(heap) < top_count:
                heapq.heappush(heap, value)
            elif value > heap[0]:
                heapq.heapreplace(heap, value)
    return SimilaritySummary(
        mean_similarity=total / pair_count,
        top_percentile_similarity=heap[0],
        top_fraction=top_fraction,
        pair_count=pair_count,
        top_count=top_count,
    )


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    matrix = validate_embeddings(matrix)
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("similarity is undefined for zero vectors")
    return matrix / norms[:, None]
