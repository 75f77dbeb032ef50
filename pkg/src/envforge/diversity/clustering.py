"""Single-linkage threshold clustering and semantic entropy.

Tasks share a cluster exactly when a chain of pairwise cosine distances
strictly below tau connects them: the threshold cut of a single-linkage
dendrogram equals connected components of the "< tau" graph. Entropy over
the resulting cluster proportions quantifies corpus diversity; it is
non-increasing in tau because raising tau only merges clusters.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embeddings import validate_embeddings


def cosine_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """1 - cosine similarity; in [0, 2] for nonzero vectors."""
    va = np.asarray(a, dtype=float)
    vb = np.asarray(b, dtype=float)
    if va.shape != vb.shape or va.ndim != 1:
        raise ValueError("vectors must share one dimension")
    norm_a = float(np.linalg.norm(va))
    norm_b = float(np.linalg.norm(vb))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine distance is undefined for zero vectors")
    return 1.0 - float(va @ vb) / (norm_a * norm_b)


@dataclass(frozen=True)
class ClusterAssignment:
    labels: tuple[int, ...]  # task index -> cluster index (0-based, dense)
    sizes: tuple[int, ...]

    @property
    def n_tasks(self) -> int:
        return len(self.labels)

    @property
    def n_clusters(self) -> int:
        return len(self.sizes)


@dataclass(frozen=True)
class EntropyCurvePoint:
    tau: float
    cluster_count: int
    entropy_bits: float


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def pairwise_cosine_distances(embeddings: np.ndarray) -> np.ndarray:
    matrix = validate_embeddings(embeddings)
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("cosine distance is undefined for zero vectors")
    unit = matrix / norms[:, None]
    sim = np.clip(unit @ unit.T, -1.0, 1.0)
    return 1.0 - sim


def cluster(embeddings: np.ndarray, tau: float) -> ClusterAssignment:
    """Threshold-cut single linkage: components of the `< tau` graph."""
    matrix = validate_embeddings(embeddings)
    if matrix.shape[0] < 1:
        raise ValueError("need at least one embedding")
    return cluster_from_distances(pairwise_cosine_distances(matrix), tau)


def cluster_from_distances(distances: np.ndarray, tau: float) -> ClusterAssignment:
    """Same cut over a precomputed symmetric distance matrix."""
    distances = np.asarray(distances, dtype=float)
    if distances.ndim != 2 or distances.shape[0] != distances.shape[1]:
        raise ValueError("distance matrix must be square")
    if tau < 0:
        raise ValueError("tau must be >= 0")
    n = distances.shape[0]
    uf = _UnionFind(n)
    for i in range(n):
        for j in range(i + 1, n):
            if distances[i, j] < tau:
                uf.union(i, j)
    return _assignment_from_roots([uf.find(i) for i in range(n)])


def _assignment_from_roots(roots: Sequence[int]) -> ClusterAssignment:
    dense: dict[int, int] = {}
    labels = []
    for root in roots:
        if root not in dense:
            dense[root] = len(dense)
        labels.append(dense[root])
    sizes = [0] * len(dense)
    for label in labels:
        sizes[label] += 1
    return ClusterAssignment(labels=tuple(labels), sizes=tuple(sizes))


def shannon_entropy(assignment: ClusterAssignment) -> float:
    """H = -sum p_i log2 p_i over cluster proportions, in bits."""
    n = assignment.n_tasks
    if n < 1:
        raise ValueError("empty assignment")
    entropy = 0.0
    for size in assignment.sizes:
        p = size / n
        entropy -= p * math.log2(p)
    return max(entropy, 0.0)  # guards the -0.0 single-cluster case


def entropy_curve(embeddings: np.ndarray, taus: Sequence[float]) -> list[EntropyCurvePoint]:
    """One point per threshold; taus must be non-decreasing.

    Edges are processed in one sorted sweep, so the union-find only ever
    grows: coarsening monotonicity holds by construction.
    """
    matrix = validate_embeddings(embeddings)
    taus = list(taus)
    if any(b < a for a, b in zip(taus, taus[1:])):
        raise ValueError("taus must be ascending")
    n = matrix.shape[0]
    if n < 1:
        raise ValueError("need at least one embedding")
    distances = pairwise_cosine_distances(matrix)
    edges = sorted(
        (distances[i, j], i, j) for i in range(n) for j in range(i + 1, n)
    )
    uf = _UnionFind(n)
    points = []
    cursor = 0
    for tau in taus:
        while cursor < len(edges) and edges[cursor][0] < tau:
            _, i, j = edges[cursor]
            uf.union(i, j)
            cursor += 1
        assignment = _assignment_from_roots([uf.find(i) for i in range(n)])
        points.append(
            EntropyCurvePoint(
                tau=tau,
                cluster_count=assignment.n_clusters,
                entropy_bits=shannon_entropy(assignment),
            )
        )
    return points


def curve_to_csv(points: Sequence[EntropyCurvePoint]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["tau", "clusters", "entropy_bits"])
    for point in points:
        writer.writerow([f"{point.tau:.6f}", point.cluster_count, f"{point.entropy_bits:.6f}"])
    return buffer.getvalue()


def curve_to_series(points: Sequence[EntropyCurvePoint]) -> dict:
    """Plot-ready JSON series."""
    return {
        "taus": [p.tau for p in points],
        "clusters": [p.cluster_count for p in points],
        "entropy_bits": [p.entropy_bits for p in points],
    }


def default_tau_grid() -> list[float]:
    """0.05 steps over [0.5, 0.95]."""
    return [round(0.5 + 0.05 * i, 2) for i in range(10)]
