"""Clustering, entropy, and similarity against independent oracles."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from envforge.diversity import (
    ClusterAssignment,
    HashingEmbedder,
    cluster,
    cluster_from_distances,
    cosine_distance,
    curve_to_csv,
    default_tau_grid,
    entropy_curve,
    pairwise_cosine_distances,
    shannon_entropy,
    similarity_from_embeddings,
)


def random_unit_embeddings(rng: random.Random, n: int, dim: int = 8) -> np.ndarray:
    matrix = np.array([[rng.gauss(0, 1) for _ in range(dim)] for _ in range(n)])
    return matrix / np.linalg.norm(matrix, axis=1)[:, None]


# --- cosine distance -----------------------------------------------------------


def test_cosine_distance_reference_points() -> None:
    assert cosine_distance([1.0, 0.0], [2.0, 0.0]) == pytest.approx(0.0, abs=1e-12)
    assert cosine_distance([1.0, 0.0], [0.0, 3.0]) == pytest.approx(1.0, abs=1e-12)
    assert cosine_distance([1.0, 2.0], [-1.0, -2.0]) == pytest.approx(2.0, abs=1e-12)


def test_cosine_distance_preconditions() -> None:
    with pytest.raises(ValueError):
        cosine_distance([1.0, 0.0], [1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        cosine_distance([0.0, 0.0], [1.0, 0.0])


# --- clustering ----------------------------------------------------------------


def test_identical_embeddings_form_one_cluster() -> None:
    matrix = np.tile([0.6, 0.8], (5, 1))
    assignment = cluster(matrix, tau=0.01)
    assert assignment.n_clusters == 1
    assert assignment.sizes == (5,)


def test_tau_zero_gives_singletons() -> None:
    rng = random.Random(3)
    matrix = random_unit_embeddings(rng, 6)
    assignment = cluster(matrix, tau=0.0)  # strict <: nothing merges
    assert assignment.n_clusters == 6


def test_chaining_through_close_pairs() -> None:
    # Spec fixture at the distance level: pairwise distances {0.1, 0.1, 0.5};
    # tau=0.2 chains all three through the close pairs.
    distances = np.array(
        [
            [0.0, 0.1, 0.5],
            [0.1, 0.0, 0.1],
            [0.5, 0.1, 0.0],
        ]
    )
    assignment = cluster_from_distances(distances, tau=0.2)
    assert assignment.n_clusters == 1
    # The same chain built from actual vectors (angles 0, 25.84, 51.68 deg).
    angles = [0.0, math.acos(0.9), 2 * math.acos(0.9)]
    matrix = np.array([[math.cos(a), math.sin(a)] for a in angles])
    spread = pairwise_cosine_distances(matrix)
    assert spread[0, 1] == pytest.approx(0.1, abs=1e-9)
    assert spread[0, 2] > 0.2
    assert cluster(matrix, tau=0.2).n_clusters == 1


def test_dimension_mismatch_rejected() -> None:
    with pytest.raises(ValueError):
        cluster(np.array([[1.0, 0.0], [1.0]], dtype=object), tau=0.5)


def test_permutation_invariance() -> None:
    rng = random.Random(17)
    matrix = random_unit_embeddings(rng, 20)
    base = cluster(matrix, tau=0.8)
    order = list(range(20))
    rng.shuffle(order)
    shuffled = cluster(matrix[order], tau=0.8)
    assert sorted(base.sizes) == sorted(shuffled.sizes)
    assert shannon_entropy(base) == pytest.approx(shannon_entropy(shuffled), abs=1e-12)


# --- entropy -------------------------------------------------------------------


def test_entropy_reference_values() -> None:
    one_cluster = ClusterAssignment(labels=(0, 0, 0, 0), sizes=(4,))
    assert shannon_entropy(one_cluster) == 0.0

    four_equal = ClusterAssignment(labels=(0, 1, 2, 3), sizes=(1, 1, 1, 1))
    assert shannon_entropy(four_equal) == pytest.approx(2.0, abs=1e-12)

    # sizes (3, 1): H = -0.75 log2 0.75 - 0.25 log2 0.25
    lopsided = ClusterAssignment(labels=(0, 0, 0, 1), sizes=(3, 1))
    expected = -(0.75 * math.log2(0.75) + 0.25 * math.log2(0.25))
    assert expected == pytest.approx(0.8112781244591328, abs=1e-12)
    assert shannon_entropy(lopsided) == pytest.approx(expected, abs=1e-12)


def test_entropy_bounds_and_singleton_extreme() -> None:
    rng = random.Random(23)
    for _ in range(50):
        n = rng.randint(1, 40)
        matrix = random_unit_embeddings(rng, n)
        tau = rng.uniform(0.0, 2.0)
        assignment = cluster(matrix, tau)
        h = shannon_entropy(assignment)
        assert 0.0 <= h <= math.log2(n) + 1e-12
        if assignment.n_clusters == n:
            assert h == pytest.approx(math.log2(n) if n > 1 else 0.0, abs=1e-12)


# --- entropy curve -------------------------------------------------------------


def test_curve_endpoints_for_distinct_embeddings() -> None:
    rng = random.Random(31)
    matrix = random_unit_embeddings(rng, 16)
    points = entropy_curve(matrix, [0.0, 2.0 + 1e-9])
    assert points[0].cluster_count == 16
    assert points[0].entropy_bits == pytest.approx(math.log2(16), abs=1e-12)
    assert points[-1].cluster_count == 1
    assert points[-1].entropy_bits == 0.0


def test_curve_monotone_on_random_fixtures() -> None:
    rng = random.Random(47)
    taus = [i / 19 * 2.0 for i in range(20)]
    for _ in range(100):
        matrix = random_unit_embeddings(rng, 50, dim=6)
        points = entropy_curve(matrix, taus)
        entropies = [p.entropy_bits for p in points]
        assert all(b <= a + 1e-12 for a, b in zip(entropies, entropies[1:]))
        clusters = [p.cluster_count for p in points]
        assert all(b <= a for a, b in zip(clusters, clusters[1:]))


def test_repeated_taus_give_identical_points() -> None:
    rng = random.Random(53)
    matrix = random_unit_embeddings(rng, 10)
    points = entropy_curve(matrix, [0.5, 0.5, 0.5])
    assert points[0] == points[1] == points[2]


def test_descending_taus_rejected() -> None:
    rng = random.Random(59)
    matrix = random_unit_embeddings(rng, 4)
    with pytest.raises(ValueError):
        entropy_curve(matrix, [0.9, 0.5])


def test_curve_matches_per_tau_cluster_calls() -> None:
    rng = random.Random(61)
    matrix = random_unit_embeddings(rng, 30)
    taus = default_tau_grid()
    points = entropy_curve(matrix, taus)
    for point in points:
        direct = cluster(matrix, point.tau)
        assert direct.n_clusters == point.cluster_count
        assert shannon_entropy(direct) == pytest.approx(point.entropy_bits, abs=1e-12)


def test_curve_csv_shape() -> None:
    rng = random.Random(67)
    matrix = random_unit_embeddings(rng, 5)
    text = curve_to_csv(entropy_curve(matrix, [0.2, 0.8]))
    lines = text.strip().splitlines()
    assert lines[0] == "tau,clusters,entropy_bits"
    assert len(lines) == 3


# --- dendrogram-cut equivalence -----------------------------------------------


def naive_single_linkage_cut(distances: np.ndarray, tau: float) -> list[set[int]]:
    """Independent oracle: agglomerate by minimum inter-cluster distance."""
    clusters = [{i} for i in range(distances.shape[0])]
    while len(clusters) > 1:
        best = None
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                d = min(distances[i, j] for i in clusters[a] for j in clusters[b])
                if best is None or d < best[0]:
                    best = (d, a, b)
        if best is None or best[0] >= tau:
            break
        _, a, b = best
        clusters[a] |= clusters[b]
        del clusters[b]
    return clusters


def test_threshold_cut_equals_dendrogram_cut() -> None:
    rng = random.Random(71)
    for trial in range(15):
        n = rng.randint(2, 50 if trial < 5 else 25)
        matrix = random_unit_embeddings(rng, n, dim=4)
        distances = pairwise_cosine_distances(matrix)
        tau = rng.uniform(0.05, 1.5)
        assignment = cluster(matrix, tau)
        mine = set()
        groups: dict[int, set[int]] = {}
        for index, label in enumerate(assignment.labels):
            groups.setdefault(label, set()).add(index)
        mine = {frozenset(g) for g in groups.values()}
        oracle = {frozenset(g) for g in naive_single_linkage_cut(distances, tau)}
        assert mine == oracle


# --- streaming similarity -------------------------------------------------------


def test_identical_singletons_similarity_one() -> None:
    embedder = HashingEmbedder(dim=64)
    emb = embedder.embed(["grid pathfinding with sums"])
    summary = similarity_from_embeddings(emb, emb.copy())
    assert summary.mean_similarity == pytest.approx(1.0, abs=1e-12)
    assert summary.top_percentile_similarity == pytest.approx(1.0, abs=1e-12)
    assert summary.pair_count == 1


def test_orthogonal_fixture_similarity_zero() -> None:
    a = np.array([[1.0, 0.0], [1.0, 0.0]])
    b = np.array([[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]])
    summary = similarity_from_embeddings(a, b)
    assert summary.mean_similarity == pytest.approx(0.0, abs=1e-12)
    assert summary.pair_count == 6


def test_streaming_matches_dense_oracle_to_1e9() -> None:
    rng = random.Random(79)
    a = random_unit_embeddings(rng, 100, dim=12)
    b = random_unit_embeddings(rng, 100, dim=12)
    summary = similarity_from_embeddings(a, b, top_fraction=0.01, block_rows=7)

    dense = a @ b.T  # rows already unit-norm
    flat = np.sort(dense.ravel())[::-1]
    k = math.ceil(0.01 * flat.size)
    assert summary.top_count == k
    assert summary.mean_similarity == pytest.approx(float(dense.mean()), abs=1e-9)
    assert summary.top_percentile_similarity == pytest.approx(float(flat[k - 1]), abs=1e-9)


def test_similarity_preconditions() -> None:
    from envforge.diversity import cross_dataset_similarity

    embedder = HashingEmbedder(dim=16)
    with pytest.raises(ValueError):
        cross_dataset_similarity([], ["x"], embedder)
    with pytest.raises(ValueError):
        cross_dataset_similarity(["x"], ["y"], embedder, top_fraction=0.0)


def test_similarity_reports_partial_coverage_on_embedding_failures() -> None:
    from envforge.diversity import cross_dataset_similarity
    from envforge.diversity.embeddings import EmbeddingError

    inner = HashingEmbedder(dim=16)

    class FlakyEmbedder:
        provider_id = "flaky"
        dim = 16

        def __init__(self):
            self.calls = 0

        def embed(self, texts):
            self.calls += 1
            if self.calls == 2:  # second batch of side a fails
                raise EmbeddingError("endpoint 503")
            return inner.embed(texts)

    captions_a = [f"caption a{i}" for i in range(5)]
    captions_b = [f"caption b{i}" for i in range(3)]
    summary = cross_dataset_similarity(
        captions_a, captions_b, FlakyEmbedder(), embed_batch=3
    )
    assert summary.covered_a == 3  # one batch of a was lost
    assert summary.covered_b == 3
    assert summary.pair_count == 9
    assert summary.embedding_errors and "503" in summary.embedding_errors[0]

    class DeadEmbedder:
        provider_id = "dead"
        dim = 16

        def embed(self, texts):
            raise EmbeddingError("down")

    with pytest.raises(EmbeddingError):
        cross_dataset_similarity(["x"], ["y"], DeadEmbedder())


def test_cross_dataset_similarity_end_to_end_trivial_cases() -> None:
    from envforge.diversity import cross_dataset_similarity

    embedder = HashingEmbedder(dim=64)
    same = cross_dataset_similarity(["identical caption"], ["identical caption"], embedder)
    assert same.mean_similarity == pytest.approx(1.0, abs=1e-12)
    assert same.top_percentile_similarity == pytest.approx(1.0, abs=1e-12)
    assert same.covered_a == same.covered_b == 1


def test_hashing_embedder_is_deterministic_and_unit_norm() -> None:
    embedder = HashingEmbedder(dim=32)
    texts = ["one task", "another task", "one task"]
    matrix = embedder.embed(texts)
    assert matrix.shape == (3, 32)
    assert np.allclose(np.linalg.norm(matrix, axis=1), 1.0)
    assert np.allclose(matrix[0], matrix[2])
    again = embedder.embed(texts)
    assert np.array_equal(matrix, again)
