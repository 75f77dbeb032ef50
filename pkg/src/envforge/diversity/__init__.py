from .clustering import (
    ClusterAssignment,
    EntropyCurvePoint,
    cluster,
    cluster_from_distances,
    cosine_distance,
    curve_to_csv,
    curve_to_series,
    default_tau_grid,
    entropy_curve,
    pairwise_cosine_distances,
    shannon_entropy,
)
from .descriptors import Descriptor, descriptor_prompt, generate_descriptors, parse_descriptor_response
from .embeddings import EmbeddingProvider, HashingEmbedder, RemoteEmbedder
from .similarity import SimilaritySummary, cross_dataset_similarity, similarity_from_embeddings

__all__ = [
    "ClusterAssignment",
    "Descriptor",
    "EmbeddingProvider",
    "EntropyCurvePoint",
    "HashingEmbedder",
    "RemoteEmbedder",
    "SimilaritySummary",
    "cluster",
    "cluster_from_distances",
    "cosine_distance",
    "cross_dataset_similarity",
    "curve_to_csv",
    "curve_to_series",
    "default_tau_grid",
    "descriptor_prompt",
    "entropy_curve",
    "generate_descriptors",
    "pairwise_cosine_distances",
    "parse_descriptor_response",
    "shannon_entropy",
    "similarity_from_embeddings",
]
