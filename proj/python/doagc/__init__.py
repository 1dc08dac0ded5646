"""Dual-optimized adaptive graph reconstruction for multi-view graph clustering."""

from ._doagc import (
    ContractError,
    DivergenceError,
    DomainError,
    InfeasibleError,
    IoError,
    ShapeError,
    accuracy,
    aggregate,
    ari,
    cosine_similarity_graph,
    edge_homophily,
    generate_synthetic,
    kmeans,
    load_dataset,
    macro_f1,
    nmi,
    reconstruct,
    train,
    train_arrays,
    weighted_f1,
    weighted_homophily,
)

__all__ = [
    "ContractError",
    "DivergenceError",
    "DomainError",
    "InfeasibleError",
    "IoError",
    "ShapeError",
    "accuracy",
    "aggregate",
    "ari",
    "cosine_similarity_graph",
    "edge_homophily",
    "generate_synthetic",
    "kmeans",
    "load_dataset",
    "macro_f1",
    "nmi",
    "reconstruct",
    "train",
    "train_arrays",
    "weighted_f1",
    "weighted_homophily",
]
