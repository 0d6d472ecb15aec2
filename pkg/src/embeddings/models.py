"""
Embedding and clustering result types.

Mobility Analytics Team — 2026-10
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

EMBEDDING_METHODS = ("spatial", "svd", "laplacian", "random_walk", "vnn_trained", "gnn_hidden")

_CONSTANT_TOL = 1e-12


def standardize(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-column z-scores (population variance). Constant columns -> 0.

    Returns
    -------
    (standardized, mean, std) with std = 0 recorded for constant columns.
    """
    values = np.asarray(values, dtype=np.float64)
    mean = values.mean(axis=0)
    centered = values - mean
    std = np.sqrt((centered ** 2).mean(axis=0))
    scale = np.maximum(np.abs(mean), 1.0)
    constant = std <= _CONSTANT_TOL * scale
    out = np.zeros_like(centered)
    out[:, ~constant] = centered[:, ~constant] / std[~constant]
    std = np.where(constant, 0.0, std)
    return out, mean, std


@dataclass
class EmbeddingMatrix:
    """N x d per-node table; row i is node_index i of the source network."""
    values: np.ndarray
    method: str
    geoids: Optional[Tuple[str, ...]] = None
    mean: Optional[np.ndarray] = None       # standardization stats (None = raw)
    std: Optional[np.ndarray] = None
    spectrum: Optional[np.ndarray] = None   # singular values / eigenvalues / damping factors

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError(f"embedding must be 2-D, got shape {self.values.shape}")
        if self.method not in EMBEDDING_METHODS:
            raise ValueError(f"Unknown embedding method: {self.method!r}. Supported: {EMBEDDING_METHODS}")
        if self.geoids is not None and len(self.geoids) != self.values.shape[0]:
            raise ValueError("geoids length does not match embedding rows")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def is_standardized(self) -> bool:
        return self.mean is not None

    def standardized(self) -> "EmbeddingMatrix":
        if self.is_standardized:
            return self
        values, mean, std = standardize(self.values)
        return replace(self, values=values, mean=mean, std=std)


@dataclass
class ClusterAssignment:
    """K-means result."""
    labels: np.ndarray                  # N, ids in 0..k-1
    centroids: np.ndarray               # k x d
    inertia: float
    inertia_trace: List[float] = field(default_factory=list)   # per Lloyd iteration
    n_iter: int = 0
    restart_inertias: List[float] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]
