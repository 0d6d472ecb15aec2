"""
Mobility network container.

A weighted directed region graph: rows are home regions (origins),
columns are work regions (destinations), entries are daily commuter counts.
Node order is fixed at construction and defines the row order of every
embedding and target vector derived from the network.

Mobility Analytics Team — 2026-10
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy import sparse

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MobilityNetwork:
    """Weighted directed region graph with its node registry."""
    geoids: Tuple[str, ...]             # node_index i -> RegionId
    adjacency: sparse.csr_matrix        # N x N, origin=home, destination=work

    def __post_init__(self):
        n = len(self.geoids)
        if n < 1:
            raise ValueError("Mobility network has no nodes")
        if len(set(self.geoids)) != n:
            raise ValueError("Duplicate region ids in node registry")
        if self.adjacency.shape != (n, n):
            raise ValueError(
                f"Adjacency shape {self.adjacency.shape} does not match {n} nodes"
            )
        if self.adjacency.nnz and self.adjacency.data.min() < 0:
            raise ValueError("Adjacency entries must be non-negative")

    @property
    def n(self) -> int:
        return len(self.geoids)

    @cached_property
    def index(self) -> Dict[str, int]:
        """RegionId -> node index."""
        return {g: i for i, g in enumerate(self.geoids)}

    def dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    def total_flow(self) -> float:
        return float(self.adjacency.sum())

    def permuted(self, order: Sequence[int]) -> "MobilityNetwork":
        """Relabel nodes so that new node k is old node order[k]."""
        order = np.asarray(order, dtype=int)
        if sorted(order.tolist()) != list(range(self.n)):
            raise ValueError("order must be a permutation of node indices")
        adj = self.adjacency[order][:, order].tocsr()
        return MobilityNetwork(
            geoids=tuple(self.geoids[k] for k in order),
            adjacency=adj,
        )

    @classmethod
    def from_dense(cls, matrix, geoids: Sequence[str] = None) -> "MobilityNetwork":
        """Build from a dense matrix; geoids default to zero-padded indices."""
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Adjacency must be square, got shape {matrix.shape}")
        if geoids is None:
            geoids = [f"{i:011d}" for i in range(matrix.shape[0])]
        return cls(geoids=tuple(geoids), adjacency=sparse.csr_matrix(matrix))
