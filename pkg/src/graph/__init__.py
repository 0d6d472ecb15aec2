"""
Graph-level numeric structures over commute networks.

Public API:
    MobilityNetwork                     - node registry + sparse O-D adjacency
    transform_weights(A, transform)     - raw / log1p / binary
    degree_matrix(net, weighted)        - degree vector of Ã
    normalize_adjacency(net, ...)       - D^{-1/2} Ã D^{-1/2}
    neighborhood(net, i)                - {j : Ã[i][j] > 0}
    edge_index(net)                     - (dst, src) message-passing topology
"""

from .adjacency import (
    WEIGHT_TRANSFORMS, NormalizedAdjacency, degree_matrix, edge_index, neighborhood,
    normalize_adjacency, propagation_matrix, transform_weights,
)
from .network import MobilityNetwork

__all__ = [
    'WEIGHT_TRANSFORMS',
    'MobilityNetwork',
    'NormalizedAdjacency',
    'degree_matrix',
    'edge_index',
    'neighborhood',
    'normalize_adjacency',
    'propagation_matrix',
    'transform_weights',
]
