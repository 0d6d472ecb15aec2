"""
Node embeddings and clustering
==============================

Spatial, SVD, Laplacian and random-walk embeddings of a mobility network,
k-means over any embedding, and embedding / cluster-map files.
"""

from .export import clusters_frame, read_embedding, write_clusters, write_embedding
from .kmeans import cluster_profile, kmeans, kmeans_plus_plus
from .models import EMBEDDING_METHODS, ClusterAssignment, EmbeddingMatrix, standardize
from .random_walk import (
    RANDOM_WALK_VARIANTS,
    ConvergenceError,
    damping_factors,
    pagerank,
    random_walk_embedding,
    transition_matrix,
)
from .registry import INIT_METHODS, make_embedding
from .spatial import MissingCentroidError, spatial_embedding
from .spectral import fix_signs, laplacian_embedding, laplacian_spectrum, svd_embedding, truncated_svd

__all__ = [
    'ClusterAssignment',
    'ConvergenceError',
    'EMBEDDING_METHODS',
    'EmbeddingMatrix',
    'INIT_METHODS',
    'MissingCentroidError',
    'RANDOM_WALK_VARIANTS',
    'cluster_profile',
    'clusters_frame',
    'damping_factors',
    'fix_signs',
    'kmeans',
    'kmeans_plus_plus',
    'laplacian_embedding',
    'laplacian_spectrum',
    'make_embedding',
    'pagerank',
    'random_walk_embedding',
    'read_embedding',
    'spatial_embedding',
    'standardize',
    'svd_embedding',
    'transition_matrix',
    'truncated_svd',
    'write_clusters',
    'write_embedding',
]
