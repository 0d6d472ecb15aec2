"""
Name -> builder lookup for the initial node features used by the models.

Mobility Analytics Team — 2026-10
"""

import logging
from typing import Dict, Optional, Tuple

from config import WEIGHT_TRANSFORM
from graph import MobilityNetwork
from .models import EmbeddingMatrix
from .random_walk import random_walk_embedding
from .spatial import spatial_embedding
from .spectral import laplacian_embedding, svd_embedding

logger = logging.getLogger(__name__)

INIT_METHODS = ("spatial", "svd", "laplacian", "random_walk")


def make_embedding(
    method: str,
    net: MobilityNetwork,
    d: int,
    centroids: Optional[Dict[str, Tuple[float, float]]] = None,
    weight_transform: str = WEIGHT_TRANSFORM,
    random_walk_variant: str = "pagerank_multi_damping",
) -> EmbeddingMatrix:
    """Build a standardized initial embedding. ``spatial`` is always 2-D."""
    if method == "spatial":
        if centroids is None:
            raise ValueError("spatial embedding requires region centroids")
        return spatial_embedding(centroids, net.geoids)
    if method == "svd":
        return svd_embedding(net, d, weight_transform=weight_transform, standardize=True)
    if method == "laplacian":
        return laplacian_embedding(net, d, weight_transform=weight_transform, standardize=True)
    if method == "random_walk":
        return random_walk_embedding(net, d, variant=random_walk_variant, standardize=True)
    raise ValueError(f"Unknown embedding method: {method!r}. Supported: {INIT_METHODS}")
