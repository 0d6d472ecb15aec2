"""
Spatial baseline embedding: standardized (lon, lat) of each region's
representative point.

Mobility Analytics Team — 2026-10
"""

import logging
from typing import Dict, Sequence, Tuple

import numpy as np

from .models import EmbeddingMatrix

logger = logging.getLogger(__name__)


class MissingCentroidError(KeyError):
    """One or more regions have no centroid."""

    def __init__(self, regions: Sequence[str]):
        self.regions = list(regions)
        shown = ", ".join(self.regions[:10])
        more = f" (+{len(self.regions) - 10} more)" if len(self.regions) > 10 else ""
        super().__init__(f"{len(self.regions)} regions lack a centroid: {shown}{more}")


def spatial_embedding(
    centroids: Dict[str, Tuple[float, float]],
    geoids: Sequence[str],
    standardize: bool = True,
) -> EmbeddingMatrix:
    """N x 2 embedding ordered like ``geoids``; every region needs a centroid."""
    missing = [g for g in geoids if g not in centroids]
    if missing:
        raise MissingCentroidError(missing)
    values = np.array([centroids[g] for g in geoids], dtype=np.float64).reshape(len(geoids), 2)
    if not np.isfinite(values).all():
        raise ValueError("centroid coordinates must be finite")
    emb = EmbeddingMatrix(values=values, method="spatial", geoids=tuple(geoids))
    return emb.standardized() if standardize else emb
