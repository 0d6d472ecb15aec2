"""
Input-feature comparison: densities, 311 mix and the learned embedding,
alone and concatenated, each through the same supervised MLP.

Mobility Analytics Team — 2026-10
"""

import logging
from typing import List, Optional, Sequence

from config import GRID_WORKERS
from .features import FEATURE_SETS
from .grid import GridSettings, run_cell, run_grid
from .report import GridCell

logger = logging.getLogger(__name__)


def run_feature_comparison(
    city,
    init: str,
    d: int,
    seeds: Sequence[int],
    settings: Optional[GridSettings] = None,
    feature_sets: Sequence[str] = FEATURE_SETS,
    embedding=None,
    workers: int = GRID_WORKERS,
    use_cache: bool = False,
) -> List[GridCell]:
    """One feature_mlp cell per feature set.

    ``embedding`` (already learned) is reused by every cell and seed; without
    it each seed trains its own VNN embedding from ``init`` at width ``d``.
    Sets naming an unavailable block come back as NA cells.
    """
    settings = settings or GridSettings()
    options = settings.model_dump()
    cells = [
        GridCell(city=city.name, method="feature_mlp", init=init, d=d, seeds=list(seeds),
                 options={**options, "features": fs})
        for fs in feature_sets
    ]
    if embedding is not None:
        logger.info("Feature comparison on %s with a precomputed %s embedding", city.name, embedding.method)
        return [run_cell(city, cell, embedding=embedding) for cell in cells]
    return run_grid({city.name: city}, cells, workers=workers, use_cache=use_cache)
