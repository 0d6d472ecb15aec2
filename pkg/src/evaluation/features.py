"""
Feature matrices for the supervised benchmarks: embeddings, attribute
blocks (densities, 311 proportions) and their concatenations.

Mobility Analytics Team — 2026-10
"""

import logging
from typing import Dict, Optional, Sequence, Union

import numpy as np

from embeddings import EmbeddingMatrix
from ingest.models import AttributeTable, RegionMismatchError

logger = logging.getLogger(__name__)

# Table of input sets compared against each other; "embedding" is the
# learned node embedding of the city.
FEATURE_SETS = (
    "population_density",
    "job_density",
    "311",
    "embedding",
    "embedding+population_density",
    "embedding+job_density",
    "embedding+311",
)


class MissingDataError(KeyError):
    """A grid cell needs an input the city does not have."""


def standardize_block(block: np.ndarray) -> np.ndarray:
    """Column z-scores ignoring NaN; constant columns become 0."""
    block = np.asarray(block, dtype=np.float64)
    if block.ndim == 1:
        block = block[:, None]
    with np.errstate(invalid="ignore"):
        mean = np.nanmean(block, axis=0)
        std = np.nanstd(block, axis=0)
    std = np.where(np.isfinite(std) & (std > 0), std, np.inf)
    return (block - np.nan_to_num(mean)) / std


def _aligned_block(emb: EmbeddingMatrix, extra: Union[AttributeTable, np.ndarray],
                   columns: Optional[Sequence[str]]) -> np.ndarray:
    if not isinstance(extra, AttributeTable):
        block = np.asarray(extra, dtype=np.float64)
        block = block[:, None] if block.ndim == 1 else block
        if block.shape[0] != emb.n:
            raise ValueError(f"feature block has {block.shape[0]} rows, embedding has {emb.n}")
        return block
    if emb.geoids is None:
        raise ValueError("embedding has no region ids; cannot align an attribute table")
    left, right = set(emb.geoids), set(extra.regions)
    if left != right:
        raise RegionMismatchError(left - right, right - left)
    cols = list(columns) if columns is not None else extra.columns
    return extra.values.loc[list(emb.geoids), cols].to_numpy(dtype=np.float64)


def concat_features(
    emb: Optional[EmbeddingMatrix],
    extra: Union[AttributeTable, np.ndarray, Sequence[np.ndarray], None] = None,
    columns: Optional[Sequence[str]] = None,
) -> np.ndarray:
    """[standardized E | standardized block ...], one block at a time.

    Raises
    ------
    RegionMismatchError
        An attribute table's regions differ from the embedding's; the
        symmetric difference is listed.
    """
    blocks = []
    if emb is not None:
        blocks.append(standardize_block(emb.values))
    if extra is not None:
        extras = extra if isinstance(extra, (list, tuple)) else [extra]
        for block in extras:
            if emb is None:
                raw = np.asarray(block, dtype=np.float64)
                raw = raw[:, None] if raw.ndim == 1 else raw
            else:
                raw = _aligned_block(emb, block, columns)
            blocks.append(standardize_block(raw))
    if not blocks:
        raise ValueError("concat_features needs at least one block")
    return np.concatenate(blocks, axis=1)


def feature_matrix(
    name: str,
    blocks: Dict[str, np.ndarray],
    embedding: Optional[EmbeddingMatrix] = None,
) -> np.ndarray:
    """Resolve a feature-set name like ``embedding+311`` to a matrix.

    Raises
    ------
    MissingDataError
        A named block (or the embedding) is unavailable.
    """
    parts = name.split("+")
    emb = None
    extras = []
    for part in parts:
        if part == "embedding":
            if embedding is None:
                raise MissingDataError(f"feature set {name!r} needs an embedding")
            emb = embedding
        elif part in blocks:
            extras.append(blocks[part])
        else:
            raise MissingDataError(f"feature block {part!r} not available (have {sorted(blocks)})")
    return concat_features(emb, extras or None)
