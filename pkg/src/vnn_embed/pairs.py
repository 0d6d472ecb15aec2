"""
Pair streams for edge-reconstruction training.

Every pair (i, j) of nodes, the diagonal included, is a training row whose
features are the elementwise squared difference (e_i - e_j)² and whose
target is the transformed flow Ã[i, j].

Mobility Analytics Team — 2026-10
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Tuple, Union

import numpy as np

from config import VNN_BALANCED_ABOVE, VNN_BATCH_SIZE, WEIGHT_TRANSFORM
from embeddings import EmbeddingMatrix
from graph import MobilityNetwork, transform_weights
from nn_core import Tensor, ops

logger = logging.getLogger(__name__)

SAMPLING_MODES = ("all_pairs", "balanced", "auto")


@dataclass
class PairwiseBatch:
    i: np.ndarray
    j: np.ndarray
    features: np.ndarray        # B x d, (e_i - e_j)²  (B x 2d [e_i | e_j] when directed)
    targets: np.ndarray         # B

    def __len__(self) -> int:
        return self.i.size


def reconstruction_target(
    net: MobilityNetwork,
    weight_transform: str = WEIGHT_TRANSFORM,
    directed: bool = False,
) -> np.ndarray:
    """Dense Ã: transformed flows, symmetrized ½(T + Tᵀ) unless ``directed``."""
    t = transform_weights(net.adjacency, weight_transform).toarray()
    return t if directed else 0.5 * (t + t.T)


def resolve_sampling(sampling: str, n: int, balanced_above: int = VNN_BALANCED_ABOVE) -> str:
    if sampling not in SAMPLING_MODES:
        raise ValueError(f"Unknown sampling mode: {sampling!r}. Supported: {SAMPLING_MODES}")
    if sampling == "auto":
        return "balanced" if n > balanced_above else "all_pairs"
    return sampling


def epoch_pairs(target: np.ndarray, sampling: str, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Shuffled (i, j) index arrays for one epoch.

    all_pairs: each of the N² pairs exactly once.
    balanced:  every non-zero pair plus as many uniformly drawn zero pairs.
    """
    n = target.shape[0]
    if sampling == "all_pairs":
        flat = rng.permutation(n * n)
    elif sampling == "balanced":
        cells = target.ravel()
        nonzero = np.flatnonzero(cells != 0)
        zero = np.flatnonzero(cells == 0)
        n_zero = nonzero.size if nonzero.size else min(VNN_BATCH_SIZE, zero.size)
        drawn = rng.choice(zero, size=min(n_zero, zero.size), replace=False) if zero.size else zero
        flat = rng.permutation(np.concatenate([nonzero, drawn]))
    else:
        raise ValueError(f"sampling must be resolved to all_pairs or balanced, got {sampling!r}")
    return flat // n, flat % n


def pair_features_array(values: np.ndarray, i: np.ndarray, j: np.ndarray, directed: bool = False) -> np.ndarray:
    if directed:
        return np.concatenate([values[i], values[j]], axis=1)
    return (values[i] - values[j]) ** 2


def pair_features(embedding: Tensor, i: np.ndarray, j: np.ndarray, directed: bool = False) -> Tensor:
    """Differentiable counterpart of :func:`pair_features_array`."""
    ei, ej = ops.take_rows(embedding, i), ops.take_rows(embedding, j)
    if directed:
        return ops.concat([ei, ej], axis=1)
    return ops.squared_difference(ei, ej)


def make_pairs(
    emb: Union[EmbeddingMatrix, np.ndarray],
    net: MobilityNetwork,
    sampling: str = "auto",
    batch_size: int = VNN_BATCH_SIZE,
    rng: np.random.Generator = None,
    weight_transform: str = WEIGHT_TRANSFORM,
    directed: bool = False,
) -> Iterator[PairwiseBatch]:
    """Yield one epoch of pair batches for the current embedding values."""
    values = emb.values if isinstance(emb, EmbeddingMatrix) else np.asarray(emb, dtype=np.float64)
    if values.shape[0] != net.n:
        raise ValueError(f"embedding has {values.shape[0]} rows, network has {net.n} nodes")
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    rng = rng if rng is not None else np.random.default_rng(0)
    target = reconstruction_target(net, weight_transform, directed=directed)
    i, j = epoch_pairs(target, resolve_sampling(sampling, net.n), rng)
    for start in range(0, i.size, batch_size):
        bi, bj = i[start:start + batch_size], j[start:start + batch_size]
        yield PairwiseBatch(bi, bj, pair_features_array(values, bi, bj, directed), target[bi, bj])
