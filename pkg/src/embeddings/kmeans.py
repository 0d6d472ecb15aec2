"""
K-means clustering of embeddings (k-means++ seeding, Lloyd iterations).

Each restart draws from its own child of ``SeedSequence(seed)``, so restart r
of ``kmeans(x, k, seed, n_init=R)`` is the same run as the single restart
seeded with that child.

Mobility Analytics Team — 2026-10
"""

import logging
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from config import KMEANS_MAX_ITER
from .models import ClusterAssignment, EmbeddingMatrix

logger = logging.getLogger(__name__)


def _squared_distances(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (x ** 2).sum(axis=1)[:, None] - 2.0 * x @ centers.T + (centers ** 2).sum(axis=1)[None, :]
    return np.maximum(d2, 0.0)


def kmeans_plus_plus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """D²-weighted seeding."""
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    closest = _squared_distances(x, centers[:1]).ravel()
    for c in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = rng.choice(n, p=closest / total)
        centers[c] = x[idx]
        closest = np.minimum(closest, _squared_distances(x, centers[c:c + 1]).ravel())
    return centers


def _lloyd(x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int):
    centers = kmeans_plus_plus(x, k, rng)
    labels = np.full(x.shape[0], -1)
    trace: List[float] = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        d2 = _squared_distances(x, centers)
        new_labels = d2.argmin(axis=1)

        counts = np.bincount(new_labels, minlength=k)
        for empty in np.flatnonzero(counts == 0):
            # re-seed at the point worst served by its current center
            own = d2[np.arange(x.shape[0]), new_labels]
            donors = counts[new_labels] > 1
            far = np.flatnonzero(donors)[np.argmax(own[donors])]
            logger.debug("k-means: re-seeding empty cluster %d at point %d", empty, far)
            counts[new_labels[far]] -= 1
            new_labels[far] = empty
            counts[empty] = 1
            d2[far, empty] = 0.0

        for c in range(k):
            centers[c] = x[new_labels == c].mean(axis=0)
        inertia = float(((x - centers[new_labels]) ** 2).sum())
        trace.append(inertia)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    else:
        logger.warning("k-means hit max_iter=%d without stabilizing", max_iter)
    return new_labels, centers, trace, n_iter


def kmeans(
    embedding: Union[EmbeddingMatrix, np.ndarray],
    k: int,
    seed: Union[int, np.random.SeedSequence] = 0,
    max_iter: int = KMEANS_MAX_ITER,
    n_init: int = 1,
) -> ClusterAssignment:
    """Partition rows into ``k`` clusters, keeping the lowest-inertia restart.

    Parameters
    ----------
    embedding : N x d rows (an EmbeddingMatrix or plain array)
    k : number of clusters, 1 <= k <= N
    seed : int or SeedSequence; restarts use its spawned children
    max_iter : Lloyd iteration cap per restart
    n_init : number of k-means++ restarts
    """
    x = embedding.values if isinstance(embedding, EmbeddingMatrix) else np.asarray(embedding, dtype=np.float64)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must be in 1..{n}")
    if n_init < 1:
        raise ValueError(f"n_init must be >= 1, got {n_init}")
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = [seq] if n_init == 1 else seq.spawn(n_init)

    best: Optional[Tuple] = None
    restart_inertias = []
    for child in children:
        labels, centers, trace, n_iter = _lloyd(x, k, np.random.default_rng(child), max_iter)
        restart_inertias.append(trace[-1])
        if best is None or trace[-1] < best[2][-1]:
            best = (labels, centers.copy(), trace, n_iter)

    labels, centers, trace, n_iter = best
    logger.info("k-means k=%d: inertia %.4g after %d iterations (best of %d)",
                k, trace[-1], n_iter, n_init)
    return ClusterAssignment(labels=labels, centroids=centers, inertia=trace[-1],
                             inertia_trace=trace, n_iter=n_iter,
                             restart_inertias=restart_inertias)


def cluster_profile(assignment: ClusterAssignment, target: Optional[np.ndarray] = None) -> pd.DataFrame:
    """Size plus mean and median target per cluster (NaN targets ignored)."""
    frame = pd.DataFrame({"cluster": assignment.labels})
    if target is not None:
        frame["target"] = np.asarray(target, dtype=np.float64)
    grouped = frame.groupby("cluster")
    out = grouped.size().rename("size").to_frame()
    if target is not None:
        out["labeled"] = grouped["target"].count()
        out["mean_target"] = grouped["target"].mean()
        out["median_target"] = grouped["target"].median()
    return out.reindex(range(assignment.k), fill_value=0).reset_index()
