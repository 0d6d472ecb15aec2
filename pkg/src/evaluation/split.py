"""
Train/test assignment of labeled nodes.

Only nodes with a target take part; unlabeled nodes are never imputed and
never scored.

Mobility Analytics Team — 2026-10
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from config import KFOLD_K, MIN_SPLIT_NODES, TRAIN_FRACTION

logger = logging.getLogger(__name__)

SPLIT_KINDS = ("holdout", "kfold")


@dataclass(frozen=True)
class SplitPlan:
    """Assignment of labeled node indices.

    holdout: ``assignment`` is 0 (train) / 1 (test).
    kfold:   ``assignment`` is the fold id in 0..k-1.
    """
    kind: str
    nodes: np.ndarray           # sorted labeled node indices
    assignment: np.ndarray      # aligned with ``nodes``
    seed: int
    train_fraction: float = TRAIN_FRACTION
    k: int = 1

    @property
    def n_folds(self) -> int:
        return 1 if self.kind == "holdout" else self.k

    def fold(self, f: int = 0) -> Tuple[np.ndarray, np.ndarray]:
        """(train_idx, test_idx) node indices for fold ``f``."""
        if not 0 <= f < self.n_folds:
            raise IndexError(f"fold {f} out of range for {self.n_folds}-fold plan")
        test = self.assignment == (1 if self.kind == "holdout" else f)
        return self.nodes[~test], self.nodes[test]

    def folds(self) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        for f in range(self.n_folds):
            yield self.fold(f)

    @property
    def train_idx(self) -> np.ndarray:
        return self.fold(0)[0]

    @property
    def test_idx(self) -> np.ndarray:
        return self.fold(0)[1]

    def train_mask(self, n: int, f: int = 0) -> np.ndarray:
        mask = np.zeros(n, dtype=bool)
        mask[self.fold(f)[0]] = True
        return mask


def labeled_nodes(target) -> np.ndarray:
    """Indices of finite entries of a target vector (NaN = missing)."""
    return np.flatnonzero(np.isfinite(np.asarray(target, dtype=np.float64)))


def make_split(
    nodes,
    kind: str = "holdout",
    train_fraction: float = TRAIN_FRACTION,
    k: int = KFOLD_K,
    seed: int = 0,
    min_nodes: int = MIN_SPLIT_NODES,
) -> SplitPlan:
    """Uniform random assignment, deterministic per seed.

    Parameters
    ----------
    nodes : node indices that carry a target
    kind : "holdout" (train_fraction) or "kfold" (k folds, sizes differ by <= 1)
    """
    if kind not in SPLIT_KINDS:
        raise ValueError(f"Unknown split kind: {kind!r}. Supported: {SPLIT_KINDS}")
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    n = nodes.size
    if n < min_nodes:
        raise ValueError(f"need >= {min_nodes} labeled nodes to split, got {n}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    assignment = np.empty(n, dtype=np.int64)

    if kind == "holdout":
        if not 0.0 < train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
        n_train = int(round(train_fraction * n))
        n_train = min(max(n_train, 1), n - 1)
        assignment[order[:n_train]] = 0
        assignment[order[n_train:]] = 1
        return SplitPlan(kind, nodes, assignment, seed, train_fraction=train_fraction, k=1)

    if not 2 <= k <= n:
        raise ValueError(f"k must be in 2..{n}, got {k}")
    assignment[order] = np.arange(n) % k
    return SplitPlan(kind, nodes, assignment, seed, train_fraction=1.0 - 1.0 / k, k=k)


def split_for_target(target, kind: str = "holdout", seed: int = 0,
                     train_fraction: float = TRAIN_FRACTION, k: Optional[int] = None) -> SplitPlan:
    return make_split(labeled_nodes(target), kind=kind, train_fraction=train_fraction,
                      k=k or KFOLD_K, seed=seed)
