"""
Fold scoring and seed aggregation.

Mobility Analytics Team — 2026-10
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .metrics import r_squared
from .report import EvalReport
from .split import SplitPlan

logger = logging.getLogger(__name__)

FoldFn = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]


def safe_r_squared(y, y_hat, where: str = "") -> float:
    """r_squared, reporting 0 when the test targets are constant."""
    try:
        return r_squared(y, y_hat)
    except ValueError as e:
        if "constant" not in str(e):
            raise
        logger.warning("R² undefined%s (constant test targets); reporting 0", f" for {where}" if where else "")
        return 0.0


@dataclass
class FoldScores:
    r2_folds: List[float]
    y_true: np.ndarray
    y_pred: np.ndarray
    n_train: int = 0
    n_test: int = 0
    loss_trace: List[float] = field(default_factory=list)

    @property
    def r2(self) -> float:
        return float(np.mean(self.r2_folds))


def cross_validate(plan: SplitPlan, fit_fold: FoldFn) -> FoldScores:
    """Score every fold of ``plan``; the plan's score is the mean over folds.

    ``fit_fold(train_idx, test_idx)`` returns (y_true, y_pred) for the test
    nodes. A holdout plan is the single-fold case.
    """
    scores, trues, preds = [], [], []
    n_train = n_test = 0
    for f, (train_idx, test_idx) in enumerate(plan.folds()):
        y_true, y_pred = fit_fold(train_idx, test_idx)
        scores.append(safe_r_squared(y_true, y_pred, where=f"fold {f}"))
        trues.append(np.asarray(y_true, dtype=np.float64))
        preds.append(np.asarray(y_pred, dtype=np.float64))
        n_train, n_test = len(train_idx), len(test_idx)
    if plan.n_folds > 1:
        logger.info("%d-fold R²: %s", plan.n_folds, ", ".join(f"{s:.3f}" for s in scores))
    return FoldScores(scores, np.concatenate(trues), np.concatenate(preds), n_train, n_test)


def seed_statistics(values: Sequence[float]) -> Tuple[float, float]:
    """(mean, sample standard deviation); the std is 0 for a single value."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("no values to aggregate")
    half = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), half


def aggregate_seeds(reports: Sequence[EvalReport]) -> EvalReport:
    """Combine single-seed reports of one configuration.

    The mean is the arithmetic mean of per-seed R²; predictions are never
    pooled.
    """
    if not reports:
        raise ValueError("aggregate_seeds needs at least one report")
    first = reports[0]
    keys = {(r.city, r.method, r.init, r.d) for r in reports}
    if len(keys) > 1:
        raise ValueError(f"cannot aggregate reports of different configurations: {sorted(map(str, keys))}")
    seeds, per_seed = [], []
    for r in reports:
        seeds.extend(r.seeds)
        per_seed.extend(r.r2_per_seed)
    mean, half = seed_statistics(per_seed)
    last = reports[-1]
    return first.model_copy(update={
        "seeds": seeds,
        "r2_per_seed": per_seed,
        "r2_mean": mean,
        "r2_halfwidth": half,
        "runtime_s": float(sum(r.runtime_s for r in reports)),
        "y_true": last.y_true,
        "y_pred": last.y_pred,
        "loss_trace": last.loss_trace,
    })
