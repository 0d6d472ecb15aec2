"""
Supervised MLP head: node features -> socioeconomic target.

Shared by the two-step embedding pipeline and the feature benchmarks. The
target is standardized with train-row statistics; scores are computed on
the original scale.

Mobility Analytics Team — 2026-10
"""

import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from config import DEFAULT_SEED, HEAD_EPOCHS, HEAD_HIDDEN, HEAD_LR, OPTIMIZER
from embeddings import EmbeddingMatrix
from evaluation.crossval import cross_validate, safe_r_squared
from evaluation.report import EvalReport
from evaluation.split import SplitPlan
from nn_core import (
    ModelParams,
    OptimizerState,
    backward,
    check_finite,
    init_mlp,
    mlp_forward,
    mlp_layer_sizes,
    mse,
    optimizer_step,
)

logger = logging.getLogger(__name__)

HEAD_PREFIX = "head"


@dataclass
class HeadConfig:
    hidden: Sequence[int] = tuple(HEAD_HIDDEN)
    epochs: int = HEAD_EPOCHS
    lr: float = HEAD_LR
    optimizer: str = OPTIMIZER
    weight_decay: float = 0.0
    dropout: float = 0.0


@dataclass
class RegressorFit:
    params: ModelParams
    spec: List[int]
    y_mean: float
    y_std: float
    predictions: np.ndarray             # all N rows, original units
    r2: float
    loss_trace: List[float] = field(default_factory=list)

    def predict(self, x: np.ndarray) -> np.ndarray:
        out = mlp_forward(self.params, x, self.spec, prefix=HEAD_PREFIX).value.ravel()
        return out * self.y_std + self.y_mean


def fit_mlp_regressor(
    x: np.ndarray,
    y: np.ndarray,
    train_idx: np.ndarray,
    test_idx: np.ndarray,
    config: Optional[HeadConfig] = None,
    seed: int = DEFAULT_SEED,
) -> RegressorFit:
    """Full-batch MLP regression on ``train_idx`` rows, scored on ``test_idx``.

    Raises
    ------
    ValueError
        Missing train targets, or a constant training target.
    NonFiniteError
        Training diverged.
    """
    config = config or HeadConfig()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.ndim != 2 or x.shape[0] != y.size:
        raise ValueError(f"feature matrix {x.shape} does not match target length {y.size}")
    y_train = y[train_idx]
    if not np.isfinite(y_train).all():
        raise ValueError("every training node needs a non-missing target")
    y_std = float(y_train.std())
    if y_std == 0.0:
        raise ValueError("training target is constant; the regression head cannot be fit")
    y_mean = float(y_train.mean())

    rng = np.random.default_rng(seed)
    params = ModelParams()
    spec = mlp_layer_sizes(x.shape[1], config.hidden, 1)
    init_mlp(params, HEAD_PREFIX, spec, rng)
    opt = OptimizerState(kind=config.optimizer, lr=config.lr, weight_decay=config.weight_decay)

    x_train = x[train_idx]
    z_train = ((y_train - y_mean) / y_std).reshape(-1, 1)
    trace = []
    for epoch in range(config.epochs):
        pred = mlp_forward(params, x_train, spec, prefix=HEAD_PREFIX,
                           dropout_rate=config.dropout, rng=rng)
        loss = mse(pred, z_train)
        check_finite(loss, where=f"regression head loss (epoch {epoch})")
        backward(loss)
        optimizer_step(opt, params)
        trace.append(loss.item())

    fit = RegressorFit(params, spec, y_mean, y_std, np.empty(0), float("nan"), trace)
    fit.predictions = fit.predict(x)
    if len(test_idx):
        fit.r2 = safe_r_squared(y[test_idx], fit.predictions[test_idx])
    return fit


def score_features(
    x: np.ndarray,
    target: np.ndarray,
    split: SplitPlan,
    config: Optional[HeadConfig] = None,
    seed: int = DEFAULT_SEED,
) -> Tuple[float, np.ndarray, np.ndarray, List[float], int, int]:
    """Fit the head on every fold of ``split``; R² is the mean over folds."""
    traces = []

    def _fold(train_idx, test_idx):
        fit = fit_mlp_regressor(x, target, train_idx, test_idx, config, seed)
        traces.append(fit.loss_trace)
        return target[test_idx], fit.predictions[test_idx]

    scores = cross_validate(split, _fold)
    return scores.r2, scores.y_true, scores.y_pred, traces[-1], scores.n_train, scores.n_test


def predict_income_from_embedding(
    emb: Union[EmbeddingMatrix, np.ndarray],
    target: np.ndarray,
    split: SplitPlan,
    config: Optional[HeadConfig] = None,
    seed: int = DEFAULT_SEED,
    method: str = "vnn_two_step",
    init: str = "-",
    city: str = "",
) -> EvalReport:
    """Two-step pipeline, second step: embedding rows -> MLP -> target.

    ``target`` is aligned with the embedding rows (NaN = missing); ``split``
    must only contain labeled nodes.
    """
    started = time.perf_counter()
    if isinstance(emb, EmbeddingMatrix):
        x = emb.standardized().values
        d = emb.d
    else:
        x = np.asarray(emb, dtype=np.float64)
        d = x.shape[1]
    target = np.asarray(target, dtype=np.float64)
    if target.shape != (x.shape[0],):
        raise ValueError(f"target length {target.shape} does not match embedding rows {x.shape[0]}")

    r2, y_true, y_pred, trace, n_train, n_test = score_features(x, target, split, config, seed)
    logger.info("%s (%s, d=%d, seed=%d): R² %.4f", method, init, d, seed, r2)
    return EvalReport(
        city=city, method=method, init=init, d=d, split=split.kind, seeds=[seed],
        r2_per_seed=[r2], r2_mean=r2, n_train=n_train, n_test=n_test,
        runtime_s=time.perf_counter() - started,
        y_true=y_true.tolist(), y_pred=y_pred.tolist(), loss_trace=trace,
    )
