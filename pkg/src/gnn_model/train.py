"""
Transductive end-to-end training: the forward pass always covers the whole
graph, the loss covers the training nodes only, and one backward pass
updates graph layers and head together.

Mobility Analytics Team — 2026-10
"""

import logging
import time
from typing import Optional, Tuple, Union

import numpy as np

from embeddings import EmbeddingMatrix
from evaluation.crossval import cross_validate
from evaluation.report import EvalReport
from evaluation.split import SplitPlan
from graph import MobilityNetwork
from nn_core import OptimizerState, backward, check_finite, mse, optimizer_step
from .model import GnnConfig, GnnModel

logger = logging.getLogger(__name__)


def _input_values(h0: Union[EmbeddingMatrix, np.ndarray]) -> np.ndarray:
    if isinstance(h0, EmbeddingMatrix):
        return h0.standardized().values
    return np.asarray(h0, dtype=np.float64)


def fit_gnn(
    net: MobilityNetwork,
    h0: Union[EmbeddingMatrix, np.ndarray],
    target: np.ndarray,
    train_idx: np.ndarray,
    config: Optional[GnnConfig] = None,
) -> GnnModel:
    """Train one model on ``train_idx``; returns it with ``trained`` set.

    Raises
    ------
    ValueError
        Empty training set, missing or constant training targets.
    NonFiniteError
        Loss or parameters became non-finite; the message names the epoch.
    """
    config = config or GnnConfig()
    x = _input_values(h0)
    target = np.asarray(target, dtype=np.float64).ravel()
    if x.shape[0] != net.n or target.size != net.n:
        raise ValueError(f"H0 rows {x.shape[0]} / target length {target.size} must equal N={net.n}")
    train_idx = np.asarray(train_idx, dtype=np.int64)
    if train_idx.size == 0:
        raise ValueError("training mask is empty")
    y_train = target[train_idx]
    if not np.isfinite(y_train).all():
        raise ValueError("every training node needs a non-missing target")

    model = GnnModel(net, x.shape[1], config)
    model.h0 = x
    model.y_mean = float(y_train.mean())
    y_std = float(y_train.std())
    model.y_std = y_std if y_std > 0 else 1.0

    if config.masked_loss:
        loss_mask = np.zeros(net.n, dtype=bool)
        loss_mask[train_idx] = True
    else:
        loss_mask = np.isfinite(target)
    z = np.where(np.isfinite(target), (target - model.y_mean) / model.y_std, 0.0).reshape(-1, 1)

    rng = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(1)[0])
    opt = OptimizerState(kind=config.optimizer, lr=config.lr, weight_decay=config.weight_decay)
    for epoch in range(config.epochs):
        out = model.forward(x, training=True, rng=rng)
        loss = mse(out.predictions, z, mask=loss_mask)
        check_finite(loss, where=f"{config.layer_kind} training loss (epoch {epoch})")
        backward(loss)
        optimizer_step(opt, model.params)
        model.loss_trace.append(loss.item())
    model.params.check_finite()
    model.trained = True
    if model.loss_trace:
        logger.info("%s trained %d epochs on %d nodes: train loss %.4g -> %.4g", config.layer_kind.upper(),
                    config.epochs, train_idx.size, model.loss_trace[0], model.loss_trace[-1])
    return model


def train_end_to_end(
    net: MobilityNetwork,
    h0: Union[EmbeddingMatrix, np.ndarray],
    target: np.ndarray,
    split: SplitPlan,
    config: Optional[GnnConfig] = None,
    city: str = "",
    init: str = "-",
) -> Tuple[GnnModel, EvalReport]:
    """Train on every fold of ``split`` and report out-of-sample R².

    Returns the model of the last fold together with the report; R² is the
    mean over folds (a holdout plan has one fold).
    """
    config = config or GnnConfig()
    started = time.perf_counter()
    target = np.asarray(target, dtype=np.float64).ravel()
    models = []

    def _fold(train_idx, test_idx):
        model = fit_gnn(net, h0, target, train_idx, config)
        models.append(model)
        return target[test_idx], model.predict()[test_idx]

    scores = cross_validate(split, _fold)
    model = models[-1]
    d = h0.d if isinstance(h0, EmbeddingMatrix) else np.shape(h0)[1]
    method = f"{config.layer_kind}_vnn"
    logger.info("%s (%s, d=%d, seed=%d): R² %.4f", method, init, d, config.seed, scores.r2)
    report = EvalReport(
        city=city, method=method, init=init, d=d, split=split.kind, seeds=[config.seed],
        r2_per_seed=[scores.r2], r2_mean=scores.r2, n_train=scores.n_train, n_test=scores.n_test,
        runtime_s=time.perf_counter() - started,
        y_true=scores.y_true.tolist(), y_pred=scores.y_pred.tolist(), loss_trace=list(model.loss_trace),
    )
    return model, report


def extract_hidden(
    model: GnnModel,
    layer: int = 2,
    h0: Optional[Union[EmbeddingMatrix, np.ndarray]] = None,
    allow_untrained: bool = False,
) -> EmbeddingMatrix:
    """H¹ or H² of a model as an embedding table (method ``gnn_hidden``).

    Raises
    ------
    ValueError
        Model untrained (unless ``allow_untrained``), no input given for an
        untrained model, or ``layer`` not in {1, 2}.
    """
    if layer not in (1, 2):
        raise ValueError(f"layer must be 1 or 2, got {layer}")
    if not model.trained and not allow_untrained:
        raise ValueError("model is untrained; train it first or pass allow_untrained=True")
    x = model.h0 if h0 is None else _input_values(h0)
    if x is None:
        raise ValueError("no input embedding available for an untrained model")
    state = model.forward(x).state
    return EmbeddingMatrix(values=state.hidden[layer], method="gnn_hidden", geoids=model.geoids)
