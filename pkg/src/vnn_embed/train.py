"""
Joint training of node embeddings and the reconstruction MLP.

Loss per batch: mean over pairs of (Ã_ij - f((e_i - e_j)²))², gradients flow
into both the MLP weights and the rows of E.

Mobility Analytics Team — 2026-10
"""

import logging
from typing import Optional

import numpy as np

from embeddings import EmbeddingMatrix
from graph import MobilityNetwork
from nn_core import (
    ModelParams,
    OptimizerState,
    backward,
    check_finite,
    init_mlp,
    mlp_forward,
    mse,
    optimizer_step,
)
from .model import EMBEDDING_PARAM, RECON_PREFIX, VnnConfig, VnnEmbedModel
from .pairs import epoch_pairs, pair_features, reconstruction_target, resolve_sampling

logger = logging.getLogger(__name__)

_EVAL_CHUNK = 65536


def initial_embedding(
    init: Optional[EmbeddingMatrix],
    n: int,
    d: int,
    rng: np.random.Generator,
    noise: float,
) -> np.ndarray:
    """Copy min(d, d_init) columns of ``init``; fill the rest with uniform ±noise."""
    values = rng.uniform(-noise, noise, size=(n, d))
    if init is None:
        return values
    if init.n != n:
        raise ValueError(f"initial embedding has {init.n} rows, network has {n} nodes")
    width = min(d, init.d)
    values[:, :width] = init.values[:, :width]
    if init.d > d:
        logger.info("Initial %s embedding has d=%d; keeping the first %d columns", init.method, init.d, d)
    return values


def build_model(
    net: MobilityNetwork,
    d: int,
    init: Optional[EmbeddingMatrix] = None,
    config: Optional[VnnConfig] = None,
) -> VnnEmbedModel:
    """Untrained model: E initialized from ``init`` (or noise) plus Glorot MLP weights."""
    if d < 1:
        raise ValueError(f"embedding dimension d must be >= 1, got {d}")
    config = config or VnnConfig()
    rng = np.random.default_rng(config.seed)
    params = ModelParams()
    params.add(EMBEDDING_PARAM, initial_embedding(init, net.n, d, rng, config.init_noise))
    model = VnnEmbedModel(params=params, d=d, n=net.n, config=config, geoids=net.geoids,
                          init_method=init.method if init is not None else "random")
    init_mlp(params, RECON_PREFIX, model.spec, rng)
    return model


def _pair_loss(model: VnnEmbedModel, target: np.ndarray, i: np.ndarray, j: np.ndarray):
    x = pair_features(model.params[EMBEDDING_PARAM], i, j, directed=model.config.directed)
    pred = mlp_forward(model.params, x, model.spec, prefix=RECON_PREFIX)
    return mse(pred, target[i, j].reshape(-1, 1))


def reconstruction_mse(model: VnnEmbedModel, net: Optional[MobilityNetwork] = None,
                       target: Optional[np.ndarray] = None) -> float:
    """Full-enumeration loss (1/N²) ΣΣ (Ã_ij - Â_ij)² at the current parameters."""
    if target is None:
        if net is None:
            raise ValueError("reconstruction_mse needs a network or a target matrix")
        target = reconstruction_target(net, model.config.weight_transform, directed=model.config.directed)
    n = target.shape[0]
    total = 0.0
    for start in range(0, n * n, _EVAL_CHUNK):
        flat = np.arange(start, min(start + _EVAL_CHUNK, n * n))
        loss = _pair_loss(model, target, flat // n, flat % n)
        total += loss.item() * flat.size
    return total / (n * n)


def train_vnn_embedding(
    net: MobilityNetwork,
    init: Optional[EmbeddingMatrix],
    d: int,
    config: Optional[VnnConfig] = None,
) -> VnnEmbedModel:
    """Learn E by reconstructing the transformed (symmetrized) O-D matrix.

    Parameters
    ----------
    net : mobility network
    init : starting embedding (columns copied, remainder padded) or None for noise
    d : learned embedding width
    config : epochs, batching, optimizer and early-stop settings

    Raises
    ------
    NonFiniteError
        A batch loss or parameter became NaN/inf; the message names the epoch.
    """
    config = config or VnnConfig()
    model = build_model(net, d, init, config)
    target = reconstruction_target(net, config.weight_transform, directed=config.directed)
    sampling = resolve_sampling(config.sampling, net.n)
    rng = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(1)[0])
    opt = OptimizerState(kind=config.optimizer, lr=config.lr, weight_decay=config.weight_decay)

    model.initial_mse = reconstruction_mse(model, target=target)
    logger.info("VNN embedding d=%d on %d nodes (%s, init=%s): initial MSE %.5g",
                d, net.n, sampling, model.init_method, model.initial_mse)

    best = np.inf
    stale = 0
    for epoch in range(config.epochs):
        i, j = epoch_pairs(target, sampling, rng)
        total = 0.0
        for start in range(0, i.size, config.batch_size):
            bi, bj = i[start:start + config.batch_size], j[start:start + config.batch_size]
            loss = _pair_loss(model, target, bi, bj)
            check_finite(loss, where=f"reconstruction loss (epoch {epoch})")
            backward(loss)
            optimizer_step(opt, model.params)
            total += loss.item() * bi.size
        model.params.check_finite()
        epoch_loss = total / max(i.size, 1)
        model.loss_trace.append(epoch_loss)
        model.epochs_run = epoch + 1

        if epoch_loss < best * (1.0 - config.min_rel_improvement):
            best = epoch_loss
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                logger.warning("VNN embedding early stop at epoch %d (loss %.5g)", epoch + 1, epoch_loss)
                break

    model.final_mse = reconstruction_mse(model, target=target)
    logger.info("VNN embedding trained %d epochs: MSE %.5g -> %.5g",
                model.epochs_run, model.initial_mse, model.final_mse)
    return model
