"""
Edge-reconstruction embedding model: a trainable N x d node table E feeding
an MLP with hidden sizes (4d, 3d, d) and a scalar output.

Mobility Analytics Team — 2026-10
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from config import (
    DEFAULT_SEED,
    LEARNING_RATE,
    OPTIMIZER,
    VNN_BATCH_SIZE,
    VNN_EPOCHS,
    VNN_INIT_NOISE,
    VNN_MIN_REL_IMPROVEMENT,
    VNN_PATIENCE,
    WEIGHT_TRANSFORM,
)
from embeddings import EmbeddingMatrix
from nn_core import ModelParams, mlp_layer_sizes

EMBEDDING_PARAM = "embedding"
RECON_PREFIX = "recon"


@dataclass
class VnnConfig:
    """Training configuration for :func:`train_vnn_embedding`."""
    epochs: int = VNN_EPOCHS
    batch_size: int = VNN_BATCH_SIZE
    optimizer: str = OPTIMIZER
    lr: float = LEARNING_RATE
    weight_decay: float = 0.0
    seed: int = DEFAULT_SEED
    weight_transform: str = WEIGHT_TRANSFORM
    sampling: str = "auto"                  # all_pairs | balanced | auto (balanced above N=600)
    patience: int = VNN_PATIENCE            # epochs without relative improvement before stopping
    min_rel_improvement: float = VNN_MIN_REL_IMPROVEMENT
    init_noise: float = VNN_INIT_NOISE      # uniform ±noise for padded / random columns
    directed: bool = False                  # [e_i | e_j] features against the unsymmetrized target

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


def reconstruction_hidden(d: int) -> Tuple[int, int, int]:
    return (4 * d, 3 * d, d)


@dataclass
class VnnEmbedModel:
    params: ModelParams
    d: int
    n: int
    config: VnnConfig
    geoids: Optional[Tuple[str, ...]] = None
    loss_trace: List[float] = field(default_factory=list)
    initial_mse: float = float("nan")
    final_mse: float = float("nan")
    epochs_run: int = 0
    init_method: str = "random"

    @property
    def spec(self) -> List[int]:
        width = 2 * self.d if self.config.directed else self.d
        return mlp_layer_sizes(width, reconstruction_hidden(self.d), 1)

    @property
    def hidden_sizes(self) -> Tuple[int, int, int]:
        return reconstruction_hidden(self.d)

    @property
    def embedding_values(self) -> np.ndarray:
        return self.params[EMBEDDING_PARAM].value

    def embedding(self) -> EmbeddingMatrix:
        """Learned E as an embedding table (method ``vnn_trained``)."""
        return EmbeddingMatrix(values=self.embedding_values.copy(), method="vnn_trained", geoids=self.geoids)

    def metadata(self) -> dict:
        return {
            "kind": "vnn_embed", "d": self.d, "n": self.n, "init": self.init_method,
            "directed": self.config.directed, "weight_transform": self.config.weight_transform,
            "initial_mse": self.initial_mse, "final_mse": self.final_mse,
            "epochs_run": self.epochs_run,
        }
