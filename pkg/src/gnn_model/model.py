"""
Two-layer GCN / GAT encoder with an MLP head.

Mobility Analytics Team — 2026-10
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import (
    DEFAULT_SEED,
    GAT_HEADS,
    GAT_NEGATIVE_SLOPE,
    GNN_EPOCHS,
    GNN_HEAD_HIDDEN,
    GNN_HIDDEN,
    GNN_LR,
    OPTIMIZER,
    SYMMETRIZE,
    WEIGHT_TRANSFORM,
)
from graph import MobilityNetwork, NormalizedAdjacency, edge_index, normalize_adjacency
from nn_core import ModelParams, Tensor, as_tensor, glorot_uniform, init_mlp, mlp_forward, mlp_layer_sizes, ops
from .layers import gat_layer, gcn_layer

logger = logging.getLogger(__name__)

LAYER_KINDS = ("gcn", "gat")
HEAD_PREFIX = "head"


@dataclass
class GnnConfig:
    """Architecture and training settings for the end-to-end model."""
    layer_kind: str = "gcn"
    hidden: Sequence[int] = tuple(GNN_HIDDEN)           # (h1, h2)
    heads: int = GAT_HEADS                              # gat only
    negative_slope: float = GAT_NEGATIVE_SLOPE
    head_hidden: Sequence[int] = tuple(GNN_HEAD_HIDDEN)
    epochs: int = GNN_EPOCHS
    lr: float = GNN_LR
    optimizer: str = OPTIMIZER
    weight_decay: float = 0.0
    dropout: float = 0.0
    masked_loss: bool = True                            # loss over train nodes only
    seed: int = DEFAULT_SEED
    weight_transform: str = WEIGHT_TRANSFORM
    symmetrize: bool = SYMMETRIZE

    def __post_init__(self):
        if self.layer_kind not in LAYER_KINDS:
            raise ValueError(f"Unknown layer kind: {self.layer_kind!r}. Supported: {LAYER_KINDS}")
        self.hidden = tuple(int(h) for h in self.hidden)
        if len(self.hidden) != 2 or min(self.hidden) < 1:
            raise ValueError(f"exactly two positive graph-layer widths required, got {self.hidden}")
        if self.layer_kind == "gat" and self.heads < 1:
            raise ValueError(f"GAT needs heads >= 1, got {self.heads}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must be in [0, 1), got {self.dropout}")

    @property
    def layer1_width(self) -> int:
        return self.hidden[0] * self.heads if self.layer_kind == "gat" else self.hidden[0]

    @property
    def layer2_width(self) -> int:
        return self.hidden[1]


@dataclass
class LayerState:
    """Hidden states H⁰, H¹, H² and (GAT) per-edge attention of layers 1-2."""
    hidden: List[np.ndarray]
    attention: List[np.ndarray] = field(default_factory=list)     # E x K per layer
    edges: Optional[Tuple[np.ndarray, np.ndarray]] = None


@dataclass
class ForwardResult:
    predictions: Tensor                 # N x 1, standardized target scale
    state: LayerState


class GnnModel:
    """Parameters plus the fixed graph operators of one network."""

    def __init__(self, net: MobilityNetwork, input_dim: int, config: GnnConfig):
        self.config = config
        self.input_dim = int(input_dim)
        self.n = net.n
        self.geoids = net.geoids
        self.params = ModelParams()
        self.trained = False
        self.loss_trace: List[float] = []
        self.h0: Optional[np.ndarray] = None
        self.y_mean = 0.0
        self.y_std = 1.0
        self.a_hat: Optional[NormalizedAdjacency] = None
        self.edges: Optional[Tuple[np.ndarray, np.ndarray]] = None
        if config.layer_kind == "gcn":
            self.a_hat = normalize_adjacency(net, symmetrize=config.symmetrize,
                                             weight_transform=config.weight_transform)
        else:
            self.edges = edge_index(net, symmetrize=config.symmetrize, self_loops=True)
        self._init_params(np.random.default_rng(config.seed))

    @property
    def head_spec(self) -> List[int]:
        return mlp_layer_sizes(self.config.layer2_width, self.config.head_hidden, 1)

    def _init_params(self, rng: np.random.Generator):
        c = self.config
        h1, h2 = c.hidden
        if c.layer_kind == "gcn":
            self.params.add("gcn0.W", glorot_uniform(rng, self.input_dim, h1))
            self.params.add("gcn0.b", np.zeros(h1))
            self.params.add("gcn1.W", glorot_uniform(rng, h1, h2))
            self.params.add("gcn1.b", np.zeros(h2))
        else:
            for layer, (fan_in, fan_out) in enumerate(((self.input_dim, h1), (c.layer1_width, h2))):
                for k in range(c.heads):
                    self.params.add(f"gat{layer}.W{k}", glorot_uniform(rng, fan_in, fan_out))
                    self.params.add(f"gat{layer}.att_src{k}", glorot_uniform(rng, fan_out, 1))
                    self.params.add(f"gat{layer}.att_dst{k}", glorot_uniform(rng, fan_out, 1))
        init_mlp(self.params, HEAD_PREFIX, self.head_spec, rng)

    def _gat_params(self, layer: int):
        k_range = range(self.config.heads)
        return ([self.params[f"gat{layer}.W{k}"] for k in k_range],
                [self.params[f"gat{layer}.att_src{k}"] for k in k_range],
                [self.params[f"gat{layer}.att_dst{k}"] for k in k_range])

    def forward(self, h0, training: bool = False, rng: Optional[np.random.Generator] = None) -> ForwardResult:
        """Full-graph forward pass: layer 1 (ReLU), layer 2 (linear), head MLP."""
        h0 = as_tensor(h0)
        if h0.shape != (self.n, self.input_dim):
            raise ValueError(f"H0 shape {h0.shape} != ({self.n}, {self.input_dim})")
        c = self.config
        drop = c.dropout if training and rng is not None else 0.0
        attention = []
        if c.layer_kind == "gcn":
            h1 = gcn_layer(h0, self.a_hat, self.params["gcn0.W"], self.params["gcn0.b"], "relu")
            if drop:
                h1 = ops.dropout(h1, drop, rng)
            h2 = gcn_layer(h1, self.a_hat, self.params["gcn1.W"], self.params["gcn1.b"], "linear")
        else:
            h1, att1 = gat_layer(h0, self.edges, *self._gat_params(0), activation="relu",
                                 combine="concat", negative_slope=c.negative_slope)
            if drop:
                h1 = ops.dropout(h1, drop, rng)
            h2, att2 = gat_layer(h1, self.edges, *self._gat_params(1), activation="linear",
                                 combine="average", negative_slope=c.negative_slope)
            attention = [att1, att2]
        pred = mlp_forward(self.params, h2, self.head_spec, prefix=HEAD_PREFIX,
                           dropout_rate=drop, rng=rng)
        state = LayerState(hidden=[h0.value.copy(), h1.value.copy(), h2.value.copy()],
                           attention=attention, edges=self.edges)
        return ForwardResult(predictions=pred, state=state)

    def predict(self, h0=None) -> np.ndarray:
        """Predictions in original target units for every node."""
        h0 = self.h0 if h0 is None else h0
        out = self.forward(h0).predictions.value.ravel()
        return out * self.y_std + self.y_mean

    def metadata(self) -> dict:
        c = self.config
        return {
            "kind": "gnn", "layer_kind": c.layer_kind, "hidden": list(c.hidden),
            "heads": c.heads, "head_hidden": list(c.head_hidden), "input_dim": self.input_dim,
            "n": self.n, "y_mean": self.y_mean, "y_std": self.y_std, "trained": self.trained,
        }
