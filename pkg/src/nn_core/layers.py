"""
Multilayer perceptron built from nn_core primitives.

Mobility Analytics Team — 2026-10
"""

from typing import List, Optional, Sequence

import numpy as np

from .ops import activate, add, dropout, matmul
from .params import ModelParams, glorot_uniform
from .tensor import Tensor, as_tensor


def init_mlp(params: ModelParams, prefix: str, sizes: Sequence[int], rng: np.random.Generator):
    """Register Glorot-uniform weights and zero biases for each layer.

    ``sizes`` is [input, hidden..., output]; names are ``{prefix}.W{l}`` and
    ``{prefix}.b{l}``.
    """
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise ValueError(f"MLP needs >= 2 positive layer sizes, got {list(sizes)}")
    for l, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        params.add(f"{prefix}.W{l}", glorot_uniform(rng, fan_in, fan_out))
        params.add(f"{prefix}.b{l}", np.zeros(fan_out))


def mlp_layer_sizes(input_dim: int, hidden: Sequence[int], output_dim: int = 1) -> List[int]:
    return [int(input_dim)] + [int(h) for h in hidden] + [int(output_dim)]


def mlp_forward(
    params: ModelParams,
    x,
    spec: Sequence[int],
    activation: str = "relu",
    prefix: str = "mlp",
    dropout_rate: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> Tensor:
    """y = L_k(... σ(L_1(x)) ...); σ between hidden layers, linear output.

    Raises
    ------
    ValueError
        Input width or a parameter shape disagrees with ``spec``; the
        message names the layer.
    """
    h = as_tensor(x)
    if h.ndim != 2:
        raise ValueError(f"{prefix}: input must be 2-D (rows x features), got {h.shape}")
    n_layers = len(spec) - 1
    for l in range(n_layers):
        w = params[f"{prefix}.W{l}"]
        b = params[f"{prefix}.b{l}"]
        if w.shape != (spec[l], spec[l + 1]) or b.shape != (spec[l + 1],):
            raise ValueError(
                f"{prefix} layer {l}: parameters {w.shape}/{b.shape} do not match "
                f"spec {spec[l]}->{spec[l + 1]}"
            )
        if h.shape[1] != spec[l]:
            raise ValueError(
                f"{prefix} layer {l}: input width {h.shape[1]} != expected {spec[l]}"
            )
        h = add(matmul(h, w), b)
        if l < n_layers - 1:
            h = activate(h, activation)
            if dropout_rate > 0.0 and rng is not None:
                h = dropout(h, dropout_rate, rng)
    return h
