"""
First-order optimizers: SGD and bias-corrected Adam.

Mobility Analytics Team — 2026-10
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from config import ADAM_BETA1, ADAM_BETA2, ADAM_EPS, LEARNING_RATE, OPTIMIZER
from .params import ModelParams

logger = logging.getLogger(__name__)

OPTIMIZERS = ("sgd", "adam")


@dataclass
class OptimizerState:
    """Optimizer hyperparameters plus per-parameter moment buffers."""
    kind: str = OPTIMIZER
    lr: float = LEARNING_RATE
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPS
    weight_decay: float = 0.0           # L2 coefficient added to gradients
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in OPTIMIZERS:
            raise ValueError(f"Unknown optimizer: {self.kind!r}. Supported: {OPTIMIZERS}")
        if self.lr <= 0:
            raise ValueError(f"learning rate must be positive, got {self.lr}")


def optimizer_step(state: OptimizerState, params: ModelParams) -> Tuple[ModelParams, OptimizerState]:
    """Apply one update in place and clear gradients.

    sgd:  p <- p - lr * g
    adam: m <- β1 m + (1-β1) g,  v <- β2 v + (1-β2) g²,
          p <- p - lr * m̂ / (sqrt(v̂) + ε) with bias-corrected m̂, v̂

    Raises
    ------
    ValueError
        A parameter has no gradient (backward() was not run for it).
    """
    missing = [name for name, t in params.items() if t.grad is None]
    if missing:
        raise ValueError(f"missing gradient for parameters {missing}")

    state.step += 1
    t = state.step
    for name, p in params.items():
        g = p.grad
        if state.weight_decay:
            g = g + state.weight_decay * p.value
        if state.kind == "sgd":
            p.value = p.value - state.lr * g
            continue
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None:
            m = np.zeros_like(p.value)
            v = np.zeros_like(p.value)
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * g * g
        state.m[name], state.v[name] = m, v
        m_hat = m / (1.0 - state.beta1 ** t)
        v_hat = v / (1.0 - state.beta2 ** t)
        p.value = p.value - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    params.zero_grad()
    return params, state
