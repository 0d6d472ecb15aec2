#!/usr/bin/env python3
"""
Minimal dense-tensor engine
===========================

Tape-based reverse-mode differentiation over float64 numpy arrays, MLP
layers, losses, optimizers and checkpoints: the substrate for the
edge-reconstruction embedding and the graph models.

Public API:
-----------
    Tensor, backward            - recorded computation and reverse pass
    ModelParams                 - named trainable tensors
    mlp_forward, init_mlp       - dense stacks
    mse                         - (masked) mean squared error
    OptimizerState, optimizer_step - sgd / adam
    save_checkpoint, load_checkpoint
    gradient_check              - finite-difference verification
"""

from . import ops
from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import gradient_check
from .layers import init_mlp, mlp_forward, mlp_layer_sizes
from .losses import mse
from .optim import OPTIMIZERS, OptimizerState, optimizer_step
from .params import ModelParams, glorot_uniform
from .tensor import GraphStateError, NonFiniteError, Tensor, as_tensor, backward, check_finite

__all__ = [
    'GraphStateError',
    'ModelParams',
    'NonFiniteError',
    'OPTIMIZERS',
    'OptimizerState',
    'Tensor',
    'as_tensor',
    'backward',
    'check_finite',
    'glorot_uniform',
    'gradient_check',
    'init_mlp',
    'load_checkpoint',
    'mlp_forward',
    'mlp_layer_sizes',
    'mse',
    'ops',
    'optimizer_step',
    'save_checkpoint',
]
