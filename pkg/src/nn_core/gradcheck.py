"""
Finite-difference gradient checking.

Mobility Analytics Team — 2026-10
"""

from typing import Callable, Dict, Iterable, Union

import numpy as np

from .params import ModelParams
from .tensor import Tensor, backward


def gradient_check(
    loss_fn: Callable[[], Tensor],
    params: Union[ModelParams, Iterable[Tensor]],
    h: float = 1e-5,
    floor: float = 1e-5,
) -> Dict[str, float]:
    """Compare analytic gradients with central differences.

    ``loss_fn`` must rebuild the graph from the current parameter values on
    every call. Returns the max elementwise relative error per parameter,
    |analytic - numeric| / max(|analytic|, |numeric|, floor).
    """
    tensors = [t for _, t in params.items()] if isinstance(params, ModelParams) else list(params)
    for t in tensors:
        t.grad = None
    loss = loss_fn()
    backward(loss)
    analytic = [t.grad.copy() if t.grad is not None else np.zeros_like(t.value) for t in tensors]

    errors = {}
    for k, (t, grad) in enumerate(zip(tensors, analytic)):
        numeric = np.zeros_like(t.value)
        flat = t.value.reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + h
            f_plus = loss_fn().item()
            flat[idx] = orig - h
            f_minus = loss_fn().item()
            flat[idx] = orig
            numeric.reshape(-1)[idx] = (f_plus - f_minus) / (2.0 * h)
        denom = np.maximum(np.maximum(np.abs(grad), np.abs(numeric)), floor)
        errors[t.name or f"param{k}"] = float(np.max(np.abs(grad - numeric) / denom)) if t.size else 0.0
        t.grad = None
    return errors
