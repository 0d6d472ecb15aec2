"""
Loss functions.

Mobility Analytics Team — 2026-10
"""

from typing import Optional

import numpy as np

from .ops import mean, squared_difference, take_rows
from .tensor import Tensor, as_tensor


def mse(pred, target, mask: Optional[np.ndarray] = None) -> Tensor:
    """Mean squared error over the unmasked leading-dimension rows.

    Parameters
    ----------
    pred, target : Tensor or array
        Equal shapes.
    mask : np.ndarray of bool, optional
        Length = leading dimension; only True rows enter the mean.
    """
    pred, target = as_tensor(pred), as_tensor(target)
    if pred.shape != target.shape:
        raise ValueError(f"mse shape mismatch: {pred.shape} vs {target.shape}")
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (pred.shape[0],):
            raise ValueError(f"mask length {mask.shape} != leading dimension {pred.shape[0]}")
        rows = np.flatnonzero(mask)
        if rows.size == 0:
            raise ValueError("mse mask selects no entries")
        pred, target = take_rows(pred, rows), take_rows(target, rows)
    return mean(squared_difference(pred, target))
