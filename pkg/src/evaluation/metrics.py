"""
Out-of-sample scoring.

Mobility Analytics Team — 2026-10
"""

import numpy as np


def r_squared(y, y_hat) -> float:
    """Coefficient of determination, 1 - SS_res / SS_tot, with ȳ the mean of ``y``.

    Raises
    ------
    ValueError
        Lengths differ, fewer than 2 values, non-finite input, or ``y`` is
        constant (SS_tot = 0).
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    y_hat = np.asarray(y_hat, dtype=np.float64).ravel()
    if y.shape != y_hat.shape:
        raise ValueError(f"r_squared length mismatch: {y.size} vs {y_hat.size}")
    if y.size < 2:
        raise ValueError("r_squared needs at least 2 values")
    if not (np.isfinite(y).all() and np.isfinite(y_hat).all()):
        raise ValueError("r_squared inputs must be finite")
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0 or np.ptp(y) == 0.0:
        raise ValueError("r_squared undefined: observed values are constant")
    ss_res = float(((y - y_hat) ** 2).sum())
    return 1.0 - ss_res / ss_tot
