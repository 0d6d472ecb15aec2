"""
Differentiable primitives.

Each op computes its forward value with numpy and records the closure
returning one gradient per parent (None for constants). Elementwise
binary ops follow numpy broadcasting; gradients are summed back to the
operand shape.

Mobility Analytics Team — 2026-10
"""

from typing import Sequence, Union

import numpy as np
from scipy import sparse

from .tensor import Tensor, as_tensor, record

Operand = Union[Tensor, np.ndarray, float]


def _unbroadcast(grad: np.ndarray, shape) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` (inverse of numpy broadcasting)."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# ── Elementwise arithmetic ───────────────────────────────────────────────────

def add(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def _bw(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return record(a.value + b.value, (a, b), _bw)


def sub(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def _bw(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return record(a.value - b.value, (a, b), _bw)


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def _bw(g):
        return _unbroadcast(g * b.value, a.shape), _unbroadcast(g * a.value, b.shape)

    return record(a.value * b.value, (a, b), _bw)


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    return record(a.value * c, (a,), lambda g: (g * c,))


def square(a: Tensor) -> Tensor:
    return record(a.value ** 2, (a,), lambda g: (2.0 * a.value * g,))


def squared_difference(a: Operand, b: Operand) -> Tensor:
    """(a - b)² elementwise."""
    a, b = as_tensor(a), as_tensor(b)
    diff = a.value - b.value

    def _bw(g):
        gd = 2.0 * diff * g
        return _unbroadcast(gd, a.shape), _unbroadcast(-gd, b.shape)

    return record(diff ** 2, (a, b), _bw)


# ── Linear algebra ───────────────────────────────────────────────────────────

def matmul(a: Operand, b: Operand) -> Tensor:
    """2-D matrix product."""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError(f"matmul needs 2-D operands, got {a.shape} @ {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.shape} @ {b.shape}")

    def _bw(g):
        return g @ b.value.T, a.value.T @ g

    return record(a.value @ b.value, (a, b), _bw)


def spmm(matrix, x: Tensor) -> Tensor:
    """Constant (sparse or dense) matrix times tensor: M @ x."""
    if matrix.shape[1] != x.shape[0]:
        raise ValueError(f"spmm shape mismatch: {matrix.shape} @ {x.shape}")
    value = matrix @ x.value
    value = np.asarray(value.toarray() if sparse.issparse(value) else value)
    mt = matrix.T

    def _bw(g):
        gx = mt @ g
        return (np.asarray(gx.toarray() if sparse.issparse(gx) else gx),)

    return record(value, (x,), _bw)


# ── Activations ──────────────────────────────────────────────────────────────

def relu(x: Tensor) -> Tensor:
    mask = x.value > 0
    return record(np.where(mask, x.value, 0.0), (x,), lambda g: (g * mask,))


def leaky_relu(x: Tensor, negative_slope: float = 0.2) -> Tensor:
    slope = np.where(x.value > 0, 1.0, float(negative_slope))
    return record(x.value * slope, (x,), lambda g: (g * slope,))


def activate(x: Tensor, activation: str) -> Tensor:
    if activation == "relu":
        return relu(x)
    if activation == "linear":
        return x
    if activation == "leaky_relu":
        return leaky_relu(x)
    raise ValueError(f"Unknown activation: {activation!r}. Supported: relu, leaky_relu, linear")


# ── Shape / indexing ─────────────────────────────────────────────────────────

def concat(tensors: Sequence[Tensor], axis: int = 1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def _bw(g):
        return tuple(np.split(g, splits, axis=axis))

    return record(np.concatenate([t.value for t in tensors], axis=axis), tensors, _bw)


def take_rows(x: Tensor, index: np.ndarray) -> Tensor:
    """x[index] along axis 0 (gather); repeated indices accumulate gradient."""
    index = np.asarray(index, dtype=np.int64)
    n = x.shape[0]

    def _bw(g):
        out = np.zeros((n,) + g.shape[1:])
        np.add.at(out, index, g)
        return (out,)

    return record(x.value[index], (x,), _bw)


# ── Reductions ───────────────────────────────────────────────────────────────

def sum_all(x: Tensor) -> Tensor:
    shape = x.shape
    return record(np.array(x.value.sum()), (x,), lambda g: (np.broadcast_to(g, shape).copy(),))


def mean(x: Tensor) -> Tensor:
    shape = x.shape
    n = max(x.size, 1)
    return record(np.array(x.value.mean()), (x,),
                  lambda g: (np.broadcast_to(g / n, shape).copy(),))


def _segment_matrix(segment_ids: np.ndarray, num_segments: int) -> sparse.csr_matrix:
    e = len(segment_ids)
    return sparse.csr_matrix(
        (np.ones(e), (segment_ids, np.arange(e))), shape=(num_segments, e)
    )


def segment_sum(x: Tensor, segment_ids: np.ndarray, num_segments: int) -> Tensor:
    """out[s] = Σ_{k: seg[k]=s} x[k]; rows of x are edges."""
    segment_ids = np.asarray(segment_ids, dtype=np.int64)
    s = _segment_matrix(segment_ids, num_segments)
    value = np.asarray(s @ x.value)
    return record(value, (x,), lambda g: (g[segment_ids],))


def segment_softmax(scores: Tensor, segment_ids: np.ndarray, num_segments: int) -> Tensor:
    """Softmax of edge scores within each destination segment.

    ``scores`` is (E,) or (E, 1); every segment referenced must be non-empty.
    """
    segment_ids = np.asarray(segment_ids, dtype=np.int64)
    flat = scores.value.reshape(len(segment_ids), -1)
    peak = np.full((num_segments, flat.shape[1]), -np.inf)
    np.maximum.at(peak, segment_ids, flat)
    expd = np.exp(flat - peak[segment_ids])
    s = _segment_matrix(segment_ids, num_segments)
    denom = np.asarray(s @ expd)
    y = expd / denom[segment_ids]
    shape = scores.shape

    def _bw(g):
        g = g.reshape(y.shape)
        dot = np.asarray(s @ (g * y))
        return ((y * (g - dot[segment_ids])).reshape(shape),)

    return record(y.reshape(shape), (scores,), _bw)


# ── Regularization ───────────────────────────────────────────────────────────

def dropout(x: Tensor, rate: float, rng: np.random.Generator) -> Tensor:
    """Inverted dropout with a constant mask drawn from ``rng``."""
    if rate <= 0.0:
        return x
    if rate >= 1.0:
        raise ValueError(f"dropout rate must be < 1, got {rate}")
    keep = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return mul(x, keep)
