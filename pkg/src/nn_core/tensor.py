"""
Tape-based reverse-mode differentiation.

Every recorded operation produces a Tensor that remembers its parents and a
closure mapping the output gradient to parent gradients. Tensors carry a
monotonically increasing sequence number, so the recording order is a
valid topological order: backward() walks the reachable nodes from the loss
in descending sequence order (the tape, reversed), accumulates gradients
into leaf parameters, then frees the graph.

Mobility Analytics Team — 2026-10
"""

import itertools
import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

_SEQUENCE = itertools.count()


class GraphStateError(RuntimeError):
    """Autodiff misuse: non-scalar backward, backward on a freed graph."""


class NonFiniteError(FloatingPointError):
    """A loss or parameter became NaN/Inf during training."""


class Tensor:
    """Dense float64 array node of the computation graph."""

    __array_priority__ = 100

    def __init__(self, value, requires_grad: bool = False, name: Optional[str] = None):
        self.value = np.array(value, dtype=np.float64)
        self.requires_grad = requires_grad
        self.name = name
        self.grad: Optional[np.ndarray] = None
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]] = None
        self._freed = False
        self._seq = next(_SEQUENCE)

    # ── Introspection ────────────────────────────────────────────────────────

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    @property
    def size(self) -> int:
        return self.value.size

    @property
    def is_leaf(self) -> bool:
        return self._backward is None

    def item(self) -> float:
        if self.value.size != 1:
            raise ValueError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.value.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.value.copy()

    def detach(self) -> "Tensor":
        return Tensor(self.value)

    def __repr__(self):
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{label})"

    # ── Operator sugar (delegates to ops) ────────────────────────────────────

    def __add__(self, other):
        from .ops import add
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from .ops import sub
        return sub(self, other)

    def __rsub__(self, other):
        from .ops import sub
        return sub(other, self)

    def __mul__(self, other):
        from .ops import mul
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        from .ops import scale
        return scale(self, -1.0)

    def __matmul__(self, other):
        from .ops import matmul
        return matmul(self, other)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def record(value: np.ndarray, parents: Sequence[Tensor], backward_fn) -> Tensor:
    """Create an op output; records the backward closure only when needed."""
    out = Tensor(value)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward = backward_fn
    return out


def check_finite(t: Tensor, where: str = "tensor"):
    if not np.all(np.isfinite(t.value)):
        bad = int(np.size(t.value) - np.isfinite(t.value).sum())
        raise NonFiniteError(f"{where}: {bad} non-finite values (name={t.name!r})")


def backward(loss: Tensor):
    """Populate .grad of every requires_grad leaf reachable from ``loss``.

    Gradients accumulate into existing ``.grad`` slots. The recorded graph
    is freed afterwards; a second call on the same loss raises.
    """
    if loss.value.size != 1:
        raise GraphStateError(f"backward needs a scalar loss, got shape {loss.shape}")
    if loss._freed:
        raise GraphStateError("graph already freed by a previous backward(); re-run the forward pass")
    if not loss.requires_grad:
        raise GraphStateError("loss does not depend on any parameter that requires grad")

    nodes = {}
    stack = [loss]
    while stack:
        t = stack.pop()
        if id(t) in nodes:
            continue
        nodes[id(t)] = t
        stack.extend(t._parents)
    tape = sorted(nodes.values(), key=lambda t: t._seq, reverse=True)

    grads = {id(loss): np.ones_like(loss.value)}
    for t in tape:
        g = grads.pop(id(t), None)
        if g is None:
            continue
        if t._backward is None:
            if t.requires_grad:
                t.grad = g.copy() if t.grad is None else t.grad + g
            continue
        for parent, pg in zip(t._parents, t._backward(g)):
            if pg is None or not parent.requires_grad:
                continue
            key = id(parent)
            grads[key] = pg if key not in grads else grads[key] + pg

    for t in tape:
        if t._backward is not None:
            t._parents = ()
            t._backward = None
            t._freed = True
