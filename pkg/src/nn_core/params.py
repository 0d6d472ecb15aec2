"""
Named parameter registry.

Mobility Analytics Team — 2026-10
"""

import math
from typing import Dict, Iterator, List, Tuple

import numpy as np

from .tensor import Tensor, check_finite


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    """Uniform in ±sqrt(6 / (fan_in + fan_out))."""
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class ModelParams:
    """Ordered set of uniquely named trainable tensors.

    Each parameter owns a ``grad`` slot of its own shape; the slot is None
    until backward() fills it and is cleared again by the optimizer.
    """

    def __init__(self):
        self._tensors: Dict[str, Tensor] = {}

    def add(self, name: str, value) -> Tensor:
        if name in self._tensors:
            raise ValueError(f"Duplicate parameter name: {name!r}")
        t = Tensor(np.array(value, dtype=np.float64, copy=True), requires_grad=True, name=name)
        self._tensors[name] = t
        return t

    def __getitem__(self, name: str) -> Tensor:
        try:
            return self._tensors[name]
        except KeyError:
            raise KeyError(f"Unknown parameter: {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def items(self) -> List[Tuple[str, Tensor]]:
        return list(self._tensors.items())

    def names(self) -> List[str]:
        return list(self._tensors)

    def num_values(self) -> int:
        return int(sum(t.size for t in self._tensors.values()))

    def zero_grad(self):
        for t in self._tensors.values():
            t.grad = None

    def check_finite(self):
        for name, t in self._tensors.items():
            check_finite(t, where=f"parameter {name}")

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: t.value.copy() for name, t in self._tensors.items()}

    def load_state_dict(self, state: Dict[str, np.ndarray]):
        for name, value in state.items():
            if name not in self._tensors:
                raise KeyError(f"Unknown parameter in state: {name!r}")
            if self._tensors[name].shape != np.shape(value):
                raise ValueError(
                    f"Shape mismatch for {name}: {self._tensors[name].shape} vs {np.shape(value)}"
                )
            self._tensors[name].value = np.array(value, dtype=np.float64, copy=True)

    @classmethod
    def from_state_dict(cls, state: Dict[str, np.ndarray]) -> "ModelParams":
        params = cls()
        for name, value in state.items():
            params.add(name, value)
        return params
