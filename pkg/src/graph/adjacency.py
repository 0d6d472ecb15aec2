"""
Adjacency materialization and propagation operators.

    T(A)   elementwise weight transform (raw / log1p / binary)
    Ã      ½(T(A) + T(A)ᵀ) when symmetrized, plus I when self-loops are added
    Â      D^{-1/2} Ã D^{-1/2},  D = diag(row sums of Ã)

Mobility Analytics Team — 2026-10
"""

import logging
from dataclasses import dataclass
from typing import Set, Tuple, Union

import numpy as np
from scipy import sparse

from config import SYMMETRIZE, WEIGHT_TRANSFORM
from .network import MobilityNetwork

logger = logging.getLogger(__name__)

WEIGHT_TRANSFORMS = ("raw", "log1p", "binary")

Matrix = Union[np.ndarray, sparse.spmatrix]


@dataclass(frozen=True)
class NormalizedAdjacency:
    """Symmetric-normalized propagation matrix. Read-only after construction."""
    matrix: Matrix                  # N x N, csr or dense
    symmetrized: bool
    self_loops_added: bool
    weight_transform: str

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        if sparse.issparse(self.matrix):
            return self.matrix.toarray()
        return np.asarray(self.matrix)


def transform_weights(adjacency: Matrix, weight_transform: str = WEIGHT_TRANSFORM) -> Matrix:
    """Apply the weight transform elementwise (zeros stay zero)."""
    if weight_transform not in WEIGHT_TRANSFORMS:
        raise ValueError(
            f"Unknown weight transform: {weight_transform!r}. Supported: {WEIGHT_TRANSFORMS}"
        )
    if sparse.issparse(adjacency):
        out = adjacency.astype(np.float64).tocsr(copy=True)
        if weight_transform == "log1p":
            out.data = np.log1p(out.data)
        elif weight_transform == "binary":
            out.data = (out.data != 0).astype(np.float64)
        out.eliminate_zeros()
        return out
    out = np.asarray(adjacency, dtype=np.float64)
    if weight_transform == "log1p":
        return np.log1p(out)
    if weight_transform == "binary":
        return (out != 0).astype(np.float64)
    return out.copy()


def propagation_matrix(
    net: MobilityNetwork,
    symmetrize: bool = SYMMETRIZE,
    weight_transform: str = WEIGHT_TRANSFORM,
    self_loops: bool = True,
    dense: bool = False,
) -> Matrix:
    """Ã: transformed, optionally symmetrized, optionally self-looped."""
    a = transform_weights(net.adjacency, weight_transform)
    if symmetrize:
        a = 0.5 * (a + a.T)
    if self_loops:
        a = a + sparse.identity(net.n, dtype=np.float64, format="csr")
    a = sparse.csr_matrix(a)
    a.sort_indices()
    return a.toarray() if dense else a


def degree_matrix(
    net: MobilityNetwork,
    weighted: bool = True,
    symmetrize: bool = SYMMETRIZE,
    self_loops: bool = True,
    weight_transform: str = "raw",
) -> np.ndarray:
    """Degree vector d_i = Σ_j Ã[i][j].

    ``weighted=False`` counts neighbors (binary transform). All entries are
    positive when self-loops are included.
    """
    transform = weight_transform if weighted else "binary"
    a = propagation_matrix(net, symmetrize=symmetrize, weight_transform=transform,
                           self_loops=self_loops)
    if not weighted:
        return np.asarray((a > 0).sum(axis=1), dtype=np.float64).ravel()
    return np.asarray(a.sum(axis=1)).ravel()


def normalize_adjacency(
    net: MobilityNetwork,
    symmetrize: bool = SYMMETRIZE,
    weight_transform: str = WEIGHT_TRANSFORM,
    dense: bool = False,
) -> NormalizedAdjacency:
    """Build Â = D^{-1/2}(T(A) [sym] + I)D^{-1/2}.

    Parameters
    ----------
    net : MobilityNetwork
    symmetrize : bool
        Replace T(A) by ½(T(A) + T(A)ᵀ) before adding self-loops.
    weight_transform : str
        'raw', 'log1p', or 'binary'.
    dense : bool
        Return a dense ndarray instead of csr (both paths agree to 1e-12).

    Returns
    -------
    NormalizedAdjacency
    """
    a = propagation_matrix(net, symmetrize=symmetrize, weight_transform=weight_transform,
                           self_loops=True)
    deg = np.asarray(a.sum(axis=1)).ravel()
    inv_sqrt = 1.0 / np.sqrt(deg)
    scale = sparse.diags(inv_sqrt)
    a_hat = (scale @ a @ scale).tocsr()
    if symmetrize:
        # force bitwise symmetry
        a_hat = (0.5 * (a_hat + a_hat.T)).tocsr()
    a_hat.sort_indices()
    return NormalizedAdjacency(
        matrix=a_hat.toarray() if dense else a_hat,
        symmetrized=symmetrize,
        self_loops_added=True,
        weight_transform=weight_transform,
    )


def neighborhood(
    net: MobilityNetwork,
    i: int,
    symmetrized: bool = SYMMETRIZE,
    self_loops: bool = True,
) -> Set[int]:
    """{j : Ã[i][j] > 0}; includes i when self-loops are active."""
    if not 0 <= i < net.n:
        raise IndexError(f"node index {i} out of range for {net.n} nodes")
    a = propagation_matrix(net, symmetrize=symmetrized, weight_transform="binary",
                           self_loops=self_loops)
    row = a.getrow(i)
    return {int(j) for j, v in zip(row.indices, row.data) if v > 0}


def edge_index(
    net: MobilityNetwork,
    symmetrize: bool = SYMMETRIZE,
    self_loops: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """Message-passing topology as (dst, src) arrays sorted by destination.

    Edge k carries a message from node src[k] into node dst[k]; the
    neighborhood of i is src[dst == i].
    """
    a = propagation_matrix(net, symmetrize=symmetrize, weight_transform="binary",
                           self_loops=self_loops).tocoo()
    keep = a.data > 0
    dst, src = a.row[keep], a.col[keep]
    order = np.lexsort((src, dst))
    return dst[order].astype(np.int64), src[order].astype(np.int64)
