"""
Graph convolution and graph attention layers on nn_core tensors.

GCN:  H' = σ(Â H W + B)
GAT:  per head k, z = H W_k; s_ij = LeakyReLU(a_dstᵀ z_i + a_srcᵀ z_j) over
      j ∈ N(i); α_ij = softmax_j(s_ij); h'_i = Σ_j α_ij z_j.
      Heads are concatenated or averaged, then σ is applied.

Mobility Analytics Team — 2026-10
"""

import logging
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from config import GAT_NEGATIVE_SLOPE
from graph import NormalizedAdjacency
from nn_core import Tensor, as_tensor, ops

logger = logging.getLogger(__name__)

COMBINE_MODES = ("concat", "average")


def gcn_layer(
    h_prev: Tensor,
    a_hat: Union[NormalizedAdjacency, np.ndarray, sparse.spmatrix],
    w: Tensor,
    b: Tensor,
    activation: str = "relu",
) -> Tensor:
    """σ(Â · H_prev · W + B)."""
    h_prev, w, b = as_tensor(h_prev), as_tensor(w), as_tensor(b)
    matrix = a_hat.matrix if isinstance(a_hat, NormalizedAdjacency) else a_hat
    if matrix.shape != (h_prev.shape[0], h_prev.shape[0]):
        raise ValueError(f"gcn_layer: Â {matrix.shape} does not match {h_prev.shape[0]} nodes")
    if w.shape[0] != h_prev.shape[1]:
        raise ValueError(f"gcn_layer: W {w.shape} does not match input width {h_prev.shape[1]}")
    if b.shape not in ((w.shape[1],), (1, w.shape[1])):
        raise ValueError(f"gcn_layer: B {b.shape} does not match output width {w.shape[1]}")
    return ops.activate(ops.add(ops.matmul(ops.spmm(matrix, h_prev), w), b), activation)


def check_neighborhoods(dst: np.ndarray, n: int):
    counts = np.bincount(dst, minlength=n)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise ValueError(f"gat_layer: nodes {empty[:10].tolist()} have an empty neighborhood (no self-loop)")


def gat_head(
    h_prev: Tensor,
    edges: Tuple[np.ndarray, np.ndarray],
    n: int,
    w: Tensor,
    att_src: Tensor,
    att_dst: Tensor,
    negative_slope: float = GAT_NEGATIVE_SLOPE,
) -> Tuple[Tensor, np.ndarray]:
    """One attention head; returns (N x h' aggregate, α per edge)."""
    dst, src = edges
    z = ops.matmul(h_prev, w)
    score = ops.add(ops.take_rows(ops.matmul(z, att_dst), dst),
                    ops.take_rows(ops.matmul(z, att_src), src))
    score = ops.leaky_relu(score, negative_slope)
    alpha = ops.segment_softmax(score, dst, n)
    messages = ops.mul(ops.take_rows(z, src), alpha)
    return ops.segment_sum(messages, dst, n), alpha.value.ravel().copy()


def gat_layer(
    h_prev: Tensor,
    edges: Tuple[np.ndarray, np.ndarray],
    weights: Sequence[Tensor],
    att_src: Sequence[Tensor],
    att_dst: Sequence[Tensor],
    activation: str = "relu",
    combine: str = "concat",
    negative_slope: float = GAT_NEGATIVE_SLOPE,
) -> Tuple[Tensor, np.ndarray]:
    """K-head attention layer.

    Parameters
    ----------
    h_prev : N x h input
    edges : (dst, src) from :func:`graph.edge_index`; every node needs >= 1 incoming edge
    weights, att_src, att_dst : per-head W (h x h'), a_src (h' x 1), a_dst (h' x 1)
    combine : "concat" (width K·h') or "average" (width h')

    Returns
    -------
    (output tensor, E x K attention coefficients)
    """
    h_prev = as_tensor(h_prev)
    if combine not in COMBINE_MODES:
        raise ValueError(f"Unknown head combine mode: {combine!r}. Supported: {COMBINE_MODES}")
    if not weights or not (len(weights) == len(att_src) == len(att_dst)):
        raise ValueError("gat_layer needs K >= 1 heads with matching W / a_src / a_dst")
    n = h_prev.shape[0]
    dst = np.asarray(edges[0], dtype=np.int64)
    src = np.asarray(edges[1], dtype=np.int64)
    check_neighborhoods(dst, n)
    for k, w in enumerate(weights):
        if w.shape[0] != h_prev.shape[1]:
            raise ValueError(f"gat_layer head {k}: W {w.shape} does not match input width {h_prev.shape[1]}")

    outs: List[Tensor] = []
    alphas = []
    for w, a_s, a_d in zip(weights, att_src, att_dst):
        out, alpha = gat_head(h_prev, (dst, src), n, w, a_s, a_d, negative_slope)
        outs.append(out)
        alphas.append(alpha)

    if combine == "concat":
        combined = outs[0] if len(outs) == 1 else ops.concat(outs, axis=1)
    else:
        combined = outs[0]
        for out in outs[1:]:
            combined = ops.add(combined, out)
        combined = ops.scale(combined, 1.0 / len(outs))
    return ops.activate(combined, activation), np.column_stack(alphas)
