"""
Spectral node embeddings: truncated SVD of the transformed O-D matrix and
Laplacian eigenvectors of the symmetrized, self-looped graph.

Dense solvers (scipy.linalg) are sufficient at city scale (N <= ~2500).
Sign convention: the largest-magnitude entry of every returned vector is
positive.

Mobility Analytics Team — 2026-10
"""

import logging
from typing import Tuple

import numpy as np
from scipy import linalg

from config import WEIGHT_TRANSFORM
from graph import MobilityNetwork, normalize_adjacency, transform_weights
from .models import EmbeddingMatrix

logger = logging.getLogger(__name__)

ZERO_EIGENVALUE_TOL = 1e-8


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each column's largest-magnitude entry is positive."""
    vectors = np.array(vectors, dtype=np.float64, copy=True)
    if vectors.size == 0:
        return vectors
    pivot = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivot, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def truncated_svd(matrix: np.ndarray, d: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rank-d SVD (U_d, s_d, V_dᵀ) with non-increasing s and fixed signs."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if d < 1 or d > min(matrix.shape):
        raise ValueError(f"SVD rank d={d} must be in 1..{min(matrix.shape)}")
    u, s, vt = linalg.svd(matrix, full_matrices=False, lapack_driver="gesvd")
    u, s, vt = u[:, :d], s[:d], vt[:d]
    flipped = fix_signs(u)
    signs = np.sign(np.sum(flipped * u, axis=0))
    signs[signs == 0] = 1.0
    return flipped, s, vt * signs[:, None]


def svd_embedding(
    net: MobilityNetwork,
    d: int,
    weight_transform: str = WEIGHT_TRANSFORM,
    standardize: bool = False,
) -> EmbeddingMatrix:
    """Rows U_d Σ_d^{1/2} of the rank-d SVD of T(A) (directed O-D matrix)."""
    if d > net.n:
        raise ValueError(f"SVD embedding dimension d={d} exceeds node count {net.n}")
    a = transform_weights(net.adjacency, weight_transform).toarray()
    u, s, _ = truncated_svd(a, d)
    emb = EmbeddingMatrix(values=u * np.sqrt(s), method="svd", geoids=net.geoids, spectrum=s)
    logger.debug("SVD embedding d=%d, top singular value %.4g", d, s[0])
    return emb.standardized() if standardize else emb


def laplacian_spectrum(
    net: MobilityNetwork,
    weight_transform: str = WEIGHT_TRANSFORM,
) -> Tuple[np.ndarray, np.ndarray]:
    """Ascending eigenpairs of L = I - D^{-1/2} Ã D^{-1/2} (symmetrized, self-looped)."""
    a_hat = normalize_adjacency(net, symmetrize=True, weight_transform=weight_transform).dense()
    lap = np.eye(net.n) - a_hat
    lap = 0.5 * (lap + lap.T)
    vals, vecs = linalg.eigh(lap)
    return vals, vecs


def laplacian_embedding(
    net: MobilityNetwork,
    d: int,
    weight_transform: str = WEIGHT_TRANSFORM,
    standardize: bool = False,
) -> EmbeddingMatrix:
    """Eigenvectors for the d smallest nonzero eigenvalues of the normalized Laplacian."""
    if d < 1 or d >= net.n:
        raise ValueError(f"Laplacian embedding dimension d={d} must be in 1..{net.n - 1}")
    vals, vecs = laplacian_spectrum(net, weight_transform)
    nonzero = np.flatnonzero(vals > ZERO_EIGENVALUE_TOL)
    n_zero = net.n - nonzero.size
    if n_zero > 1:
        logger.info("Laplacian has %d zero eigenvalues (%d components)", n_zero, n_zero)
    if nonzero.size < d:
        raise ValueError(
            f"only {nonzero.size} nonzero Laplacian eigenvalues available, requested d={d}"
        )
    pick = nonzero[:d]
    emb = EmbeddingMatrix(values=fix_signs(vecs[:, pick]), method="laplacian",
                          geoids=net.geoids, spectrum=vals[pick])
    return emb.standardized() if standardize else emb
