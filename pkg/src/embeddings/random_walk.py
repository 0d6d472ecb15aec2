"""
Random-walk structural embeddings.

pagerank_multi_damping: one PageRank vector per damping factor, the
factors linearly spaced over [0.05, 0.95] (0.85 alone when d = 1).
k_step_landing: column c is diag(P^c), the probability that a walk from
each node is back home after c steps.

Nodes with no out-flow (dangling) teleport uniformly.

Mobility Analytics Team — 2026-10
"""

import logging

import numpy as np
from scipy import sparse

from config import PAGERANK_MAX_ITER, PAGERANK_TOL
from graph import MobilityNetwork, transform_weights
from .models import EmbeddingMatrix

logger = logging.getLogger(__name__)

RANDOM_WALK_VARIANTS = ("pagerank_multi_damping", "k_step_landing")


class ConvergenceError(RuntimeError):
    """Power iteration did not reach the residual tolerance."""


def transition_matrix(net: MobilityNetwork, weight_transform: str = "raw"):
    """Row-stochastic P (csr) and the dangling-node mask."""
    a = transform_weights(net.adjacency, weight_transform).tocsr()
    out = np.asarray(a.sum(axis=1)).ravel()
    dangling = out <= 0
    inv = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, out))
    return (sparse.diags(inv) @ a).tocsr(), dangling


def pagerank(
    net: MobilityNetwork,
    alpha: float = 0.85,
    tol: float = PAGERANK_TOL,
    max_iter: int = PAGERANK_MAX_ITER,
    weight_transform: str = "raw",
) -> np.ndarray:
    """Power-iteration PageRank; stops when the L1 change is below ``tol``.

    Raises
    ------
    ConvergenceError
        Residual still above ``tol`` after ``max_iter`` iterations.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"damping factor must be in (0, 1), got {alpha}")
    p, dangling = transition_matrix(net, weight_transform)
    pt = p.T.tocsr()
    n = net.n
    x = np.full(n, 1.0 / n)
    for it in range(1, max_iter + 1):
        leaked = x[dangling].sum()
        nxt = alpha * (pt @ x) + (alpha * leaked + (1.0 - alpha)) / n
        nxt /= nxt.sum()
        resid = np.abs(nxt - x).sum()
        x = nxt
        if resid < tol:
            logger.debug("PageRank alpha=%.3f converged in %d iterations", alpha, it)
            return x
    raise ConvergenceError(
        f"PageRank alpha={alpha} did not converge in {max_iter} iterations (residual {resid:.3g})"
    )


def damping_factors(d: int) -> np.ndarray:
    if d == 1:
        return np.array([0.85])
    return np.linspace(0.05, 0.95, d)


def random_walk_embedding(
    net: MobilityNetwork,
    d: int,
    variant: str = "pagerank_multi_damping",
    weight_transform: str = "raw",
    standardize: bool = False,
    max_iter: int = PAGERANK_MAX_ITER,
) -> EmbeddingMatrix:
    """d-column random-walk embedding (see module docstring for variants)."""
    if d < 1:
        raise ValueError(f"embedding dimension must be >= 1, got {d}")
    if variant not in RANDOM_WALK_VARIANTS:
        raise ValueError(f"Unknown random-walk variant: {variant!r}. Supported: {RANDOM_WALK_VARIANTS}")

    if variant == "pagerank_multi_damping":
        alphas = damping_factors(d)
        cols = [pagerank(net, alpha=a, weight_transform=weight_transform, max_iter=max_iter)
                for a in alphas]
        spectrum = alphas
    else:
        p, dangling = transition_matrix(net, weight_transform)
        if dangling.any():
            # dangling rows become self-loops so P stays row-stochastic
            p = (p + sparse.diags(dangling.astype(np.float64))).tocsr()
        power = np.eye(net.n)
        cols = []
        for _ in range(d):
            power = np.asarray(power @ p)
            cols.append(np.diag(power).copy())
        spectrum = np.arange(1, d + 1, dtype=np.float64)

    emb = EmbeddingMatrix(values=np.column_stack(cols), method="random_walk",
                          geoids=net.geoids, spectrum=spectrum)
    return emb.standardized() if standardize else emb
