"""
Benchmark grid: (city, method, init, d) cells, each evaluated over a list of
seeds and aggregated to mean ± sample std.

Cells are independent jobs. With ``workers > 1`` they run in a process
pool; reports are assembled in cell order. A failing cell is marked NA with
its error message and the grid continues.

Mobility Analytics Team — 2026-10
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from config import (
    GAT_HEADS,
    GNN_EPOCHS,
    GNN_HEAD_HIDDEN,
    GNN_HIDDEN,
    GNN_LR,
    GRID_WORKERS,
    HEAD_EPOCHS,
    HEAD_HIDDEN,
    HEAD_LR,
    KFOLD_K,
    LEARNING_RATE,
    TRAIN_FRACTION,
    VNN_BATCH_SIZE,
    VNN_EPOCHS,
    WEIGHT_TRANSFORM,
)
from .cache import get_cached, store_cached
from .crossval import aggregate_seeds
from .features import MissingDataError, feature_matrix
from .report import EvalReport, GridCell
from .split import split_for_target

logger = logging.getLogger(__name__)

METHODS = ("vnn_two_step", "gcn_vnn", "gat_vnn", "feature_mlp")


class GridSettings(BaseModel):
    """Training settings shared by every cell of a grid."""
    split: str = "holdout"
    train_fraction: float = TRAIN_FRACTION
    kfold_k: int = KFOLD_K
    weight_transform: str = WEIGHT_TRANSFORM
    vnn_epochs: int = VNN_EPOCHS
    vnn_lr: float = LEARNING_RATE
    vnn_batch_size: int = VNN_BATCH_SIZE
    vnn_sampling: str = "auto"
    vnn_directed: bool = False
    head_hidden: List[int] = Field(default_factory=lambda: list(HEAD_HIDDEN))
    head_epochs: int = HEAD_EPOCHS
    head_lr: float = HEAD_LR
    gnn_hidden: List[int] = Field(default_factory=lambda: list(GNN_HIDDEN))
    gnn_head_hidden: List[int] = Field(default_factory=lambda: list(GNN_HEAD_HIDDEN))
    gat_heads: int = GAT_HEADS
    gnn_epochs: int = GNN_EPOCHS
    gnn_lr: float = GNN_LR
    dropout: float = 0.0
    weight_decay: float = 0.0


def build_cells(
    city: str,
    methods: Sequence[str],
    inits: Sequence[str],
    dims: Sequence[int],
    seeds: Sequence[int],
    settings: Optional[GridSettings] = None,
    feature_sets: Sequence[str] = ("311",),
) -> List[GridCell]:
    """Expand the grid. feature_mlp cells get init "-" and one cell per feature set."""
    settings = settings or GridSettings()
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise KeyError(f"Unknown methods {unknown}. Supported: {METHODS}")
    options = settings.model_dump()
    cells = []
    for method in methods:
        if method == "feature_mlp":
            for fs in feature_sets:
                cells.append(GridCell(city=city, method=method, init="-", d=None, seeds=list(seeds),
                                      options={**options, "features": fs}))
            continue
        for init in inits:
            for d in dims:
                cells.append(GridCell(city=city, method=method, init=init, d=int(d),
                                      seeds=list(seeds), options=options))
    return cells


# ── Single-seed runners ──────────────────────────────────────────────────────
# Model packages import evaluation.split / evaluation.report, so they are
# imported inside the runners.

def vnn_config(s: GridSettings, seed: int):
    from vnn_embed import VnnConfig
    return VnnConfig(epochs=s.vnn_epochs, lr=s.vnn_lr, batch_size=s.vnn_batch_size, seed=seed,
                     weight_transform=s.weight_transform, sampling=s.vnn_sampling,
                     directed=s.vnn_directed, weight_decay=s.weight_decay)


def head_config(s: GridSettings):
    from vnn_embed import HeadConfig
    return HeadConfig(hidden=tuple(s.head_hidden), epochs=s.head_epochs, lr=s.head_lr,
                      weight_decay=s.weight_decay, dropout=s.dropout)


def gnn_config(s: GridSettings, method: str, seed: int):
    from gnn_model import GnnConfig
    return GnnConfig(layer_kind=method.split("_")[0], hidden=tuple(s.gnn_hidden), heads=s.gat_heads,
                     head_hidden=tuple(s.gnn_head_hidden), epochs=s.gnn_epochs, lr=s.gnn_lr,
                     dropout=s.dropout, weight_decay=s.weight_decay, seed=seed,
                     weight_transform=s.weight_transform)


def learned_embedding(city, init: str, d: int, settings: GridSettings, seed: int):
    """VNN-trained embedding of the city from the named initialization."""
    from embeddings import make_embedding
    from vnn_embed import train_vnn_embedding
    init_emb = make_embedding(init, city.network, d, centroids=city.centroids,
                              weight_transform=settings.weight_transform)
    return train_vnn_embedding(city.network, init_emb, d, vnn_config(settings, seed)).embedding()


def run_seed(city, cell: GridCell, seed: int, embedding=None) -> EvalReport:
    """Evaluate one cell for one seed."""
    from embeddings import make_embedding
    from gnn_model import train_end_to_end
    from vnn_embed import predict_income_from_embedding

    s = GridSettings(**{k: v for k, v in cell.options.items() if k in GridSettings.model_fields})
    target = np.asarray(city.target, dtype=np.float64)

    if cell.method == "feature_mlp":
        fs = cell.options.get("features", "311")
        if "embedding" in fs.split("+") and embedding is None:
            if cell.init == "-" or cell.d is None:
                raise MissingDataError(f"feature set {fs!r} needs an init and d for the embedding")
            embedding = learned_embedding(city, cell.init, cell.d, s, seed)
        x = feature_matrix(fs, city.features, embedding)
        usable = target.copy()
        usable[~np.isfinite(x).all(axis=1)] = np.nan
        split = split_for_target(usable, kind=s.split, seed=seed, train_fraction=s.train_fraction, k=s.kfold_k)
        report = predict_income_from_embedding(np.nan_to_num(x), usable, split, head_config(s), seed,
                                               method="feature_mlp", init=cell.init, city=cell.city)
        return report.model_copy(update={"d": cell.d, "notes": fs})

    split = split_for_target(target, kind=s.split, seed=seed, train_fraction=s.train_fraction, k=s.kfold_k)
    if cell.method == "vnn_two_step":
        emb = embedding if embedding is not None else learned_embedding(city, cell.init, cell.d, s, seed)
        return predict_income_from_embedding(emb, target, split, head_config(s), seed,
                                             init=cell.init, city=cell.city)

    h0 = make_embedding(cell.init, city.network, cell.d, centroids=city.centroids,
                        weight_transform=s.weight_transform)
    config = gnn_config(s, cell.method, seed)
    _, report = train_end_to_end(city.network, h0, target, split, config, city=cell.city, init=cell.init)
    return report.model_copy(update={"d": cell.d})


def run_cell(city, cell: GridCell, embedding=None) -> GridCell:
    """All seeds of one cell; never raises, failures become NA cells."""
    started = time.perf_counter()
    try:
        reports = [run_seed(city, cell, seed, embedding) for seed in cell.seeds]
        report = aggregate_seeds(reports).model_copy(update={
            "fingerprint": cell.fingerprint(),
            "runtime_s": time.perf_counter() - started,
        })
        logger.info("Grid cell %s finished in %.1fs", cell.label, report.runtime_s)
        return cell.model_copy(update={"status": "ok", "report": report, "error": ""})
    except Exception as e:
        logger.warning("Grid cell %s marked NA: %s", cell.label, e)
        return cell.model_copy(update={"status": "NA", "error": f"{type(e).__name__}: {e}"})


def _run_cell_job(args):
    city, cell = args
    return run_cell(city, cell)


def run_grid(
    cities: Dict[str, object],
    cells: Iterable[GridCell],
    workers: int = GRID_WORKERS,
    use_cache: bool = False,
) -> List[GridCell]:
    """Evaluate ``cells`` against the named cities.

    Parameters
    ----------
    cities : city name -> CityData
    cells : grid cells (see :func:`build_cells`)
    workers : process count; 1 runs serially in this process
    use_cache : read / write finished cells in the SQLite cache
    """
    cells = list(cells)
    results: List[Optional[GridCell]] = [None] * len(cells)
    pending = []
    for k, cell in enumerate(cells):
        if cell.city not in cities:
            results[k] = cell.model_copy(update={"status": "NA", "error": f"unknown city {cell.city!r}"})
            logger.warning("Grid cell %s marked NA: city not loaded", cell.label)
            continue
        if use_cache:
            hit = get_cached(cell)
            if hit is not None:
                results[k] = cell.model_copy(update={"status": "ok", "report": hit, "cached": True})
                continue
        pending.append(k)

    logger.info("Running %d grid cells (%d cached) with %d worker(s)",
                len(pending), len(cells) - len(pending), workers)
    jobs = [(cities[cells[k].city], cells[k]) for k in pending]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            finished = list(pool.map(_run_cell_job, jobs))
    else:
        finished = [_run_cell_job(job) for job in jobs]

    for k, done in zip(pending, finished):
        results[k] = done
        if use_cache and done.status == "ok":
            store_cached(done, done.report)
    n_na = sum(1 for r in results if r.status == "NA")
    if n_na:
        logger.warning("%d of %d grid cells are NA", n_na, len(results))
    return results
