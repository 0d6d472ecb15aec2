"""
Subcommand implementations. Each takes the effective RunConfig, a rich
console for tables and the run's ManifestRecorder, writes its files
atomically into ``config.out`` and returns its main result.

Mobility Analytics Team — 2026-10
"""

import json
import logging
from contextlib import ExitStack
from pathlib import Path
from typing import List, Optional

import numpy as np
from rich.console import Console
from rich.table import Table

from atomic_io import atomic_path, write_text_atomic
from config import KMEANS_RESTARTS
from embeddings import cluster_profile, kmeans, make_embedding, write_clusters, write_embedding
from evaluation import (
    EvalReport,
    GridCell,
    GridSettings,
    aggregate_seeds,
    build_cells,
    gnn_config,
    head_config,
    pivot_results,
    results_frame,
    run_feature_comparison,
    run_grid,
    run_seed,
    split_for_target,
    vnn_config,
    write_results,
)
from gnn_model import train_end_to_end
from ingest import (
    CityData,
    NetworkStats,
    build_network,
    load_city,
    network_stats,
    normalize_region_code,
    parse_od_file,
)
from nn_core import save_checkpoint
from synth import PlantedCityConfig, generate, write_city
from vnn_embed import predict_income_from_embedding, train_vnn_embedding
from .config import INIT_ALIASES, METHOD_ALIASES, RunConfig, parse_split
from .manifest import ManifestRecorder

logger = logging.getLogger(__name__)


class CommandError(RuntimeError):
    """A subcommand failed; ``command`` names it for the error summary."""

    def __init__(self, command: str, cause: Exception):
        super().__init__(f"{command}: {type(cause).__name__}: {cause}")
        self.command = command
        self.cause = cause


# ── Shared helpers ───────────────────────────────────────────────────────────

def grid_settings(config: RunConfig) -> GridSettings:
    """GridSettings from the split string, weight transform and training overrides."""
    kind, value = parse_split(config.eval.split)
    values = {"split": kind, "weight_transform": config.model.weight_transform,
              "dropout": config.training.dropout, "weight_decay": config.training.weight_decay}
    if kind == "holdout":
        values["train_fraction"] = value
    else:
        values["kfold_k"] = int(value)
    for key in ("vnn_epochs", "vnn_lr", "head_epochs", "gnn_epochs", "gnn_lr"):
        override = getattr(config.training, key)
        if override is not None:
            values[key] = override
    return GridSettings(**values)


def read_universe(path: str) -> List[str]:
    """One GEOID per line; blank lines and a ``GEOID`` header are skipped."""
    with open(path, encoding="utf-8") as f:
        lines = [line.strip().split(",")[0] for line in f]
    return [normalize_region_code(g) for g in lines if g and g.upper() != "GEOID"]


def load_run_city(config: RunConfig) -> CityData:
    inp = config.input
    config.validate_paths(required=("od", "income"))
    extra = {"features": inp.features} if inp.features else None
    return load_city(
        config.city, inp.od, inp.income,
        centroid_path=inp.centroids,
        income_column=inp.income_column,
        density_path=inp.density,
        complaint_path=inp.complaints,
        extra_features=extra,
        regions=read_universe(inp.universe) if inp.universe else None,
    )


def _out(config: RunConfig, name: str) -> Path:
    return Path(config.out) / name


def _write_report(report: EvalReport, path: Path):
    write_text_atomic(path, report.model_dump_json(indent=2))


# ── Tables ───────────────────────────────────────────────────────────────────

def stats_table(city: str, stats: NetworkStats) -> Table:
    table = Table(title=f"Commute network: {city}")
    table.add_column("Statistic")
    table.add_column("Value", justify="right")
    for key, value in stats.model_dump().items():
        table.add_row(key, f"{value:,.4g}" if isinstance(value, float) else f"{value:,}")
    return table


def frame_table(frame, title: str) -> Table:
    table = Table(title=title)
    frame = frame.reset_index() if frame.index.name else frame
    for col in frame.columns:
        table.add_column(str(col))
    for row in frame.itertuples(index=False):
        table.add_row(*[f"{v:.4g}" if isinstance(v, float) else str(v) for v in row])
    return table


# ── Commands ─────────────────────────────────────────────────────────────────

def cmd_stats(config: RunConfig, console: Console, recorder: ManifestRecorder) -> NetworkStats:
    """N, edges, average weights and degree summary of one OD file."""
    config.validate_paths(required=("od",))
    flows = parse_od_file(config.input.od)
    regions = read_universe(config.input.universe) if config.input.universe else None
    stats = network_stats(build_network(flows, regions=regions))
    console.print(stats_table(config.city, stats))
    path = recorder.add_output(_out(config, "stats.json"))
    write_text_atomic(path, json.dumps({"city": config.city, **stats.model_dump()}, indent=2))
    return stats


def cmd_embed(config: RunConfig, console: Console, recorder: ManifestRecorder) -> Path:
    """Write the initial (or VNN-trained) embedding table of the city."""
    city = load_run_city(config)
    model = config.model
    emb = make_embedding(model.init_name, city.network, model.d, centroids=city.centroids,
                         weight_transform=model.weight_transform)
    if model.learned:
        seed = config.eval.seeds[0]
        vnn = train_vnn_embedding(city.network, emb, model.d, vnn_config(grid_settings(config), seed))
        console.print(f"VNN reconstruction MSE {vnn.initial_mse:.5g} -> {vnn.final_mse:.5g} "
                      f"after {vnn.epochs_run} epochs")
        emb = vnn.embedding()
    name = f"embedding_{emb.method if model.learned else model.init_name}_d{model.d}.csv"
    path = recorder.add_output(_out(config, name))
    write_embedding(emb, path, geoids=city.network.geoids)
    console.print(f"Wrote {emb.n} x {emb.d} embedding to {path}")
    return path


def cmd_cluster(config: RunConfig, console: Console, recorder: ManifestRecorder) -> Path:
    """k-means over the embedding; GeoJSON cluster map plus income profile."""
    city = load_run_city(config)
    model = config.model
    emb = make_embedding(model.init_name, city.network, model.d, centroids=city.centroids,
                         weight_transform=model.weight_transform)
    assignment = kmeans(emb, config.eval.k, seed=config.eval.seeds[0], n_init=KMEANS_RESTARTS)
    suffix = "geojson" if city.centroids else "csv"
    path = recorder.add_output(_out(config, f"clusters_{model.init_name}_k{assignment.k}.{suffix}"))
    written = write_clusters(assignment, city.network.geoids, path, centroids=city.centroids,
                             target=city.target)
    if written != path:
        recorder.manifest.outputs[-1] = str(written)
    profile = cluster_profile(assignment, city.target)
    profile_path = recorder.add_output(_out(config, f"cluster_profile_{model.init_name}_k{assignment.k}.csv"))
    with atomic_path(profile_path) as tmp:
        profile.to_csv(tmp, index=False)
    console.print(frame_table(profile, f"k-means ({model.init_name}, k={assignment.k}, "
                                       f"inertia {assignment.inertia:.4g})"))
    return written


def cmd_train(config: RunConfig, console: Console, recorder: ManifestRecorder) -> EvalReport:
    """Train one method over every seed; checkpoint per seed plus an aggregated report.

    Checkpoints are staged next to their destination and promoted together
    after the last seed finishes; a failed run writes none.
    """
    city = load_run_city(config)
    model = config.model
    method, init, d = model.method_name, model.init_name, model.d
    settings = grid_settings(config)
    target = np.asarray(city.target, dtype=np.float64)
    reports = []
    checkpoints = []
    with ExitStack() as staged:
        for seed in config.eval.seeds:
            split = split_for_target(target, kind=settings.split, seed=seed,
                                     train_fraction=settings.train_fraction, k=settings.kfold_k)
            ckpt = _out(config, f"checkpoint_{method}_{init}_d{d}_seed{seed}.npz")
            if method in ("gcn_vnn", "gat_vnn"):
                h0 = make_embedding(init, city.network, d, centroids=city.centroids,
                                    weight_transform=settings.weight_transform)
                gnn, report = train_end_to_end(city.network, h0, target, split,
                                               gnn_config(settings, method, seed), city=city.name, init=init)
                save_checkpoint(gnn.params, staged.enter_context(atomic_path(ckpt)), metadata=gnn.metadata())
                checkpoints.append(ckpt)
            elif method == "vnn_two_step":
                h0 = make_embedding(init, city.network, d, centroids=city.centroids,
                                    weight_transform=settings.weight_transform)
                vnn = train_vnn_embedding(city.network, h0, d, vnn_config(settings, seed))
                save_checkpoint(vnn.params, staged.enter_context(atomic_path(ckpt)), metadata=vnn.metadata())
                checkpoints.append(ckpt)
                report = predict_income_from_embedding(vnn.embedding(), target, split, head_config(settings),
                                                       seed, init=init, city=city.name)
            else:
                cell = build_cells(city.name, [method], [init], [d], [seed], settings,
                                   feature_sets=config.grid.feature_sets[:1])[0]
                report = run_seed(city, cell, seed)
            reports.append(report.model_copy(update={"d": d}))
    for ckpt in checkpoints:
        recorder.add_output(ckpt)
    report = aggregate_seeds(reports)
    path = recorder.add_output(_out(config, f"report_{method}_{init}_d{d}.json"))
    _write_report(report, path)
    recorder.add_timing(f"{method}/{init}/{d}", report.runtime_s)
    console.print(f"{method} ({init}, d={d}) on {city.name}: R² {report.r2_mean:.4f} ± "
                  f"{report.r2_halfwidth:.4f} over {len(report.seeds)} seed(s)")
    return report


def _grid_outputs(cells: List[GridCell], config: RunConfig, console: Console,
                  recorder: ManifestRecorder, stem: str):
    csv_path = recorder.add_output(_out(config, f"{stem}.csv"))
    json_path = recorder.add_output(_out(config, f"{stem}.json"))
    write_results(cells, csv_path, json_path)
    frame = results_frame(cells)
    pivot = pivot_results(frame)
    pivot_path = recorder.add_output(_out(config, f"{stem}_pivot.csv"))
    with atomic_path(pivot_path) as tmp:
        pivot.to_csv(tmp)
    console.print(frame_table(pivot, f"R² (mean ± std over seeds): {stem}"))
    for cell in cells:
        if cell.status != "ok":
            recorder.add_error(cell.label, cell.error)
        elif not cell.cached:
            recorder.add_timing(cell.label, cell.report.runtime_s)


def cmd_grid(config: RunConfig, console: Console, recorder: ManifestRecorder) -> List[GridCell]:
    """(method, init, d) grid over the configured city and seeds."""
    city = load_run_city(config)
    methods = [METHOD_ALIASES.get(m, m) for m in config.grid.methods]
    inits = [INIT_ALIASES.get(i, i) for i in config.grid.inits]
    cells = build_cells(city.name, methods, inits, config.grid.dims, config.eval.seeds,
                        grid_settings(config), feature_sets=config.grid.feature_sets)
    cells = run_grid({city.name: city}, cells, workers=config.grid.workers, use_cache=config.grid.cache)
    _grid_outputs(cells, config, console, recorder, "grid_results")
    return cells


def cmd_features(config: RunConfig, console: Console, recorder: ManifestRecorder) -> List[GridCell]:
    """Input-feature comparison: densities, 311 mix and the learned embedding."""
    city = load_run_city(config)
    cells = run_feature_comparison(city, config.model.init_name, config.model.d, config.eval.seeds,
                                   grid_settings(config), feature_sets=config.grid.comparison,
                                   workers=config.grid.workers, use_cache=config.grid.cache)
    _grid_outputs(cells, config, console, recorder, "feature_comparison")
    return cells


def cmd_synth(config: RunConfig, console: Console, recorder: ManifestRecorder,
              seed: Optional[int] = None) -> dict:
    """Generate a planted-community city and write its input files."""
    s = config.synth
    planted = generate(PlantedCityConfig(n=s.n, communities=s.communities, lambda_in=s.lambda_in,
                                         lambda_out=s.lambda_out, income_gradient=s.income_gradient,
                                         income_noise=s.income_noise),
                       seed=config.eval.seeds[0] if seed is None else seed)
    paths = write_city(planted, config.out)
    for path in paths.values():
        recorder.add_output(path)
    console.print(f"Planted city: {planted.network.n} tracts, {s.communities} communities, "
                  f"total flow {planted.network.total_flow():,.0f} -> {config.out}")
    return paths
