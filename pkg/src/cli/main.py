"""
CLI entry point for the commute-network models.

Usage:
    python scripts/commute.py synth --out data/planted --seed 7
    python scripts/commute.py stats --od data/planted/od.csv
    python scripts/commute.py embed --config config/synthetic.yaml --init svd --d 5
    python scripts/commute.py cluster --config config/synthetic.yaml --init svd --k 2
    python scripts/commute.py train --config config/synthetic.yaml --method gcn --init spatial
    python scripts/commute.py grid --config config/synthetic.yaml --workers 4 --cache
    python scripts/commute.py features --config config/synthetic.yaml --init spatial

Exit code 0 when every requested job finished; 1 otherwise, with a JSON
error summary on stderr.

Mobility Analytics Team — 2026-10
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict

from rich.console import Console

from graph import WEIGHT_TRANSFORMS
from .commands import (
    CommandError,
    cmd_cluster,
    cmd_embed,
    cmd_features,
    cmd_grid,
    cmd_stats,
    cmd_synth,
    cmd_train,
)
from .config import INIT_ALIASES, METHOD_ALIASES, load_config
from .manifest import ManifestRecorder

logger = logging.getLogger(__name__)

COMMANDS = {
    "stats": cmd_stats,
    "embed": cmd_embed,
    "cluster": cmd_cluster,
    "train": cmd_train,
    "grid": cmd_grid,
    "features": cmd_features,
    "synth": cmd_synth,
}


def _int_list(text: str):
    return [int(s) for s in text.split(",") if s.strip()]


def _str_list(text: str):
    return [s.strip() for s in text.split(",") if s.strip()]


def parse_args(argv=None):
    p = argparse.ArgumentParser(
        description="Commute networks: embeddings, graph models and income prediction",
    )
    p.add_argument("command", choices=sorted(COMMANDS), help="Subcommand to run")
    p.add_argument("--config", type=str, default=None,
                   help="Flat dotted-key YAML config, or a manifest.json to replay")
    p.add_argument("--city", type=str, default=None, help="City name used in reports")
    p.add_argument("--out", type=str, default=None, help="Output directory")

    inputs = p.add_argument_group("inputs")
    inputs.add_argument("--od", type=str, default=None, help="LODES origin-destination file")
    inputs.add_argument("--income", type=str, default=None, help="ACS income file")
    inputs.add_argument("--centroids", type=str, default=None, help="Tract centroid file")
    inputs.add_argument("--complaints", type=str, default=None, help="311 complaint records")
    inputs.add_argument("--density", type=str, default=None, help="Population / area file")
    inputs.add_argument("--features", type=str, default=None, help="Extra attribute file")
    inputs.add_argument("--universe", type=str, default=None, help="GEOID list fixing the node set")

    model = p.add_argument_group("model")
    model.add_argument("--method", type=str, default=None, choices=sorted(METHOD_ALIASES))
    model.add_argument("--init", type=str, default=None, choices=sorted(INIT_ALIASES))
    model.add_argument("--d", type=int, default=None, help="Embedding dimension")
    model.add_argument("--weight-transform", type=str, default=None, choices=WEIGHT_TRANSFORMS)
    model.add_argument("--learned", action="store_true",
                       help="embed: write the VNN-trained embedding instead of the initialization")

    ev = p.add_argument_group("evaluation")
    ev.add_argument("--seed", type=int, default=None, help="Single seed (overrides --seeds)")
    ev.add_argument("--seeds", type=_int_list, default=None, help="Comma-separated seeds")
    ev.add_argument("--split", type=str, default=None, help="holdout:0.7 or kfold:5")
    ev.add_argument("--k", type=int, default=None, help="Clusters for the cluster command")

    grid = p.add_argument_group("grid")
    grid.add_argument("--methods", type=_str_list, default=None, help="Comma-separated methods")
    grid.add_argument("--inits", type=_str_list, default=None, help="Comma-separated inits")
    grid.add_argument("--dims", type=_int_list, default=None, help="Comma-separated dimensions")
    grid.add_argument("--feature-sets", type=_str_list, default=None,
                      help="Comma-separated feature sets (features command)")
    grid.add_argument("--workers", type=int, default=None, help="Worker processes for grid cells")
    grid.add_argument("--cache", action="store_true", help="Reuse finished cells from the SQLite cache")

    p.add_argument("--verbose", action="store_true", help="DEBUG logging")
    return p.parse_args(argv)


def overrides_from_args(args) -> Dict[str, Any]:
    """Flat config keys set on the command line (None = not given)."""
    seeds = [args.seed] if args.seed is not None else args.seeds
    overrides = {
        "city": args.city,
        "out": args.out,
        "input.od": args.od,
        "input.income": args.income,
        "input.centroids": args.centroids,
        "input.complaints": args.complaints,
        "input.density": args.density,
        "input.features": args.features,
        "input.universe": args.universe,
        "model.method": args.method,
        "model.init": args.init,
        "model.d": args.d,
        "model.weight_transform": args.weight_transform,
        "model.learned": True if args.learned else None,
        "eval.seeds": seeds,
        "eval.split": args.split,
        "eval.k": args.k,
        "grid.methods": args.methods,
        "grid.inits": args.inits,
        "grid.dims": args.dims,
        "grid.workers": args.workers,
        "grid.cache": True if args.cache else None,
    }
    if args.feature_sets is not None:
        key = "grid.comparison" if args.command == "features" else "grid.feature_sets"
        overrides[key] = args.feature_sets
    return overrides


def _error_summary(command: str, errors) -> str:
    return json.dumps({"command": command, "status": "failed", "errors": errors})


def main(argv=None) -> int:
    args = parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    console = Console()

    try:
        config = load_config(args.config).with_overrides(overrides_from_args(args))
    except Exception as e:
        print(_error_summary(args.command, [{"where": "config", "message": f"{type(e).__name__}: {e}"}]),
              file=sys.stderr)
        return 1

    recorder = ManifestRecorder(args.command, config, config.eval.seeds)
    try:
        result = COMMANDS[args.command](config, console, recorder)
    except Exception as e:
        err = CommandError(args.command, e)
        logger.error("%s", err)
        recorder.add_error(args.command, str(err))
    else:
        logger.debug("%s finished: %r", args.command, type(result).__name__)

    try:
        path = recorder.write()
        logger.info("Run manifest written to %s", path)
    except OSError as e:
        recorder.add_error("manifest", f"{type(e).__name__}: {e}")

    if recorder.manifest.status != "ok":
        print(_error_summary(args.command, recorder.manifest.errors), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
