"""
Tests for the command-line surface: run configs, overrides, manifests and
end-to-end subcommands on a planted city written to a temp directory.

All tests use synthetic data — no network dependency.
"""

import sys
import os
import json

import numpy as np
import pandas as pd
import pytest
import yaml
from pydantic import ValidationError

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from cli import (
    RunConfig, flatten, grid_settings, load_config, main, parse_args, parse_split, read_universe, unflatten,
)
from cli.config import write_config
from cli.main import overrides_from_args


def _synth(tmp_path, seed=3):
    data = tmp_path / "data"
    assert main(["synth", "--out", str(data), "--seed", str(seed)]) == 0
    return data


def _fast_config(tmp_path, data, **extra):
    """Flat YAML config over the planted files with small epoch counts."""
    flat = {
        "city": "planted",
        "out": str(tmp_path / "out"),
        "input.od": str(data / "od.csv"),
        "input.income": str(data / "income.csv"),
        "input.centroids": str(data / "centroids.csv"),
        "input.density": str(data / "density.csv"),
        "input.complaints": str(data / "complaints.csv"),
        "eval.seeds": [0],
        "training.vnn_epochs": 2,
        "training.head_epochs": 40,
        "training.gnn_epochs": 15,
    }
    flat.update(extra)
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(flat))
    return str(path)


def _read_manifest(out_dir, command):
    return json.loads((out_dir / f"manifest_{command}.json").read_text())


# ── Config ──────────────────────────────────────────────────────────────────

class TestParseSplit:
    def test_holdout(self):
        assert parse_split("holdout:0.8") == ("holdout", 0.8)

    def test_kfold(self):
        assert parse_split("kfold:5") == ("kfold", 5)

    def test_defaults(self):
        assert parse_split("kfold") == ("kfold", 5)

    @pytest.mark.parametrize("spec", ["holdout:1.5", "kfold:1", "bootstrap:3"])
    def test_invalid(self, spec):
        with pytest.raises(ValueError):
            parse_split(spec)


class TestRunConfig:
    def test_flatten_round_trip(self):
        tree = {"a": 1, "b": {"c": 2, "d": {"e": [1, 2]}}}
        flat = flatten(tree)
        assert flat == {"a": 1, "b.c": 2, "b.d.e": [1, 2]}
        assert unflatten(flat) == tree

    def test_unflatten_conflict(self):
        with pytest.raises(ValueError, match="conflicts"):
            unflatten({"a": 1, "a.b": 2})

    def test_defaults(self):
        config = load_config(None)
        assert config.model.method_name == "vnn_two_step"
        assert config.model.init_name == "spatial"

    def test_yaml(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("model.method: gat\nmodel.init: randomwalk\neval.seeds: [4, 5]\n")
        config = load_config(str(path))
        assert config.model.method_name == "gat_vnn"
        assert config.model.init_name == "random_walk"
        assert config.eval.seeds == [4, 5]

    def test_write_and_reload(self, tmp_path):
        config = RunConfig().with_overrides({"model.d": 7, "grid.dims": [2, 3]})
        write_config(config, str(tmp_path / "c.yaml"))
        assert load_config(str(tmp_path / "c.yaml")) == config

    def test_overrides(self):
        config = RunConfig().with_overrides({"model.d": 3, "eval.split": None})
        assert config.model.d == 3
        assert config.eval.split == RunConfig().eval.split

    def test_unknown_override(self):
        with pytest.raises(KeyError, match="Unknown config keys"):
            RunConfig().with_overrides({"model.depth": 3})

    def test_invalid_values(self):
        with pytest.raises(ValidationError):
            RunConfig.from_flat({"model.method": "node2vec"})
        with pytest.raises(ValidationError):
            RunConfig.from_flat({"eval.split": "holdout:2"})

    def test_validate_paths(self, tmp_path):
        config = RunConfig.from_flat({"out": str(tmp_path / "o"), "input.od": str(tmp_path / "missing.csv")})
        with pytest.raises(FileNotFoundError):
            config.validate_paths()
        with pytest.raises(ValueError, match="input.income"):
            RunConfig.from_flat({"out": str(tmp_path / "o")}).validate_paths(required=("income",))

    def test_grid_settings(self):
        config = RunConfig.from_flat({"eval.split": "kfold:4", "training.gnn_epochs": 9})
        settings = grid_settings(config)
        assert settings.split == "kfold"
        assert settings.kfold_k == 4
        assert settings.gnn_epochs == 9

    def test_read_universe(self, tmp_path):
        path = tmp_path / "u.txt"
        path.write_text("GEOID\n1400000US17031000100\n\n17031000200\n")
        assert read_universe(str(path)) == ["17031000100", "17031000200"]


class TestArgs:
    def test_feature_sets_routing(self):
        args = parse_args(["features", "--feature-sets", "311,embedding"])
        assert overrides_from_args(args)["grid.comparison"] == ["311", "embedding"]
        args = parse_args(["grid", "--feature-sets", "311"])
        assert overrides_from_args(args)["grid.feature_sets"] == ["311"]

    def test_seed_overrides_seeds(self):
        args = parse_args(["train", "--seeds", "1,2,3", "--seed", "9"])
        assert overrides_from_args(args)["eval.seeds"] == [9]

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            parse_args(["plot"])


# ── Commands ────────────────────────────────────────────────────────────────

class TestCommands:
    def test_synth_and_manifest(self, tmp_path):
        data = _synth(tmp_path)
        assert (data / "od.csv").exists()
        manifest = _read_manifest(data, "synth")
        assert manifest["status"] == "ok"
        assert manifest["seeds"] == [3]
        assert "numpy" in manifest["versions"]
        assert str(data / "truth.json") in manifest["outputs"]

    def test_manifest_replays(self, tmp_path):
        data = _synth(tmp_path)
        config = load_config(str(data / "manifest_synth.json"))
        assert config.eval.seeds == [3]
        assert config.out == str(data)

    @pytest.mark.parametrize("argv", [
        ["train", "--method", "vnn", "--init", "svd", "--d", "2"],
        ["grid", "--methods", "gcn", "--inits", "svd", "--dims", "2", "--workers", "1"],
    ])
    def test_replay_from_manifest_is_bit_exact(self, tmp_path, argv):
        data = _synth(tmp_path)
        config = _fast_config(tmp_path, data)
        out = tmp_path / "out"
        assert main([argv[0], "--config", config] + argv[1:]) == 0
        manifest = _read_manifest(out, argv[0])
        outputs = manifest["outputs"]
        assert manifest["timings"] and all(t >= 0 for t in manifest["timings"].values())
        first = {p: open(p, "rb").read() for p in outputs}
        assert main([argv[0], "--config", str(out / f"manifest_{argv[0]}.json")]) == 0
        assert _read_manifest(out, argv[0])["outputs"] == outputs
        for p in outputs:
            assert open(p, "rb").read() == first[p], p

    def test_stats(self, tmp_path):
        data = _synth(tmp_path)
        out = tmp_path / "out"
        assert main(["stats", "--od", str(data / "od.csv"), "--out", str(out)]) == 0
        stats = json.loads((out / "stats.json").read_text())
        assert stats["n_nodes"] == 60
        assert stats["city"] == "city"

    def test_stats_empty_universe_fails(self, tmp_path, capsys):
        data = _synth(tmp_path)
        universe = tmp_path / "universe.txt"
        universe.write_text("GEOID\n")
        code = main(["stats", "--od", str(data / "od.csv"), "--universe", str(universe),
                     "--out", str(tmp_path / "out")])
        assert code == 1
        summary = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert summary["status"] == "failed"
        assert "no nodes" in summary["errors"][0]["message"]

    def test_missing_config_fails(self, tmp_path, capsys):
        code = main(["stats", "--config", str(tmp_path / "nope.yaml")])
        assert code == 1
        summary = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert summary["errors"][0]["where"] == "config"

    def test_missing_input_fails(self, tmp_path):
        assert main(["embed", "--out", str(tmp_path / "out")]) == 1

    def test_embed(self, tmp_path):
        data = _synth(tmp_path)
        config = _fast_config(tmp_path, data)
        assert main(["embed", "--config", config, "--init", "svd", "--d", "5"]) == 0
        frame = pd.read_csv(tmp_path / "out" / "embedding_svd_d5.csv", dtype={"geoid": str})
        assert frame.shape == (60, 6)
        assert list(frame.columns) == ["geoid"] + [f"svd_d5_{k}" for k in range(5)]

    def test_embed_learned(self, tmp_path):
        data = _synth(tmp_path)
        config = _fast_config(tmp_path, data)
        assert main(["embed", "--config", config, "--init", "svd", "--d", "3", "--learned"]) == 0
        assert (tmp_path / "out" / "embedding_vnn_trained_d3.csv").exists()

    def test_embed_respects_universe(self, tmp_path):
        data = _synth(tmp_path)
        config = _fast_config(tmp_path, data)
        geoids = json.loads((data / "truth.json").read_text())["communities"]
        subset = sorted(geoids)[:20]
        universe = tmp_path / "universe.txt"
        universe.write_text("GEOID\n" + "\n".join(subset) + "\n")
        assert main(["embed", "--config", config, "--universe", str(universe),
                     "--init", "svd", "--d", "2"]) == 0
        frame = pd.read_csv(tmp_path / "out" / "embedding_svd_d2.csv", dtype={"geoid": str})
        assert len(frame) == 20
        assert list(frame["geoid"]) == subset

    def test_cluster_recovers_communities(self, tmp_path):
        data = _synth(tmp_path)
        config = _fast_config(tmp_path, data)
        assert main(["cluster", "--config", config, "--init", "svd", "--d", "2", "--k", "2"]) == 0
        geo = json.loads((tmp_path / "out" / "clusters_svd_k2.geojson").read_text())
        truth = json.loads((data / "truth.json").read_text())["communities"]
        labels = np.array([f["properties"]["cluster"] for f in geo["features"]])
        planted = np.array([truth[f["properties"]["geoid"]] for f in geo["features"]])
        agreement = max((labels == planted).mean(), (labels != planted).mean())
        assert agreement >= 0.9
        assert all(np.isfinite(f["properties"]["median_income"]) for f in geo["features"])
        profile = pd.read_csv(tmp_path / "out" / "cluster_profile_svd_k2.csv")
        assert profile["size"].sum() == 60

    @pytest.mark.parametrize("method", ["gcn", "vnn", "features"])
    def test_train(self, tmp_path, method):
        data = _synth(tmp_path)
        config = _fast_config(tmp_path, data, **{"grid.feature_sets": ["311"]})
        assert main(["train", "--config", config, "--method", method, "--init", "svd", "--d", "2"]) == 0
        reports = list((tmp_path / "out").glob("report_*.json"))
        assert len(reports) == 1
        report = json.loads(reports[0].read_text())
        assert report["seeds"] == [0]
        assert np.isfinite(report["r2_mean"])
        if method != "features":
            assert list((tmp_path / "out").glob("checkpoint_*_seed0.npz"))

    def test_failed_seed_leaves_no_checkpoints(self, tmp_path, monkeypatch, capsys):
        import cli.commands as commands

        data = _synth(tmp_path)
        config = _fast_config(tmp_path, data, **{"eval.seeds": [0, 1]})
        trained = []
        original = commands.train_vnn_embedding

        def failing_on_second_seed(net, init, d, vnn_config):
            if vnn_config.seed == 1:
                raise RuntimeError("seed 1 diverged")
            trained.append(vnn_config.seed)
            return original(net, init, d, vnn_config)

        monkeypatch.setattr(commands, "train_vnn_embedding", failing_on_second_seed)
        code = main(["train", "--config", config, "--method", "vnn", "--init", "svd", "--d", "2"])
        assert code == 1
        assert trained == [0]
        out = tmp_path / "out"
        assert not list(out.glob("checkpoint_*"))
        assert not list(out.glob(".tmp-*"))
        manifest = _read_manifest(out, "train")
        assert manifest["status"] == "failed"
        assert not [p for p in manifest["outputs"] if "checkpoint_" in p]
        assert "seed 1 diverged" in capsys.readouterr().err

    def test_grid(self, tmp_path):
        data = _synth(tmp_path)
        config = _fast_config(tmp_path, data)
        code = main(["grid", "--config", config, "--methods", "gcn,vnn", "--inits", "svd",
                     "--dims", "2", "--workers", "1"])
        assert code == 0
        frame = pd.read_csv(tmp_path / "out" / "grid_results.csv")
        assert list(frame["method"]) == ["gcn_vnn", "vnn_two_step"]
        assert (frame["status"] == "ok").all()
        assert (tmp_path / "out" / "grid_results_pivot.csv").exists()

    def test_grid_na_cell_fails_run(self, tmp_path, capsys):
        data = _synth(tmp_path)
        config = _fast_config(tmp_path, data)
        code = main(["grid", "--config", config, "--methods", "features", "--inits", "svd",
                     "--dims", "2", "--feature-sets", "population_density,nonexistent", "--workers", "1"])
        assert code == 1
        manifest = _read_manifest(tmp_path / "out", "grid")
        assert manifest["status"] == "failed"
        assert len(manifest["errors"]) == 1
        frame = pd.read_csv(tmp_path / "out" / "grid_results.csv", keep_default_na=False)
        assert list(frame["status"]) == ["ok", "NA"]

    def test_features(self, tmp_path):
        data = _synth(tmp_path)
        config = _fast_config(tmp_path, data)
        code = main(["features", "--config", config, "--init", "svd", "--d", "2",
                     "--feature-sets", "population_density,embedding+311", "--workers", "1"])
        assert code == 0
        frame = pd.read_csv(tmp_path / "out" / "feature_comparison.csv")
        assert list(frame["features"]) == ["population_density", "embedding+311"]
