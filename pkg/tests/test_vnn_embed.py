"""
Tests for edge-reconstruction embeddings: pair streams, joint training of E
and the reconstruction MLP, checkpoints, and the supervised regression head.

All tests use synthetic data — no network dependency.
"""

import sys
import os

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from embeddings import EmbeddingMatrix, svd_embedding
from evaluation import split_for_target
from graph import MobilityNetwork
from nn_core import Tensor, gradient_check, load_checkpoint, mlp_forward, mse, save_checkpoint
from synth import PlantedCityConfig, generate
from vnn_embed import (
    HeadConfig, VnnConfig, build_model, epoch_pairs, fit_mlp_regressor, initial_embedding,
    make_pairs, pair_features, pair_features_array, predict_income_from_embedding,
    reconstruction_hidden, reconstruction_mse, reconstruction_target, resolve_sampling,
    train_vnn_embedding,
)
from vnn_embed.model import EMBEDDING_PARAM, RECON_PREFIX


def _make_planted(n=30, seed=0):
    return generate(PlantedCityConfig(n=n, communities=2, lambda_in=5.0, lambda_out=0.2), seed)


def _fast_config(**kw):
    base = dict(epochs=40, batch_size=256, lr=1e-2, sampling="all_pairs", patience=100, seed=0)
    base.update(kw)
    return VnnConfig(**base)


# ── Pair construction ───────────────────────────────────────────────────────

class TestPairs:
    def test_all_pairs_covers_every_cell_once(self):
        target = np.zeros((2, 2))
        i, j = epoch_pairs(target, "all_pairs", np.random.default_rng(0))
        assert sorted(zip(i.tolist(), j.tolist())) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_squared_difference_features(self):
        e = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(pair_features_array(e, np.array([0]), np.array([1])), [[4.0, 4.0]])

    def test_self_pair_is_zero(self):
        e = np.random.default_rng(0).normal(size=(4, 3))
        out = pair_features_array(e, np.arange(4), np.arange(4))
        np.testing.assert_array_equal(out, np.zeros((4, 3)))

    def test_directed_features_concatenate(self):
        e = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = pair_features_array(e, np.array([0]), np.array([1]), directed=True)
        np.testing.assert_array_equal(out, [[1.0, 2.0, 3.0, 4.0]])

    def test_differentiable_features_match_array(self):
        e = np.random.default_rng(1).normal(size=(5, 3))
        i, j = np.array([0, 2, 4]), np.array([1, 2, 0])
        np.testing.assert_allclose(pair_features(Tensor(e), i, j).value, pair_features_array(e, i, j))

    def test_balanced_sampling(self):
        target = np.zeros((10, 10))
        target[0, 1] = target[3, 4] = target[7, 7] = 1.0
        i, j = epoch_pairs(target, "balanced", np.random.default_rng(0))
        picked = target[i, j]
        assert (picked != 0).sum() == 3
        assert (picked == 0).sum() == 3

    def test_resolve_sampling(self):
        assert resolve_sampling("auto", 50) == "all_pairs"
        assert resolve_sampling("auto", 700) == "balanced"
        assert resolve_sampling("balanced", 5) == "balanced"
        with pytest.raises(ValueError, match="Unknown sampling"):
            resolve_sampling("stratified", 10)

    def test_reconstruction_target_symmetrized(self):
        net = MobilityNetwork.from_dense([[0, 3], [0, 0]])
        np.testing.assert_allclose(reconstruction_target(net, "raw"), [[0, 1.5], [1.5, 0]])
        np.testing.assert_allclose(reconstruction_target(net, "raw", directed=True), [[0, 3], [0, 0]])

    def test_make_pairs_one_epoch(self):
        net = _make_planted(n=12).network
        emb = np.random.default_rng(0).normal(size=(12, 2))
        batches = list(make_pairs(emb, net, sampling="all_pairs", batch_size=50))
        assert sum(len(b) for b in batches) == 144
        target = reconstruction_target(net)
        for b in batches:
            np.testing.assert_array_equal(b.targets, target[b.i, b.j])
            assert b.features.shape == (len(b), 2)

    def test_make_pairs_row_mismatch(self):
        net = _make_planted(n=12).network
        with pytest.raises(ValueError, match="rows"):
            list(make_pairs(np.zeros((5, 2)), net))


# ── Model construction ──────────────────────────────────────────────────────

class TestBuildModel:
    def test_hidden_sizes(self):
        assert reconstruction_hidden(5) == (20, 15, 5)

    def test_spec_widths(self):
        net = _make_planted(n=10).network
        assert build_model(net, 3, config=_fast_config()).spec == [3, 12, 9, 3, 1]
        directed = build_model(net, 3, config=_fast_config(directed=True))
        assert directed.spec[0] == 6

    def test_initial_embedding_pads_columns(self):
        init = EmbeddingMatrix(values=np.arange(10.0).reshape(5, 2), method="svd")
        values = initial_embedding(init, 5, 4, np.random.default_rng(0), noise=0.1)
        np.testing.assert_array_equal(values[:, :2], init.values)
        assert np.abs(values[:, 2:]).max() <= 0.1

    def test_initial_embedding_truncates_columns(self):
        init = EmbeddingMatrix(values=np.arange(15.0).reshape(5, 3), method="svd")
        values = initial_embedding(init, 5, 2, np.random.default_rng(0), noise=0.1)
        np.testing.assert_array_equal(values, init.values[:, :2])

    def test_initial_embedding_row_mismatch(self):
        init = EmbeddingMatrix(values=np.zeros((4, 2)), method="svd")
        with pytest.raises(ValueError):
            initial_embedding(init, 5, 2, np.random.default_rng(0), noise=0.1)

    def test_invalid_dimension(self):
        with pytest.raises(ValueError, match="dimension"):
            build_model(_make_planted(n=10).network, 0)

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            VnnConfig(epochs=-1)
        with pytest.raises(ValueError):
            VnnConfig(batch_size=0)


# ── Training ────────────────────────────────────────────────────────────────

class TestTrainVnnEmbedding:
    def test_reduces_reconstruction_error(self):
        net = _make_planted().network
        model = train_vnn_embedding(net, svd_embedding(net, 2), 2, _fast_config())
        assert model.epochs_run == 40
        assert model.final_mse < 0.8 * model.initial_mse
        assert model.loss_trace[-1] < model.loss_trace[0]

    def test_planted_fifty_nodes_reach_fifth_of_initial_error(self):
        net = _make_planted(n=50).network
        model = train_vnn_embedding(net, svd_embedding(net, 2), 2, VnnConfig(seed=0))
        assert model.final_mse <= 0.2 * model.initial_mse

    def test_deterministic_per_seed(self):
        net = _make_planted(n=16).network
        a = train_vnn_embedding(net, None, 2, _fast_config(epochs=5))
        b = train_vnn_embedding(net, None, 2, _fast_config(epochs=5))
        np.testing.assert_array_equal(a.embedding_values, b.embedding_values)

    def test_zero_epochs_keeps_initial_table(self):
        net = _make_planted(n=10).network
        init = svd_embedding(net, 2)
        model = train_vnn_embedding(net, init, 2, _fast_config(epochs=0))
        np.testing.assert_array_equal(model.embedding_values, init.values)
        assert model.final_mse == model.initial_mse

    def test_all_zero_adjacency(self):
        net = MobilityNetwork.from_dense(np.zeros((6, 6)))
        model = train_vnn_embedding(net, None, 2, VnnConfig(seed=0))
        assert model.final_mse < 1e-6
        assert np.isfinite(model.embedding_values).all()

    def test_embedding_table(self):
        planted = _make_planted(n=10)
        model = train_vnn_embedding(planted.network, None, 3, _fast_config(epochs=2))
        emb = model.embedding()
        assert emb.method == "vnn_trained"
        assert emb.values.shape == (10, 3)
        assert emb.geoids == planted.network.geoids

    def test_metadata(self):
        net = _make_planted(n=10).network
        meta = train_vnn_embedding(net, svd_embedding(net, 2), 2, _fast_config(epochs=2)).metadata()
        assert meta["kind"] == "vnn_embed"
        assert meta["init"] == "svd"
        assert meta["epochs_run"] == 2

    def test_reconstruction_mse_permutation_invariant(self):
        net = _make_planted(n=12).network
        model = build_model(net, 2, config=_fast_config())
        target = reconstruction_target(net)
        before = reconstruction_mse(model, target=target)
        order = np.random.default_rng(3).permutation(12)
        model.params[EMBEDDING_PARAM].value = model.embedding_values[order].copy()
        after = reconstruction_mse(model, target=target[np.ix_(order, order)])
        assert after == pytest.approx(before, rel=1e-12)

    def test_pairwise_pipeline_gradients(self):
        net = _make_planted(n=8).network
        model = build_model(net, 2, config=_fast_config())
        target = reconstruction_target(net)
        i, j = np.divmod(np.arange(64), 8)
        off = i != j
        i, j = i[off], j[off]

        def loss_fn():
            x = pair_features(model.params[EMBEDDING_PARAM], i, j)
            pred = mlp_forward(model.params, x, model.spec, prefix=RECON_PREFIX)
            return mse(pred, target[i, j].reshape(-1, 1))

        errors = gradient_check(loss_fn, model.params)
        assert EMBEDDING_PARAM in errors
        assert max(errors.values()) < 1e-4

    def test_training_permutation_invariant(self):
        net = _make_planted(n=12).network
        order = np.random.default_rng(5).permutation(12)
        permuted = net.permuted(order)
        init = svd_embedding(net, 2)
        permuted_init = EmbeddingMatrix(values=init.values[order], method="svd")
        config = _fast_config(epochs=5, batch_size=144)
        a = train_vnn_embedding(net, init, 2, config)
        b = train_vnn_embedding(permuted, permuted_init, 2, config)
        assert b.final_mse == pytest.approx(a.final_mse, rel=1e-6)
        np.testing.assert_allclose(b.embedding_values, a.embedding_values[order], atol=1e-6)

    def test_reconstruction_mse_needs_input(self):
        model = build_model(_make_planted(n=10).network, 2)
        with pytest.raises(ValueError):
            reconstruction_mse(model)

    def test_checkpoint_round_trip(self, tmp_path):
        net = _make_planted(n=10).network
        model = train_vnn_embedding(net, None, 2, _fast_config(epochs=2))
        path = tmp_path / "vnn.npz"
        save_checkpoint(model.params, str(path), model.metadata())
        params, meta = load_checkpoint(str(path))
        np.testing.assert_array_equal(params[EMBEDDING_PARAM].value, model.embedding_values)
        assert params.names() == model.params.names()
        assert meta["d"] == 2


# ── Regression head ─────────────────────────────────────────────────────────

class TestRegressionHead:
    def test_recovers_linear_target(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(200, 3))
        y = x @ np.array([2.0, -1.0, 0.5]) + 5.0
        idx = rng.permutation(200)
        fit = fit_mlp_regressor(x, y, idx[:150], idx[150:], HeadConfig(hidden=(16,), epochs=500, lr=1e-2))
        assert fit.r2 >= 0.95
        assert fit.predictions.shape == (200,)

    def test_constant_target_raises(self):
        x = np.random.default_rng(0).normal(size=(20, 2))
        with pytest.raises(ValueError, match="constant"):
            fit_mlp_regressor(x, np.full(20, 3.0), np.arange(15), np.arange(15, 20))

    def test_missing_train_target_raises(self):
        x = np.random.default_rng(0).normal(size=(20, 2))
        y = np.arange(20.0)
        y[3] = np.nan
        with pytest.raises(ValueError, match="non-missing"):
            fit_mlp_regressor(x, y, np.arange(15), np.arange(15, 20))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            fit_mlp_regressor(np.zeros((5, 2)), np.zeros(6), np.arange(3), np.arange(3, 5))

    def test_predict_income_from_informative_embedding(self):
        planted = _make_planted(n=60)
        rng = np.random.default_rng(0)
        values = np.column_stack([planted.target + rng.normal(0, 100, 60), rng.normal(size=60)])
        emb = EmbeddingMatrix(values=values, method="svd", geoids=planted.network.geoids)
        split = split_for_target(planted.target, "holdout", seed=0)
        report = predict_income_from_embedding(emb, planted.target, split,
                                               HeadConfig(hidden=(8,), epochs=300), seed=0,
                                               init="svd", city="planted")
        assert report.r2_mean >= 0.9
        assert report.method == "vnn_two_step"
        assert report.d == 2
        assert report.n_train + report.n_test == 60
        assert len(report.y_true) == report.n_test

    def test_predict_income_length_mismatch(self):
        planted = _make_planted(n=20)
        split = split_for_target(planted.target, "holdout", seed=0)
        with pytest.raises(ValueError, match="target length"):
            predict_income_from_embedding(np.zeros((19, 2)), planted.target, split)

    def test_noise_target_not_predictable_from_embedding(self):
        scores = []
        for seed in range(10):
            planted = _make_planted(n=60, seed=seed)
            net = planted.network
            emb = train_vnn_embedding(net, svd_embedding(net, 2), 2, VnnConfig(seed=seed)).embedding()
            target = np.random.default_rng(100 + seed).normal(size=60)
            split = split_for_target(target, "holdout", seed=seed)
            scores.append(predict_income_from_embedding(emb, target, split, seed=seed).r2_mean)
        assert np.mean(scores) <= 0.05
