"""
Tests for node embeddings (spatial, SVD, Laplacian, random walk), k-means
and embedding / cluster files.

All tests use synthetic data — no network dependency.
"""

import sys
import os
import json
from itertools import permutations

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from embeddings import (
    ConvergenceError, EmbeddingMatrix, MissingCentroidError, cluster_profile, damping_factors,
    fix_signs, kmeans, laplacian_embedding, laplacian_spectrum, make_embedding, pagerank,
    random_walk_embedding, read_embedding, spatial_embedding, standardize, svd_embedding,
    transition_matrix, truncated_svd, write_clusters, write_embedding,
)
from graph import MobilityNetwork, degree_matrix, transform_weights


def _make_planted(n=40, seed=0, lam_in=5.0, lam_out=0.2):
    rng = np.random.default_rng(seed)
    comm = np.repeat([0, 1], n // 2)
    lam = np.where(comm[:, None] == comm[None, :], lam_in, lam_out)
    return MobilityNetwork.from_dense(rng.poisson(lam)), comm


def _make_random_net(n=6, seed=0):
    rng = np.random.default_rng(seed)
    counts = rng.integers(1, 10, size=(n, n)) * (rng.random((n, n)) < 0.5)
    counts[np.arange(n), (np.arange(n) + 1) % n] += 1          # ring: no dangling nodes
    return MobilityNetwork.from_dense(counts)


def _agreement(labels, truth):
    k = int(max(labels.max(), truth.max())) + 1
    best = 0.0
    for perm in permutations(range(k)):
        best = max(best, float(np.mean(np.asarray(perm)[labels] == truth)))
    return best


# ── Standardization ─────────────────────────────────────────────────────────

class TestStandardize:
    def test_moments(self):
        x = np.random.default_rng(0).normal(3.0, 2.0, size=(5, 2))
        out, mean, std = standardize(x)
        np.testing.assert_allclose(out.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(out.std(axis=0), 1.0, atol=1e-12)

    def test_constant_column(self):
        out, _, std = standardize(np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]))
        np.testing.assert_array_equal(out[:, 1], 0.0)
        assert std[1] == 0.0

    def test_embedding_standardized_once(self):
        emb = EmbeddingMatrix(values=np.arange(6.0).reshape(3, 2), method="svd")
        std = emb.standardized()
        assert std.is_standardized
        assert std.standardized() is std

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            EmbeddingMatrix(values=np.zeros((2, 2)), method="node2vec")


# ── Spatial ─────────────────────────────────────────────────────────────────

class TestSpatial:
    def test_two_points(self):
        emb = spatial_embedding({"a": (0.0, 0.0), "b": (2.0, 2.0)}, ["a", "b"])
        np.testing.assert_allclose(emb.values, [[-1, -1], [1, 1]])

    def test_identical_coordinates(self):
        emb = spatial_embedding({g: (-87.6, 41.9) for g in "abc"}, list("abc"))
        np.testing.assert_array_equal(emb.values, 0.0)

    def test_missing_centroid_lists_regions(self):
        with pytest.raises(MissingCentroidError) as exc:
            spatial_embedding({"a": (0.0, 0.0)}, ["a", "b", "c"])
        assert exc.value.regions == ["b", "c"]

    def test_row_order_follows_geoids(self):
        emb = spatial_embedding({"a": (0.0, 1.0), "b": (5.0, 6.0)}, ["b", "a"], standardize=False)
        np.testing.assert_array_equal(emb.values, [[5.0, 6.0], [0.0, 1.0]])


# ── SVD ─────────────────────────────────────────────────────────────────────

class TestSVD:
    def test_rank_one_recovery(self):
        u = np.array([1.0, 2.0, 3.0])
        v = np.array([2.0, 0.5, 1.0])
        a = np.outer(u, v)
        uu, s, vt = truncated_svd(a, 1)
        np.testing.assert_allclose(uu * s @ vt, a, atol=1e-10)

    def test_full_rank_reconstruction(self):
        a = np.random.default_rng(1).random((6, 6))
        uu, s, vt = truncated_svd(a, 6)
        assert np.linalg.norm(uu * s @ vt - a) < 1e-8

    def test_singular_values_match_eigen_oracle(self):
        a = np.random.default_rng(2).random((8, 8))
        _, s, _ = truncated_svd(a, 3)
        eig = np.sort(np.linalg.eigvalsh(a.T @ a))[::-1][:3]
        np.testing.assert_allclose(s, np.sqrt(eig), atol=1e-8)

    def test_error_non_increasing_in_d(self):
        net = _make_random_net(n=8, seed=3)
        a = transform_weights(net.dense(), "log1p")
        errors = []
        for d in range(1, 9):
            uu, s, vt = truncated_svd(a, d)
            errors.append(np.linalg.norm(a - uu * s @ vt))
        assert all(e2 <= e1 + 1e-12 for e1, e2 in zip(errors, errors[1:]))

    def test_signs_deterministic(self):
        signs = fix_signs(np.array([[1.0, -3.0], [-2.0, 1.0]]))
        np.testing.assert_array_equal(signs, [[-1.0, 3.0], [2.0, -1.0]])

    def test_embedding_shape(self):
        emb = svd_embedding(_make_random_net(n=8), 3)
        assert (emb.n, emb.d) == (8, 3)
        assert emb.method == "svd"
        assert emb.spectrum.shape == (3,)

    def test_d_too_large(self):
        with pytest.raises(ValueError):
            svd_embedding(_make_random_net(n=4), 5)


# ── Laplacian ───────────────────────────────────────────────────────────────

class TestLaplacian:
    def test_zero_eigenvector_is_sqrt_degree(self):
        net = _make_random_net(n=7, seed=4)
        vals, vecs = laplacian_spectrum(net, "log1p")
        assert abs(vals[0]) < 1e-8
        d = degree_matrix(net, weighted=True, symmetrize=True, weight_transform="log1p")
        expected = np.sqrt(d) / np.linalg.norm(np.sqrt(d))
        np.testing.assert_allclose(np.abs(vecs[:, 0]), expected, atol=1e-8)

    def test_complete_graph_spectrum(self):
        net = MobilityNetwork.from_dense(np.ones((4, 4)) - np.eye(4))
        vals, _ = laplacian_spectrum(net, "binary")
        np.testing.assert_allclose(vals, [0.0, 1.0, 1.0, 1.0], atol=1e-8)

    def test_path_graph_matches_dense_solver(self):
        n = 10
        a = np.zeros((n, n))
        a[np.arange(n - 1), np.arange(1, n)] = 1
        net = MobilityNetwork.from_dense(a)
        vals, _ = laplacian_spectrum(net, "binary")
        sym = 0.5 * (a + a.T) + np.eye(n)
        deg = sym.sum(axis=1)
        lap = np.eye(n) - sym / np.sqrt(np.outer(deg, deg))
        np.testing.assert_allclose(vals, np.linalg.eigvalsh(lap), atol=1e-8)

    def test_embedding_orthonormal(self):
        emb = laplacian_embedding(_make_random_net(n=8, seed=5), 3)
        np.testing.assert_allclose(emb.values.T @ emb.values, np.eye(3), atol=1e-8)
        assert (emb.spectrum > 1e-8).all()

    def test_skips_zero_eigenvalues_of_components(self):
        a = np.zeros((6, 6))
        a[:3, :3] = 1
        a[3:, 3:] = 1
        emb = laplacian_embedding(MobilityNetwork.from_dense(a), 2, weight_transform="binary")
        assert (emb.spectrum > 1e-8).all()

    def test_too_few_nonzero(self):
        with pytest.raises(ValueError, match="nonzero"):
            laplacian_embedding(MobilityNetwork.from_dense(np.zeros((4, 4))), 2)

    def test_d_range(self):
        with pytest.raises(ValueError):
            laplacian_embedding(_make_random_net(n=4), 4)

    def test_planted_second_eigenvector_separates(self):
        net, comm = _make_planted(n=40, seed=1, lam_out=0.05)
        _, vecs = laplacian_spectrum(net, "log1p")
        side = (vecs[:, 1] > 0).astype(int)
        assert _agreement(side, comm) >= 0.95


# ── Random walk ─────────────────────────────────────────────────────────────

class TestRandomWalk:
    def test_three_cycle_uniform(self):
        net = MobilityNetwork.from_dense([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        for alpha in (0.3, 0.85):
            np.testing.assert_allclose(pagerank(net, alpha=alpha), 1 / 3, atol=1e-10)

    def test_two_node_swap_uniform(self):
        net = MobilityNetwork.from_dense([[0, 1], [1, 0]])
        np.testing.assert_allclose(pagerank(net), 0.5, atol=1e-10)

    def test_matches_linear_solve(self):
        net = _make_random_net(n=6, seed=6)
        p, dangling = transition_matrix(net)
        assert not dangling.any()
        alpha = 0.85
        rhs = np.full(6, (1 - alpha) / 6)
        exact = np.linalg.solve(np.eye(6) - alpha * p.toarray().T, rhs)
        np.testing.assert_allclose(pagerank(net, alpha=alpha), exact, atol=1e-8)

    def test_dangling_mass_conserved(self):
        net = MobilityNetwork.from_dense([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
        pr = pagerank(net)
        assert pr.sum() == pytest.approx(1.0)
        assert (pr > 0).all()

    def test_non_convergence(self):
        with pytest.raises(ConvergenceError):
            pagerank(_make_random_net(), alpha=0.99, tol=1e-300, max_iter=3)

    def test_damping_factors(self):
        np.testing.assert_allclose(damping_factors(1), [0.85])
        np.testing.assert_allclose(damping_factors(5), [0.05, 0.275, 0.5, 0.725, 0.95])

    def test_pagerank_embedding(self):
        emb = random_walk_embedding(_make_random_net(), 4)
        assert (emb.n, emb.d) == (6, 4)
        np.testing.assert_allclose(emb.values.sum(axis=0), 1.0, atol=1e-9)

    def test_k_step_landing(self):
        net = MobilityNetwork.from_dense([[0, 1], [1, 0]])
        emb = random_walk_embedding(net, 3, variant="k_step_landing")
        np.testing.assert_allclose(emb.values, [[0, 1, 0], [0, 1, 0]])

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            random_walk_embedding(_make_random_net(), 2, variant="deepwalk")


# ── Registry ────────────────────────────────────────────────────────────────

class TestRegistry:
    @pytest.mark.parametrize("method", ["svd", "laplacian", "random_walk"])
    def test_standardized_output(self, method):
        emb = make_embedding(method, _make_random_net(n=8, seed=7), 3)
        assert emb.is_standardized
        assert emb.d == 3

    def test_spatial_always_2d(self):
        net = _make_random_net(n=4)
        cents = {g: (float(i), float(i * i)) for i, g in enumerate(net.geoids)}
        assert make_embedding("spatial", net, 7, centroids=cents).d == 2

    def test_spatial_needs_centroids(self):
        with pytest.raises(ValueError):
            make_embedding("spatial", _make_random_net(), 2)

    def test_unknown(self):
        with pytest.raises(ValueError, match="Unknown embedding method"):
            make_embedding("node2vec", _make_random_net(), 2)


# ── k-means ─────────────────────────────────────────────────────────────────

class TestKMeans:
    def test_two_clouds(self):
        rng = np.random.default_rng(0)
        x = np.vstack([rng.normal(0, 0.1, (15, 2)), rng.normal(10, 0.1, (15, 2))])
        truth = np.repeat([0, 1], 15)
        result = kmeans(x, 2, seed=1)
        assert _agreement(result.labels, truth) == 1.0

    def test_k_equals_n(self):
        x = np.random.default_rng(1).normal(size=(6, 2))
        assert kmeans(x, 6).inertia == pytest.approx(0.0, abs=1e-20)

    def test_restarts_dominate_single_runs(self):
        x = np.random.default_rng(2).normal(size=(30, 2))
        best = kmeans(x, 3, seed=5, n_init=10)
        children = np.random.SeedSequence(5).spawn(10)
        singles = [kmeans(x, 3, seed=c).inertia for c in children]
        assert best.inertia <= min(singles) + 1e-12
        assert len(best.restart_inertias) == 10

    def test_trace_non_increasing(self):
        x = np.random.default_rng(3).normal(size=(50, 3))
        trace = kmeans(x, 4, seed=0).inertia_trace
        assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))

    def test_deterministic(self):
        x = np.random.default_rng(4).normal(size=(20, 2))
        np.testing.assert_array_equal(kmeans(x, 3, seed=9).labels, kmeans(x, 3, seed=9).labels)

    def test_no_empty_clusters_with_duplicates(self):
        x = np.vstack([np.zeros((8, 2)), np.ones((2, 2))])
        result = kmeans(x, 3, seed=0)
        assert len(set(result.labels.tolist())) == 3

    def test_bad_k(self):
        with pytest.raises(ValueError):
            kmeans(np.zeros((3, 2)), 4)

    def test_svd_recovers_planted_communities(self):
        net, comm = _make_planted(n=40, seed=2)
        result = kmeans(svd_embedding(net, 2, standardize=True), 2, seed=0, n_init=10)
        assert _agreement(result.labels, comm) >= 0.9

    def test_cluster_profile(self):
        x = np.array([[0.0], [0.1], [10.0], [10.1]])
        result = kmeans(x, 2, seed=0)
        target = np.array([1.0, 3.0, 100.0, np.nan])
        prof = cluster_profile(result, target)
        assert prof["size"].sum() == 4
        low = prof.loc[prof["cluster"] == result.labels[0]].iloc[0]
        assert low["mean_target"] == pytest.approx(2.0)
        assert prof["labeled"].sum() == 3


# ── Files ───────────────────────────────────────────────────────────────────

class TestExport:
    def test_embedding_file_round_trip(self, tmp_path):
        net = _make_random_net(n=5)
        emb = svd_embedding(net, 3)
        path = write_embedding(emb, tmp_path / "emb.csv")
        header = path.read_text().splitlines()[0]
        assert header == "geoid,svd_d3_0,svd_d3_1,svd_d3_2"
        back = read_embedding(path)
        assert back.method == "svd"
        assert back.geoids == net.geoids
        np.testing.assert_array_equal(back.values, emb.values)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("geoid,foo\n1,2\n")
        with pytest.raises(ValueError):
            read_embedding(path)

    def test_geojson_clusters(self, tmp_path):
        x = np.array([[0.0], [0.1], [9.0]])
        result = kmeans(x, 2, seed=0)
        cents = {"a": (-87.0, 41.0), "b": (-87.1, 41.1), "c": (-88.0, 42.0)}
        path = write_clusters(result, ["a", "b", "c"], tmp_path / "c.geojson", centroids=cents)
        doc = json.loads(path.read_text())
        assert doc["type"] == "FeatureCollection"
        props = [f["properties"] for f in doc["features"]]
        assert props[0]["cluster"] == props[1]["cluster"] != props[2]["cluster"]
        assert doc["features"][2]["geometry"]["coordinates"] == [-88.0, 42.0]

    def test_geojson_carries_median_income(self, tmp_path):
        result = kmeans(np.array([[0.0], [9.0]]), 2, seed=0)
        cents = {"a": (-87.0, 41.0), "b": (-88.0, 42.0)}
        path = write_clusters(result, ["a", "b"], tmp_path / "c.geojson", centroids=cents,
                              target=np.array([52000.0, np.nan]))
        props = [f["properties"] for f in json.loads(path.read_text())["features"]]
        assert [p["median_income"] for p in props] == [52000.0, None]
        assert all("target" not in p for p in props)

    def test_csv_fallback_median_income_column(self, tmp_path):
        result = kmeans(np.array([[0.0], [1.0]]), 2, seed=0)
        path = write_clusters(result, ["a", "b"], tmp_path / "c.geojson", target=np.array([1.0, 2.0]))
        assert path.read_text().splitlines()[0] == "geoid,cluster,median_income"

    def test_csv_fallback_without_centroids(self, tmp_path):
        result = kmeans(np.array([[0.0], [1.0]]), 2, seed=0)
        path = write_clusters(result, ["a", "b"], tmp_path / "c.geojson")
        assert path.suffix == ".csv"
        assert path.read_text().splitlines()[0] == "geoid,cluster"
