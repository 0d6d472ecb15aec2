"""
Tests for graph structures: weight transforms, degrees, normalized adjacency,
neighborhoods and message-passing topology.

All tests use synthetic data — no network dependency.
"""

import sys
import os

import numpy as np
import pytest
from scipy import sparse

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from graph import (
    MobilityNetwork, degree_matrix, edge_index, neighborhood, normalize_adjacency,
    propagation_matrix, transform_weights,
)


def _make_random_net(n=6, seed=0, density=0.5):
    rng = np.random.default_rng(seed)
    counts = rng.integers(1, 20, size=(n, n)) * (rng.random((n, n)) < density)
    return MobilityNetwork.from_dense(counts)


def _dense_a_hat(net, transform, symmetrize):
    a = transform_weights(net.dense(), transform)
    if symmetrize:
        a = 0.5 * (a + a.T)
    a = a + np.eye(net.n)
    d = a.sum(axis=1)
    return a / np.sqrt(np.outer(d, d))


# ── MobilityNetwork ─────────────────────────────────────────────────────────

class TestMobilityNetwork:
    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            MobilityNetwork(geoids=("a", "b"), adjacency=sparse.csr_matrix(np.zeros((3, 3))))

    def test_duplicate_geoids(self):
        with pytest.raises(ValueError, match="Duplicate"):
            MobilityNetwork(geoids=("a", "a"), adjacency=sparse.csr_matrix(np.zeros((2, 2))))

    def test_negative_entries(self):
        with pytest.raises(ValueError):
            MobilityNetwork.from_dense([[0, -1], [0, 0]])

    def test_non_square(self):
        with pytest.raises(ValueError):
            MobilityNetwork.from_dense(np.zeros((2, 3)))

    def test_index(self):
        net = MobilityNetwork.from_dense(np.zeros((3, 3)), geoids=["c", "a", "b"])
        assert net.index == {"c": 0, "a": 1, "b": 2}

    def test_permuted(self):
        net = _make_random_net()
        order = [5, 4, 3, 2, 1, 0]
        perm = net.permuted(order)
        np.testing.assert_array_equal(perm.dense(), net.dense()[np.ix_(order, order)])
        assert perm.geoids[0] == net.geoids[5]

    def test_permuted_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            _make_random_net().permuted([0, 0, 1, 2, 3, 4])


# ── Weight transforms ───────────────────────────────────────────────────────

class TestTransformWeights:
    def test_log1p_dense_and_sparse_agree(self):
        net = _make_random_net()
        dense = transform_weights(net.dense(), "log1p")
        sp = transform_weights(net.adjacency, "log1p").toarray()
        np.testing.assert_allclose(dense, sp, atol=1e-15)
        np.testing.assert_allclose(dense, np.log1p(net.dense()))

    def test_binary(self):
        out = transform_weights(np.array([[0, 3], [7, 0]]), "binary")
        np.testing.assert_array_equal(out, [[0, 1], [1, 0]])

    def test_raw_copies(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = transform_weights(a, "raw")
        out[0, 0] = 99
        assert a[0, 0] == 1.0

    def test_unknown(self):
        with pytest.raises(ValueError, match="Unknown weight transform"):
            transform_weights(np.zeros((2, 2)), "sqrt")


# ── Degrees ─────────────────────────────────────────────────────────────────

class TestDegree:
    def test_two_cycle_with_self_loops(self):
        net = MobilityNetwork.from_dense([[0, 1], [1, 0]])
        np.testing.assert_array_equal(degree_matrix(net), [2, 2])

    def test_isolated_node(self):
        net = MobilityNetwork.from_dense(np.zeros((3, 3)))
        np.testing.assert_array_equal(degree_matrix(net), [1, 1, 1])

    def test_weighted_symmetrized(self):
        net = MobilityNetwork.from_dense([[0, 3], [5, 0]])
        np.testing.assert_allclose(degree_matrix(net, weighted=True, symmetrize=True), [5, 5])

    def test_unweighted_counts_neighbors(self):
        net = MobilityNetwork.from_dense([[0, 3, 2], [5, 0, 0], [0, 0, 0]])
        np.testing.assert_array_equal(degree_matrix(net, weighted=False), [3, 2, 2])

    def test_all_positive(self):
        assert (degree_matrix(_make_random_net(density=0.1)) > 0).all()


# ── Normalized adjacency ────────────────────────────────────────────────────

class TestNormalizeAdjacency:
    def test_two_cycle_binary(self):
        net = MobilityNetwork.from_dense([[0, 1], [1, 0]])
        a_hat = normalize_adjacency(net, weight_transform="binary").dense()
        np.testing.assert_allclose(a_hat, [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)

    def test_empty_graph_is_identity(self):
        net = MobilityNetwork.from_dense(np.zeros((4, 4)))
        np.testing.assert_array_equal(normalize_adjacency(net).dense(), np.eye(4))

    @pytest.mark.parametrize("transform", ["raw", "log1p", "binary"])
    @pytest.mark.parametrize("symmetrize", [True, False])
    def test_matches_dense_formula(self, transform, symmetrize):
        for seed in range(5):
            net = _make_random_net(seed=seed)
            got = normalize_adjacency(net, symmetrize=symmetrize, weight_transform=transform).dense()
            np.testing.assert_allclose(got, _dense_a_hat(net, transform, symmetrize), atol=1e-12)

    def test_sparse_and_dense_paths_agree(self):
        net = _make_random_net(seed=3)
        sp = normalize_adjacency(net).dense()
        dn = normalize_adjacency(net, dense=True).matrix
        np.testing.assert_allclose(sp, dn, atol=1e-12)

    def test_symmetric_with_bounded_spectrum(self):
        for seed in range(10):
            net = _make_random_net(n=8, seed=seed)
            a_hat = normalize_adjacency(net, symmetrize=True).dense()
            np.testing.assert_array_equal(a_hat, a_hat.T)
            radius = np.max(np.abs(np.linalg.eigvalsh(a_hat)))
            assert radius <= 1.0 + 1e-10

    def test_metadata(self):
        out = normalize_adjacency(_make_random_net(), symmetrize=False, weight_transform="raw")
        assert out.symmetrized is False
        assert out.self_loops_added is True
        assert out.weight_transform == "raw"
        assert out.n == 6


# ── Neighborhoods and edge index ────────────────────────────────────────────

class TestNeighborhood:
    def test_path_graph(self):
        net = MobilityNetwork.from_dense([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
        assert neighborhood(net, 1) == {0, 1, 2}

    def test_isolated_node(self):
        net = MobilityNetwork.from_dense(np.zeros((3, 3)))
        assert neighborhood(net, 2) == {2}

    def test_directed_edge_symmetrized(self):
        net = MobilityNetwork.from_dense([[0, 4], [0, 0]])
        assert neighborhood(net, 1, symmetrized=True) == {0, 1}
        assert neighborhood(net, 1, symmetrized=False) == {1}

    def test_matches_row_scan(self):
        net = _make_random_net(seed=4)
        a = net.dense()
        sym = (a + a.T) > 0
        for i in range(net.n):
            expected = {int(j) for j in np.flatnonzero(sym[i])} | {i}
            assert neighborhood(net, i, symmetrized=True) == expected

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            neighborhood(_make_random_net(), 6)


class TestEdgeIndex:
    def test_sorted_by_destination(self):
        dst, src = edge_index(_make_random_net(seed=2))
        assert (np.diff(dst) >= 0).all()

    def test_agrees_with_neighborhood(self):
        net = _make_random_net(seed=5)
        dst, src = edge_index(net)
        for i in range(net.n):
            assert set(src[dst == i].tolist()) == neighborhood(net, i)

    def test_self_loops_present(self):
        net = MobilityNetwork.from_dense(np.zeros((3, 3)))
        dst, src = edge_index(net)
        np.testing.assert_array_equal(dst, [0, 1, 2])
        np.testing.assert_array_equal(src, [0, 1, 2])

    def test_propagation_matrix_dense(self):
        net = MobilityNetwork.from_dense([[0, 2], [0, 0]])
        a = propagation_matrix(net, symmetrize=True, weight_transform="raw", dense=True)
        np.testing.assert_allclose(a, [[1, 1], [1, 1]])
