"""
Tests for planted-community synthetic cities and their on-disk files.

All tests use synthetic data — no network dependency.
"""

import sys
import os
import json

import numpy as np
import pandas as pd
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from ingest import load_city
from synth import ACS_PREFIX, PlantedCityConfig, generate, tract_geoids, write_city


def _cross_mask(planted):
    c = planted.communities
    return c[:, None] != c[None, :]


# ── Config ──────────────────────────────────────────────────────────────────

class TestPlantedCityConfig:
    def test_defaults(self):
        config = PlantedCityConfig()
        assert config.n == 60
        assert config.communities == 2

    def test_too_few_nodes(self):
        with pytest.raises(ValueError):
            PlantedCityConfig(n=5)

    def test_rates_ordered(self):
        with pytest.raises(ValueError):
            PlantedCityConfig(lambda_in=0.1, lambda_out=0.5)

    def test_community_count(self):
        with pytest.raises(ValueError):
            PlantedCityConfig(n=10, communities=1)


# ── Generation ──────────────────────────────────────────────────────────────

class TestGenerate:
    def test_geoids(self):
        assert tract_geoids(2) == ("17031000100", "17031000200")
        planted = generate(PlantedCityConfig(n=20), 0)
        assert planted.network.geoids == tract_geoids(20)
        assert all(len(g) == 11 for g in planted.network.geoids)

    def test_balanced_communities(self):
        planted = generate(PlantedCityConfig(n=30, communities=3), 0)
        np.testing.assert_array_equal(np.bincount(planted.communities), [10, 10, 10])

    def test_no_cross_flows_when_rate_zero(self):
        planted = generate(PlantedCityConfig(n=40, lambda_out=0.0), 1)
        assert planted.network.dense()[_cross_mask(planted)].sum() == 0

    def test_poisson_rates(self):
        planted = generate(PlantedCityConfig(n=200, lambda_in=5.0, lambda_out=0.2), 2)
        a = planted.network.dense()
        cross = _cross_mask(planted)
        assert a[~cross].mean() == pytest.approx(5.0, rel=0.1)
        assert a[~cross].var() == pytest.approx(5.0, rel=0.1)
        assert a[cross].mean() == pytest.approx(0.2, rel=0.1)

    def test_noise_free_income_is_constant_per_community(self):
        planted = generate(PlantedCityConfig(n=30, income_noise=0.0), 3)
        for c in range(2):
            incomes = planted.target[planted.communities == c]
            np.testing.assert_array_equal(incomes, 45000.0 + 30000.0 * c)

    def test_income_gradient_follows_longitude(self):
        config = PlantedCityConfig(n=40, income_noise=0.0, income_gap=0.0, income_gradient=1e5)
        planted = generate(config, 4)
        lon = np.array([planted.centroids[g][0] for g in planted.network.geoids])
        assert np.corrcoef(lon, planted.target)[0, 1] == pytest.approx(1.0)

    def test_income_floor(self):
        planted = generate(PlantedCityConfig(n=20, income_base=-1e6, income_gap=0.0), 5)
        np.testing.assert_array_equal(planted.target, 1000.0)

    def test_deterministic_per_seed(self):
        a = generate(PlantedCityConfig(n=20), 7)
        b = generate(PlantedCityConfig(n=20), 7)
        c = generate(PlantedCityConfig(n=20), 8)
        np.testing.assert_array_equal(a.network.dense(), b.network.dense())
        np.testing.assert_array_equal(a.target, b.target)
        assert not np.array_equal(a.network.dense(), c.network.dense())

    def test_feature_blocks(self):
        planted = generate(PlantedCityConfig(n=20, noise_features=2), 0)
        blocks = planted.features()
        assert set(blocks) == {"population_density", "job_density", "noise", "311"}
        assert blocks["noise"].shape == (20, 2)
        assert blocks["311"].shape == (20, 5)
        np.testing.assert_allclose(blocks["311"].sum(axis=1), 1.0)
        assert (blocks["population_density"] > 0).all()

    def test_city_data(self):
        planted = generate(PlantedCityConfig(n=20), 0)
        city = planted.to_city_data("test")
        assert city.name == "test"
        np.testing.assert_array_equal(city.target, planted.target)
        assert set(city.centroids) == set(planted.network.geoids)


# ── Files ───────────────────────────────────────────────────────────────────

class TestWriteCity:
    def test_files_written(self, tmp_path):
        paths = write_city(generate(PlantedCityConfig(n=20), 0), tmp_path)
        assert set(paths) == {"od", "income", "centroids", "density", "features", "complaints", "truth"}
        assert all(p.exists() for p in paths.values())

    def test_od_uses_block_codes(self, tmp_path):
        paths = write_city(generate(PlantedCityConfig(n=20), 0), tmp_path)
        od = pd.read_csv(paths["od"], dtype=str)
        assert list(od.columns) == ["w_geocode", "h_geocode", "S000"]
        assert od["w_geocode"].str.len().eq(15).all()
        assert od["h_geocode"].str.len().eq(15).all()

    def test_income_has_acs_prefix(self, tmp_path):
        paths = write_city(generate(PlantedCityConfig(n=20), 0), tmp_path)
        income = pd.read_csv(paths["income"], dtype={"GEOID": str})
        assert income["GEOID"].str.startswith(ACS_PREFIX).all()

    def test_truth(self, tmp_path):
        planted = generate(PlantedCityConfig(n=20), 9)
        paths = write_city(planted, tmp_path)
        truth = json.loads(paths["truth"].read_text())
        assert truth["seed"] == 9
        assert truth["config"]["n"] == 20
        assert [truth["communities"][g] for g in planted.network.geoids] == planted.communities.tolist()

    def test_round_trip_through_ingest(self, tmp_path):
        planted = generate(PlantedCityConfig(n=24), 1)
        paths = write_city(planted, tmp_path)
        city = load_city("planted", str(paths["od"]), str(paths["income"]),
                         centroid_path=str(paths["centroids"]), density_path=str(paths["density"]),
                         complaint_path=str(paths["complaints"]))
        assert city.network.geoids == planted.network.geoids
        np.testing.assert_array_equal(city.network.dense(), planted.network.dense())
        np.testing.assert_allclose(city.target, np.round(planted.target))
        np.testing.assert_allclose(city.features["311"], planted.features()["311"])
        lon, lat = city.centroids[planted.network.geoids[0]]
        assert lon == pytest.approx(planted.centroids[planted.network.geoids[0]][0])
