"""
Planted-community synthetic cities.

Flows are Poisson: rate λ_in between nodes of the same community (the
diagonal included), λ_out across communities. Income per node is
base + gap·community + gradient·(lon - lon₀) + N(0, σ²), so the income
signal lives in the commute structure and, by the gradient term, partly in
space.

Mobility Analytics Team — 2026-10
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, model_validator

from graph import MobilityNetwork
from ingest.city import CityData
from ingest.models import AttributeTable
from ingest.network import job_counts

logger = logging.getLogger(__name__)

STATE_COUNTY = "17031"
ORIGIN_LON, ORIGIN_LAT = -87.75, 41.85


class PlantedCityConfig(BaseModel):
    """Generator parameters."""
    n: int = 60
    communities: int = 2
    lambda_in: float = 5.0                  # within-community Poisson rate
    lambda_out: float = 0.2                 # across-community Poisson rate
    income_base: float = 45000.0            # USD/year, community 0
    income_gap: float = 30000.0             # added per community index
    income_gradient: float = 0.0            # USD per degree of longitude
    income_noise: float = 3000.0            # σ of the gaussian term
    income_floor: float = 1000.0            # incomes are clipped to stay positive
    community_spacing: float = 0.02         # degrees between community centers
    spatial_jitter: float = 0.05            # σ of node positions around the center
    noise_features: int = 3                 # uninformative feature columns
    complaint_signal: float = 0.5           # community tilt of 311 category mix
    complaints_per_tract: float = 40.0
    complaint_categories: Tuple[str, ...] = ("noise", "heat", "street", "sanitation", "parking")

    @model_validator(mode="after")
    def _check(self):
        if self.n < 10:
            raise ValueError(f"n must be >= 10, got {self.n}")
        if self.communities < 2 or self.communities > self.n:
            raise ValueError(f"communities must be in 2..n, got {self.communities}")
        if not self.lambda_in > self.lambda_out >= 0.0:
            raise ValueError(f"need lambda_in > lambda_out >= 0, got {self.lambda_in}, {self.lambda_out}")
        if self.income_noise < 0:
            raise ValueError("income_noise must be >= 0")
        return self


@dataclass
class PlantedCity:
    config: PlantedCityConfig
    seed: int
    network: MobilityNetwork
    communities: np.ndarray                         # N community ids
    attributes: AttributeTable                      # median_income, population, area_km2, noise_*
    centroids: Dict[str, Tuple[float, float]]
    complaints: pd.DataFrame = field(default=None)  # one row per 311 record (GEOID, category)

    @property
    def target(self) -> np.ndarray:
        return self.attributes.values["median_income"].to_numpy(dtype=np.float64)

    def features(self) -> Dict[str, np.ndarray]:
        vals = self.attributes.values
        area = vals["area_km2"].to_numpy()
        noise_cols = [c for c in vals.columns if c.startswith("noise_")]
        blocks = {
            "population_density": (vals["population"].to_numpy() / area)[:, None],
            "job_density": (job_counts(self.network) / area)[:, None],
            "noise": vals[noise_cols].to_numpy(),
        }
        if self.complaints is not None and len(self.complaints):
            counts = pd.crosstab(self.complaints["GEOID"], self.complaints["category"])
            counts = counts.reindex(list(self.network.geoids), fill_value=0).astype(np.float64)
            totals = counts.sum(axis=1).replace(0.0, np.nan)
            blocks["311"] = counts.div(totals, axis=0).to_numpy()
        return blocks

    def to_city_data(self, name: str = "planted") -> CityData:
        return CityData(name=name, network=self.network, target=self.target,
                        centroids=dict(self.centroids), features=self.features())


def tract_geoids(n: int) -> Tuple[str, ...]:
    return tuple(f"{STATE_COUNTY}{100 + 100 * i:06d}" for i in range(n))


def generate(config: PlantedCityConfig, seed: int = 0) -> PlantedCity:
    """Draw one city; deterministic per (config, seed)."""
    rng = np.random.default_rng(seed)
    n, c = config.n, config.communities
    communities = rng.permutation(np.arange(n) % c)

    same = communities[:, None] == communities[None, :]
    rates = np.where(same, config.lambda_in, config.lambda_out)
    flows = rng.poisson(rates).astype(np.float64)

    angle = 2.0 * np.pi * communities / c
    lon = ORIGIN_LON + config.community_spacing * np.cos(angle) + rng.normal(0.0, config.spatial_jitter, n)
    lat = ORIGIN_LAT + config.community_spacing * np.sin(angle) + rng.normal(0.0, config.spatial_jitter, n)

    income = (config.income_base + config.income_gap * communities
              + config.income_gradient * (lon - ORIGIN_LON)
              + rng.normal(0.0, config.income_noise, n))
    income = np.maximum(income, config.income_floor)

    population = rng.poisson(3000, n).astype(np.float64) + 1.0
    area = rng.uniform(0.5, 3.0, n)

    geoids = tract_geoids(n)
    net = MobilityNetwork.from_dense(flows, geoids)

    values = pd.DataFrame({"median_income": income, "population": population, "area_km2": area},
                          index=pd.Index(geoids, name="geoid"))
    for k in range(config.noise_features):
        values[f"noise_{k}"] = rng.normal(0.0, 1.0, n)
    attributes = AttributeTable(values=values, missing=pd.DataFrame(False, index=values.index,
                                                                     columns=values.columns))

    cats = list(config.complaint_categories)
    base = np.ones(len(cats)) / len(cats)
    rows = []
    for g, comm in zip(geoids, communities):
        tilt = np.roll(np.linspace(-1.0, 1.0, len(cats)), int(comm))
        probs = np.clip(base * (1.0 + config.complaint_signal * tilt), 1e-6, None)
        probs /= probs.sum()
        count = max(int(rng.poisson(config.complaints_per_tract)), 1)
        rows.extend((g, cat) for cat in rng.choice(cats, size=count, p=probs))
    complaints = pd.DataFrame(rows, columns=["GEOID", "category"])

    centroids = {g: (float(x), float(y)) for g, x, y in zip(geoids, lon, lat)}
    logger.info("Planted city: %d nodes, %d communities, total flow %.0f", n, c, flows.sum())
    return PlantedCity(config=config, seed=seed, network=net, communities=communities,
                       attributes=attributes, centroids=centroids, complaints=complaints)
