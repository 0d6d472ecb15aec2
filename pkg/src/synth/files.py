"""
Write a planted city in the same file formats ingest consumes.

    od.csv          LODES columns w_geocode,h_geocode,S000 with 15-digit
                    block codes (several blocks per tract)
    income.csv      GEOID,median_income (ACS-style '1400000US' prefixes)
    centroids.csv   GEOID,lon,lat
    density.csv     GEOID,population,area_km2
    features.csv    GEOID,noise_0,...
    complaints.csv  GEOID,category (one row per 311 record)

Mobility Analytics Team — 2026-10
"""

import json
import logging
from pathlib import Path
from typing import Dict, Union

import numpy as np
import pandas as pd

from atomic_io import atomic_path, write_text_atomic
from config import LODES_COUNT_COLUMN, LODES_HOME_COLUMN, LODES_WORK_COLUMN
from .planted import PlantedCity

logger = logging.getLogger(__name__)

BLOCKS_PER_TRACT = 3
ACS_PREFIX = "1400000US"


def _write_frame(frame: pd.DataFrame, path: Path):
    with atomic_path(path) as tmp:
        frame.to_csv(tmp, index=False)


def od_frame(city: PlantedCity, rng: np.random.Generator) -> pd.DataFrame:
    """Tract flows split over random block pairs; tract truncation recovers them."""
    coo = city.network.adjacency.tocoo()
    geoids = city.network.geoids
    rows = []
    for i, j, count in zip(coo.row, coo.col, coo.data.astype(np.int64)):
        if count <= 0:
            continue
        parts = rng.multinomial(count, np.ones(BLOCKS_PER_TRACT) / BLOCKS_PER_TRACT)
        for part in parts[parts > 0]:
            home = f"{geoids[i]}{rng.integers(1000, 1000 + BLOCKS_PER_TRACT):04d}"
            work = f"{geoids[j]}{rng.integers(1000, 1000 + BLOCKS_PER_TRACT):04d}"
            rows.append((work, home, int(part)))
    return pd.DataFrame(rows, columns=[LODES_WORK_COLUMN, LODES_HOME_COLUMN, LODES_COUNT_COLUMN])


def write_city(city: PlantedCity, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """Write every input file of a city plus a ``truth.json`` with communities."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(city.seed + 1)
    vals = city.attributes.values
    geoids = list(vals.index)
    paths = {name: out / f"{name}.csv" for name in
             ("od", "income", "centroids", "density", "features", "complaints")}

    _write_frame(od_frame(city, rng), paths["od"])
    _write_frame(pd.DataFrame({"GEOID": [ACS_PREFIX + g for g in geoids],
                               "median_income": vals["median_income"].round(0).to_numpy()}),
                 paths["income"])
    _write_frame(pd.DataFrame({"GEOID": geoids,
                               "lon": [city.centroids[g][0] for g in geoids],
                               "lat": [city.centroids[g][1] for g in geoids]}),
                 paths["centroids"])
    _write_frame(pd.DataFrame({"GEOID": geoids, "population": vals["population"].to_numpy(),
                               "area_km2": vals["area_km2"].to_numpy()}),
                 paths["density"])
    noise_cols = [c for c in vals.columns if c.startswith("noise_")]
    features = vals[noise_cols].reset_index().rename(columns={"geoid": "GEOID"})
    _write_frame(features, paths["features"])
    _write_frame(city.complaints, paths["complaints"])

    truth = {"seed": city.seed, "config": city.config.model_dump(mode="json"),
             "communities": {g: int(c) for g, c in zip(city.network.geoids, city.communities)}}
    paths["truth"] = out / "truth.json"
    write_text_atomic(paths["truth"], json.dumps(truth, indent=2))
    logger.info("Wrote planted city (%d tracts) to %s", len(geoids), out)
    return paths
