"""
Embedding and cluster-map files.

Embedding text format: comma-delimited, header ``geoid,<method>_d<d>_0,...``
so method and dimension survive the round trip. Cluster maps are GeoJSON
point features at each region's centroid, or a delimited table when no
centroids are known.

Mobility Analytics Team — 2026-10
"""

import json
import logging
import re
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from atomic_io import atomic_path, write_text_atomic
from .models import ClusterAssignment, EmbeddingMatrix

logger = logging.getLogger(__name__)

_COLUMN_RE = re.compile(r"^(?P<method>[a-z_]+)_d(?P<d>\d+)_(?P<k>\d+)$")


def write_embedding(emb: EmbeddingMatrix, path: Union[str, Path], geoids: Optional[Sequence[str]] = None) -> Path:
    geoids = list(geoids if geoids is not None else (emb.geoids or [f"{i}" for i in range(emb.n)]))
    if len(geoids) != emb.n:
        raise ValueError("geoids length does not match embedding rows")
    cols = [f"{emb.method}_d{emb.d}_{k}" for k in range(emb.d)]
    frame = pd.DataFrame(emb.values, columns=cols)
    frame.insert(0, "geoid", geoids)
    path = Path(path)
    with atomic_path(path) as tmp:
        frame.to_csv(tmp, index=False, float_format="%.17g")
    logger.info("Wrote %s embedding (%d x %d) to %s", emb.method, emb.n, emb.d, path)
    return path


def read_embedding(path: Union[str, Path]) -> EmbeddingMatrix:
    frame = pd.read_csv(path, dtype={"geoid": str})
    if frame.columns[0] != "geoid" or frame.shape[1] < 2:
        raise ValueError(f"{path}: not an embedding file (expected 'geoid' then value columns)")
    matches = [_COLUMN_RE.match(c) for c in frame.columns[1:]]
    if not all(matches):
        raise ValueError(f"{path}: unrecognised embedding header {list(frame.columns[1:])}")
    method = matches[0].group("method")
    d = int(matches[0].group("d"))
    if d != len(matches):
        raise ValueError(f"{path}: header declares d={d} but has {len(matches)} columns")
    return EmbeddingMatrix(values=frame.iloc[:, 1:].to_numpy(dtype=np.float64), method=method,
                           geoids=tuple(frame["geoid"]))


def clusters_frame(assignment: ClusterAssignment, geoids: Sequence[str],
                   target: Optional[np.ndarray] = None) -> pd.DataFrame:
    frame = pd.DataFrame({"geoid": list(geoids), "cluster": assignment.labels.astype(int)})
    if target is not None:
        frame["median_income"] = np.asarray(target, dtype=np.float64)
    return frame


def write_clusters(
    assignment: ClusterAssignment,
    geoids: Sequence[str],
    path: Union[str, Path],
    centroids: Optional[Dict[str, Tuple[float, float]]] = None,
    target: Optional[np.ndarray] = None,
) -> Path:
    """GeoJSON FeatureCollection when every region has a centroid, else CSV.

    ``target`` is written as the ``median_income`` property (null when missing).
    """
    path = Path(path)
    frame = clusters_frame(assignment, geoids, target)
    if not centroids or any(g not in centroids for g in geoids):
        if centroids:
            logger.warning("Some regions lack centroids; writing cluster table instead of GeoJSON")
        path = path.with_suffix(".csv")
        with atomic_path(path) as tmp:
            frame.to_csv(tmp, index=False)
        return path

    features = []
    for row in frame.itertuples(index=False):
        lon, lat = centroids[row.geoid]
        props = {"geoid": row.geoid, "cluster": int(row.cluster)}
        if target is not None:
            props["median_income"] = None if np.isnan(row.median_income) else float(row.median_income)
        features.append({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [float(lon), float(lat)]},
            "properties": props,
        })
    write_text_atomic(path, json.dumps({"type": "FeatureCollection", "features": features}))
    logger.info("Wrote %d cluster features to %s", len(features), path)
    return path
