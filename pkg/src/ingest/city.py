"""
City bundle: a network plus every per-region table aligned to it.

Mobility Analytics Team — 2026-10
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from graph.network import MobilityNetwork
from .attributes import (
    align_attributes, align_columns, parse_attribute_file, parse_centroid_file,
    parse_complaint_file,
)
from .lodes import parse_od_file
from .models import AttributeSchema
from .network import build_network, job_counts

logger = logging.getLogger(__name__)


@dataclass
class CityData:
    """Everything the models need for one city, in network node order."""
    name: str
    network: MobilityNetwork
    target: np.ndarray                                  # N, NaN = missing
    centroids: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    features: Dict[str, np.ndarray] = field(default_factory=dict)   # name -> N x k

    def __post_init__(self):
        if self.target.shape != (self.network.n,):
            raise ValueError(
                f"target length {self.target.shape} does not match {self.network.n} nodes"
            )
        for name, block in self.features.items():
            if block.ndim != 2 or block.shape[0] != self.network.n:
                raise ValueError(f"feature block {name!r} has shape {block.shape}")

    @property
    def labeled(self) -> np.ndarray:
        """Indices of nodes with a non-missing target."""
        return np.flatnonzero(np.isfinite(self.target))


def load_city(
    name: str,
    od_path: str,
    income_path: str,
    centroid_path: Optional[str] = None,
    income_column: str = "median_income",
    density_path: Optional[str] = None,
    complaint_path: Optional[str] = None,
    area_column: str = "area_km2",
    population_column: str = "population",
    universe: bool = False,
    extra_features: Optional[Dict[str, str]] = None,
    regions: Optional[Sequence[str]] = None,
) -> CityData:
    """Parse and align the files for one city.

    ``regions`` fixes the node set explicitly (a GEOID universe file);
    ``universe=True`` restricts nodes to the regions of the income file.
    With both, the node set is their intersection.

    Feature blocks built when the inputs are present:
    ``population_density`` and ``job_density`` (from density_path; job
    counts come from the OD matrix column sums divided by area), ``311``
    (complaint category proportions) and one block per ``extra_features``
    entry (block name -> attribute file, every non-region column).
    """
    flows = parse_od_file(od_path)
    income = parse_attribute_file(income_path, AttributeSchema(
        columns=[income_column], positive_columns=[income_column],
    ))
    if universe:
        regions = sorted(set(income.regions) & set(regions)) if regions is not None else income.regions
    net = build_network(flows, regions=regions)
    income = income.with_network(net.geoids)
    target = align_attributes(net, income, income_column)

    centroids = parse_centroid_file(centroid_path) if centroid_path else {}

    features: Dict[str, np.ndarray] = {}
    if density_path:
        dens = parse_attribute_file(density_path, AttributeSchema(
            columns=[population_column, area_column], positive_columns=[area_column],
        ))
        area = align_attributes(net, dens, area_column)
        population = align_attributes(net, dens, population_column)
        features["population_density"] = (population / area)[:, None]
        features["job_density"] = (job_counts(net) / area)[:, None]
    if complaint_path:
        complaints = parse_complaint_file(complaint_path)
        features["311"] = align_columns(net, complaints)
    for block, path in (extra_features or {}).items():
        features[block] = align_columns(net, parse_attribute_file(path))

    logger.info("Loaded city %s: %d nodes, %d with target, features %s",
                name, net.n, int(np.isfinite(target).sum()), sorted(features))
    return CityData(name=name, network=net, target=target,
                    centroids=centroids, features=features)
