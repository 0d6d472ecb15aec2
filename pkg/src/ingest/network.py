"""
Network assembly, canonical edge-list I/O, and network statistics.

Canonical edge-list format: three columns origin,destination,count sorted
lexicographically by (origin, destination). Isolated nodes are written as a
zero-count self row so the node universe survives a round trip.

Mobility Analytics Team — 2026-10
"""

import logging
from typing import Iterable, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel
from scipy import sparse

from graph.network import MobilityNetwork
from .models import FlowRecord, ODParseError

logger = logging.getLogger(__name__)


class NetworkStats(BaseModel):
    """Commute network summary (one row of the city statistics table)."""
    n_nodes: int
    n_edges: int                        # non-zero directed entries
    total_flow: float
    avg_weight_all_pairs: float         # total / N^2
    avg_weight_nonzero: float           # total / n_edges
    self_loop_flow: float
    n_isolated: int
    out_degree_min: int
    out_degree_median: float
    out_degree_max: int
    in_degree_min: int
    in_degree_median: float
    in_degree_max: int


def build_network(
    flows: List[FlowRecord],
    regions: Optional[Iterable[str]] = None,
) -> MobilityNetwork:
    """Assemble a directed weighted graph from aggregated flow records.

    Parameters
    ----------
    flows : List[FlowRecord]
        Records aggregated to one geo level. Self-loop flows are kept.
    regions : iterable of str, optional
        Region universe. When given, it defines the node set (isolated
        regions allowed); flows touching regions outside it are dropped
        with a warning. Otherwise nodes are the union of flow endpoints.

    Returns
    -------
    MobilityNetwork
        Nodes sorted by RegionId; duplicate (origin, destination) records summed.
    """
    if regions is not None:
        geoids = sorted(set(regions))
    else:
        geoids = sorted({r.origin for r in flows} | {r.destination for r in flows})
    if not geoids:
        raise ValueError("no nodes: empty flow list and no region universe")

    index = {g: i for i, g in enumerate(geoids)}
    rows, cols, vals = [], [], []
    dropped = 0
    for rec in flows:
        if rec.count < 0:
            raise ODParseError(f"negative count {rec.count} for {rec.origin}->{rec.destination}")
        i = index.get(rec.origin)
        j = index.get(rec.destination)
        if i is None or j is None:
            dropped += 1
            continue
        rows.append(i)
        cols.append(j)
        vals.append(rec.count)
    if dropped:
        logger.warning("Dropped %d flows with endpoints outside the region universe", dropped)

    n = len(geoids)
    adj = sparse.coo_matrix(
        (np.asarray(vals, dtype=np.float64), (np.asarray(rows, dtype=int), np.asarray(cols, dtype=int))),
        shape=(n, n),
    ).tocsr()
    adj.sum_duplicates()
    adj.eliminate_zeros()
    return MobilityNetwork(geoids=tuple(geoids), adjacency=adj)


def network_to_records(net: MobilityNetwork) -> List[FlowRecord]:
    coo = net.adjacency.tocoo()
    out = [
        FlowRecord(net.geoids[i], net.geoids[j], int(round(v)))
        for i, j, v in zip(coo.row, coo.col, coo.data) if v != 0
    ]
    return sorted(out, key=lambda r: (r.origin, r.destination))


def edge_list_frame(net: MobilityNetwork) -> pd.DataFrame:
    """Canonical edge list as a DataFrame (isolated nodes as zero self rows)."""
    coo = net.adjacency.tocoo()
    keep = coo.data != 0
    geo = np.asarray(net.geoids, dtype=object)
    frame = pd.DataFrame({
        "origin": geo[coo.row[keep]],
        "destination": geo[coo.col[keep]],
        "count": coo.data[keep],
    })
    touched = set(frame["origin"]) | set(frame["destination"])
    isolated = [g for g in net.geoids if g not in touched]
    if isolated:
        frame = pd.concat([
            frame,
            pd.DataFrame({"origin": isolated, "destination": isolated, "count": 0.0}),
        ], ignore_index=True)
    if np.all(np.mod(frame["count"].to_numpy(), 1) == 0):
        frame["count"] = frame["count"].astype(np.int64)
    return frame.sort_values(["origin", "destination"], kind="mergesort").reset_index(drop=True)


def write_edge_list(net: MobilityNetwork, path: str, delimiter: str = ","):
    edge_list_frame(net).to_csv(path, sep=delimiter, index=False)


def read_edge_list(path: str, delimiter: str = ",") -> MobilityNetwork:
    """Parse a canonical edge list back into a network."""
    try:
        frame = pd.read_csv(path, sep=delimiter, dtype={"origin": str, "destination": str})
    except pd.errors.EmptyDataError:
        raise ODParseError("empty edge list", path=path)
    for col in ("origin", "destination", "count"):
        if col not in frame.columns:
            raise ODParseError(f"missing column {col!r}", path=path)
    counts = pd.to_numeric(frame["count"], errors="coerce")
    bad = counts.isna() | (counts < 0)
    if bad.any():
        line = int(np.flatnonzero(bad.to_numpy())[0]) + 2
        raise ODParseError(f"bad count {frame['count'][bad].iloc[0]!r}", path=path, line=line)

    geoids = sorted(set(frame["origin"]) | set(frame["destination"]))
    if not geoids:
        raise ValueError("no nodes in edge list")
    index = {g: i for i, g in enumerate(geoids)}
    rows = frame["origin"].map(index).to_numpy()
    cols = frame["destination"].map(index).to_numpy()
    n = len(geoids)
    adj = sparse.coo_matrix(
        (counts.to_numpy(dtype=np.float64), (rows, cols)), shape=(n, n)
    ).tocsr()
    adj.sum_duplicates()
    adj.eliminate_zeros()
    return MobilityNetwork(geoids=tuple(geoids), adjacency=adj)


def job_counts(net: MobilityNetwork) -> np.ndarray:
    """Workplace job totals per region (column sums: destination = work)."""
    return np.asarray(net.adjacency.sum(axis=0)).ravel()


def resident_worker_counts(net: MobilityNetwork) -> np.ndarray:
    """Resident worker totals per region (row sums: origin = home)."""
    return np.asarray(net.adjacency.sum(axis=1)).ravel()


def network_stats(net: MobilityNetwork) -> NetworkStats:
    """Node/edge counts, average weights under both denominators, degrees."""
    adj = net.adjacency
    n = net.n
    n_edges = int((adj.data != 0).sum())
    total = float(adj.sum())
    binary = (adj != 0).astype(np.int64)
    out_deg = np.asarray(binary.sum(axis=1)).ravel()
    in_deg = np.asarray(binary.sum(axis=0)).ravel()
    isolated = int(np.sum((out_deg + in_deg - 2 * (adj.diagonal() != 0)) == 0))
    return NetworkStats(
        n_nodes=n,
        n_edges=n_edges,
        total_flow=total,
        avg_weight_all_pairs=total / float(n * n),
        avg_weight_nonzero=total / n_edges if n_edges else 0.0,
        self_loop_flow=float(adj.diagonal().sum()),
        n_isolated=isolated,
        out_degree_min=int(out_deg.min()),
        out_degree_median=float(np.median(out_deg)),
        out_degree_max=int(out_deg.max()),
        in_degree_min=int(in_deg.min()),
        in_degree_median=float(np.median(in_deg)),
        in_degree_max=int(in_deg.max()),
    )
