"""
Per-region attribute ingestion: ACS income, densities, 311 complaints,
region centroids.

Unparsable or non-positive values (ACS uses large negative sentinels such
as -666666666 for suppressed estimates) are flagged missing and counted,
never replaced by zero. Missing regions are excluded downstream from both
loss and R².

Mobility Analytics Team — 2026-10
"""

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import DEFAULT_DELIMITER
from graph.network import MobilityNetwork
from .models import TRACT_DIGITS, AttributeParseError, AttributeSchema, AttributeTable

logger = logging.getLogger(__name__)


def normalize_region_code(code) -> str:
    """Canonical RegionId from ACS-style codes.

    Handles '1400000US36061000100' (keeps the part after 'US') and tract
    codes that lost their leading zero when a tool read them as integers.
    """
    code = str(code).strip()
    if "US" in code:
        code = code.split("US", 1)[1]
    if code.isdigit() and len(code) == TRACT_DIGITS - 1:
        code = code.zfill(TRACT_DIGITS)
    return code


def _read_table(path: str, region_column: str, delimiter: str) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, sep=delimiter, dtype=str, keep_default_na=False,
                            encoding="utf-8", skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise AttributeParseError(f"{path}: empty attribute file")
    if region_column not in frame.columns:
        raise AttributeParseError(
            f"{path}: region column {region_column!r} not found in {list(frame.columns)}"
        )
    frame[region_column] = frame[region_column].map(normalize_region_code)
    dup = frame[region_column].duplicated(keep=False)
    if dup.any():
        regions = sorted(set(frame.loc[dup, region_column]))
        raise AttributeParseError(f"{path}: duplicate region rows {regions[:10]}")
    return frame.set_index(region_column)


def _normalize_rows(values: pd.DataFrame, missing: pd.DataFrame) -> Tuple[pd.DataFrame, pd.DataFrame]:
    totals = values.sum(axis=1, skipna=True)
    empty = totals <= 0
    out = values.div(totals.where(~empty), axis=0)
    missing = missing.copy()
    missing.loc[empty.to_numpy(), :] = True
    out = out.mask(missing)
    return out, missing


def parse_attribute_file(path: str, schema: Optional[AttributeSchema] = None) -> AttributeTable:
    """Parse a delimited per-region table.

    Parameters
    ----------
    path : str
        Delimited text with a region-code column and named numeric columns.
    schema : AttributeSchema, optional
        Region column, value columns, columns that must be positive, and
        whether rows are normalized to proportions.

    Returns
    -------
    AttributeTable
        Keyed by RegionId; ``warnings`` counts cells flagged missing.

    Raises
    ------
    AttributeParseError
        Duplicate region rows, missing region/value columns, empty file.
    """
    schema = schema or AttributeSchema()
    frame = _read_table(path, schema.region_column, schema.delimiter)

    columns = schema.columns or list(frame.columns)
    absent = [c for c in columns if c not in frame.columns]
    if absent:
        raise AttributeParseError(f"{path}: missing columns {absent}")

    values = frame[columns].apply(lambda s: pd.to_numeric(s.str.strip(), errors="coerce"))
    values = values.astype(np.float64)
    missing = values.isna() | ~np.isfinite(values.fillna(0.0))
    for col in schema.positive_columns:
        if col not in values.columns:
            raise AttributeParseError(f"{path}: positive column {col!r} not in schema")
        missing[col] = missing[col] | (values[col] <= 0)

    warnings = int(missing.to_numpy().sum())
    if warnings:
        logger.warning("%s: %d values unparsable or out of range, flagged missing", path, warnings)

    if schema.normalize:
        values, missing = _normalize_rows(values.mask(missing), missing)
    values = values.mask(missing)
    values.index.name = "geoid"
    missing.index.name = "geoid"
    return AttributeTable(values=values, missing=missing, warnings=warnings)


def parse_complaint_file(
    path: str,
    region_column: str = "GEOID",
    category_column: str = "category",
    delimiter: str = DEFAULT_DELIMITER,
) -> AttributeTable:
    """Aggregate raw 311 records into per-tract category proportions.

    One input row per complaint; output columns are complaint categories,
    each row sums to 1.
    """
    try:
        frame = pd.read_csv(path, sep=delimiter, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise AttributeParseError(f"{path}: empty complaint file")
    for col in (region_column, category_column):
        if col not in frame.columns:
            raise AttributeParseError(f"{path}: column {col!r} not found")
    frame[region_column] = frame[region_column].map(normalize_region_code)
    blank = (frame[region_column] == "") | (frame[category_column].str.strip() == "")
    if blank.any():
        logger.warning("%s: skipped %d complaint rows without region or category", path, int(blank.sum()))
        frame = frame[~blank]
    counts = pd.crosstab(frame[region_column], frame[category_column].str.strip()).astype(np.float64)
    proportions = counts.div(counts.sum(axis=1), axis=0)
    proportions.index.name = "geoid"
    proportions.columns.name = None
    missing = pd.DataFrame(False, index=proportions.index, columns=proportions.columns)
    logger.info("%s: %d complaints over %d regions, %d categories",
                path, len(frame), len(proportions), proportions.shape[1])
    return AttributeTable(values=proportions, missing=missing, warnings=int(blank.sum()))


def parse_centroid_file(
    path: str,
    region_column: str = "GEOID",
    lon_column: str = "lon",
    lat_column: str = "lat",
    delimiter: str = DEFAULT_DELIMITER,
) -> Dict[str, Tuple[float, float]]:
    """Read pre-computed region centroids as RegionId -> (lon, lat)."""
    table = parse_attribute_file(path, AttributeSchema(
        region_column=region_column, columns=[lon_column, lat_column], delimiter=delimiter,
    ))
    complete = ~table.missing.any(axis=1)
    if not complete.all():
        logger.warning("%s: %d regions without usable coordinates", path, int((~complete).sum()))
    vals = table.values[complete]
    return {
        g: (float(lon), float(lat))
        for g, lon, lat in zip(vals.index, vals[lon_column], vals[lat_column])
    }


def align_attributes(net: MobilityNetwork, table: AttributeTable, column: str) -> np.ndarray:
    """Column values in network node order; NaN where missing or absent.

    Regions in the table that are not network nodes are dropped with a
    warning.
    """
    series = table.column(column)
    nodes = set(net.geoids)
    extra = [r for r in series.index if r not in nodes]
    if extra:
        logger.warning("%d regions in attribute table are not network nodes; dropped", len(extra))
    aligned = series.reindex(list(net.geoids))
    missing = aligned.isna().sum()
    if missing:
        logger.info("%d of %d nodes have no %r value", int(missing), net.n, column)
    return aligned.to_numpy(dtype=np.float64)


def align_columns(net: MobilityNetwork, table: AttributeTable,
                  columns: Optional[Sequence[str]] = None) -> np.ndarray:
    """Several columns in node order (N x k), NaN where missing."""
    columns = list(columns) if columns is not None else table.columns
    return np.column_stack([align_attributes(net, table, c) for c in columns])
