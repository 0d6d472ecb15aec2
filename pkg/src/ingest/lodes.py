"""
LODES origin-destination parser.

Reads LEHD Origin-Destination Employment Statistics tables (one row per
home-block -> work-block pair with a total-jobs column) and aggregates
them to the census-tract level.

Column names vary by LODES vintage, so the work/home/count columns are
configurable; defaults come from config (w_geocode, h_geocode, S000).

Mobility Analytics Team — 2026-10
"""

import logging
import re
from typing import List, Optional

import numpy as np
import pandas as pd

from config import (
    DEFAULT_DELIMITER, LODES_COUNT_COLUMN, LODES_HOME_COLUMN, LODES_WORK_COLUMN,
)
from .models import BLOCK_DIGITS, TRACT_DIGITS, FlowRecord, ODParseError

logger = logging.getLogger(__name__)

GEO_LEVELS = ("block", "tract")

# pandas tokenizer errors read "Expected 3 fields in line 7, saw 4"
_PANDAS_LINE = re.compile(r"line (\d+)")


def truncate_geoid(code: str, geo_level: str = "tract") -> str:
    """Map a block or tract code to the requested geo level.

    A 15-digit block code keeps its leading 11 digits at tract level;
    an 11-digit tract code is returned unchanged.
    """
    if geo_level not in GEO_LEVELS:
        raise ValueError(f"Unknown geo level: {geo_level!r}. Supported: {GEO_LEVELS}")
    code = code.strip()
    if not code.isdigit():
        raise ODParseError(f"non-numeric region code {code!r}")
    if geo_level == "block":
        if len(code) != BLOCK_DIGITS:
            raise ODParseError(f"expected {BLOCK_DIGITS}-digit block code, got {code!r}")
        return code
    if len(code) == BLOCK_DIGITS:
        return code[:TRACT_DIGITS]
    if len(code) == TRACT_DIGITS:
        return code
    raise ODParseError(f"expected {BLOCK_DIGITS}- or {TRACT_DIGITS}-digit code, got {code!r}")


def _first_bad(mask: pd.Series, line_offset: int) -> int:
    return int(np.flatnonzero(mask.to_numpy())[0]) + line_offset


def _undecodable_line(path: str) -> Optional[int]:
    """1-based number of the first line that is not valid UTF-8."""
    with open(path, "rb") as fh:
        for number, raw in enumerate(fh, start=1):
            try:
                raw.decode("utf-8")
            except UnicodeDecodeError:
                return number
    return None


def _read_od_frame(
    path: str,
    work_column: str,
    home_column: str,
    count_column: str,
    delimiter: str,
    header: bool,
) -> pd.DataFrame:
    try:
        frame = pd.read_csv(
            path, sep=delimiter, dtype=str, header=0 if header else None,
            keep_default_na=False, encoding="utf-8", skipinitialspace=True,
        )
    except pd.errors.EmptyDataError:
        raise ODParseError("empty OD file", path=path)
    except pd.errors.ParserError as exc:
        match = _PANDAS_LINE.search(str(exc))
        raise ODParseError(
            f"malformed row ({exc})", path=path, line=int(match.group(1)) if match else None,
        ) from exc
    except UnicodeDecodeError as exc:
        raise ODParseError(
            f"file is not valid UTF-8 ({exc.reason})", path=path, line=_undecodable_line(path),
        ) from exc

    if not header:
        if frame.shape[1] < 3:
            raise ODParseError("headerless OD file needs work, home, count columns", path=path)
        frame = frame.iloc[:, :3]
        frame.columns = [work_column, home_column, count_column]

    missing = [c for c in (work_column, home_column, count_column) if c not in frame.columns]
    if missing:
        raise ODParseError(f"missing columns {missing}; found {list(frame.columns)}", path=path)
    if frame.empty:
        raise ODParseError("empty OD file", path=path)
    return frame


def parse_od_file(
    path: str,
    geo_level: str = "tract",
    work_column: str = LODES_WORK_COLUMN,
    home_column: str = LODES_HOME_COLUMN,
    count_column: str = LODES_COUNT_COLUMN,
    delimiter: str = DEFAULT_DELIMITER,
    header: bool = True,
) -> List[FlowRecord]:
    """Parse a LODES OD table into aggregated flow records.

    Parameters
    ----------
    path : str
        Delimited text file, UTF-8.
    geo_level : str
        'tract' truncates 15-digit block codes to 11 digits; 'block' keeps them.
    work_column, home_column, count_column : str
        Column names for the work code, home code, and total-jobs count.
    delimiter : str
        Field separator (comma by default).
    header : bool
        Whether the first row is a header. Without one, the first three
        columns are taken as work, home, count (LODES column order).

    Returns
    -------
    List[FlowRecord]
        Sorted by (origin, destination); duplicates after truncation summed.

    Raises
    ------
    ODParseError
        Empty file, missing columns, ragged rows, invalid UTF-8, non-numeric
        count, or wrong code length.
        The message names the offending line.
    """
    if geo_level not in GEO_LEVELS:
        raise ValueError(f"Unknown geo level: {geo_level!r}. Supported: {GEO_LEVELS}")

    frame = _read_od_frame(path, work_column, home_column, count_column, delimiter, header)
    line_offset = 2 if header else 1

    work = frame[work_column].str.strip()
    home = frame[home_column].str.strip()
    counts = frame[count_column].str.strip()

    bad_count = ~counts.str.fullmatch(r"\d+")
    if bad_count.any():
        line = _first_bad(bad_count, line_offset)
        raise ODParseError(
            f"non-numeric or negative count {counts[bad_count].iloc[0]!r}",
            path=path, line=line,
        )

    allowed = (BLOCK_DIGITS,) if geo_level == "block" else (BLOCK_DIGITS, TRACT_DIGITS)
    for name, codes in (("work", work), ("home", home)):
        ok = codes.str.fullmatch(r"\d+") & codes.str.len().isin(allowed)
        if not ok.all():
            line = _first_bad(~ok, line_offset)
            raise ODParseError(
                f"bad {name} code {codes[~ok].iloc[0]!r} (expected {allowed} digits)",
                path=path, line=line,
            )

    if geo_level == "tract":
        work = work.str.slice(0, TRACT_DIGITS)
        home = home.str.slice(0, TRACT_DIGITS)

    flows = pd.DataFrame({
        "origin": home.to_numpy(),
        "destination": work.to_numpy(),
        "count": counts.astype(np.int64).to_numpy(),
    })
    grouped = (
        flows.groupby(["origin", "destination"], sort=True)["count"].sum().reset_index()
    )
    logger.info(
        "Parsed %d OD rows from %s into %d %s-level flows",
        len(frame), path, len(grouped), geo_level,
    )
    return [
        FlowRecord(origin=o, destination=d, count=int(c))
        for o, d, c in grouped.itertuples(index=False, name=None)
    ]


def aggregate_flows(flows: List[FlowRecord], geo_level: str = "tract") -> List[FlowRecord]:
    """Re-aggregate already parsed records to a (coarser) geo level."""
    totals = {}
    for rec in flows:
        key = (truncate_geoid(rec.origin, geo_level), truncate_geoid(rec.destination, geo_level))
        if rec.count < 0:
            raise ODParseError(f"negative count for {key}")
        totals[key] = totals.get(key, 0) + rec.count
    return [FlowRecord(o, d, c) for (o, d), c in sorted(totals.items())]


def records_total(flows: Optional[List[FlowRecord]]) -> int:
    return sum(r.count for r in flows or ())
