"""
Data models for census ingestion.

Mobility Analytics Team — 2026-10
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd

TRACT_DIGITS = 11
BLOCK_DIGITS = 15


class ODParseError(ValueError):
    """Malformed origin-destination input; names the file and line."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(f"{where}{message}")


class AttributeParseError(ValueError):
    """Malformed attribute table (duplicate regions, missing columns)."""


class RegionMismatchError(ValueError):
    """Two region sets that must agree do not."""

    def __init__(self, only_left, only_right):
        self.only_left = sorted(only_left)
        self.only_right = sorted(only_right)
        super().__init__(
            f"Region sets differ: {len(self.only_left)} only in left "
            f"{self.only_left[:10]}, {len(self.only_right)} only in right "
            f"{self.only_right[:10]}"
        )


@dataclass(frozen=True)
class FlowRecord:
    """One aggregated commute flow (home -> work)."""
    origin: str         # home RegionId
    destination: str    # work RegionId
    count: int          # commuters per day


@dataclass
class AttributeSchema:
    """Column spec for a per-region attribute file."""
    region_column: str = "GEOID"
    columns: Optional[List[str]] = None        # None -> every non-region column
    positive_columns: List[str] = field(default_factory=list)  # <= 0 flagged missing
    normalize: bool = False                    # rows -> proportions (311 counts)
    delimiter: str = ","


@dataclass
class AttributeTable:
    """Per-region named real-valued columns with an explicit missing mask.

    Missing values are NaN in ``values`` and True in ``missing``; they are
    never filled with zero.
    """
    values: pd.DataFrame                # index: RegionId, float64 columns
    missing: pd.DataFrame               # same shape, bool
    warnings: int = 0                   # unparsable cells flagged missing
    absent_from_network: Optional[pd.Series] = None   # bool per region

    @property
    def regions(self) -> List[str]:
        return list(self.values.index)

    @property
    def columns(self) -> List[str]:
        return list(self.values.columns)

    def __len__(self) -> int:
        return len(self.values)

    def column(self, name: str) -> pd.Series:
        if name not in self.values.columns:
            raise KeyError(f"Unknown attribute column: {name!r}")
        return self.values[name]

    def with_network(self, geoids) -> "AttributeTable":
        """Flag (but keep) rows whose region is not a network node."""
        nodes = set(geoids)
        absent = pd.Series(
            [r not in nodes for r in self.values.index],
            index=self.values.index, dtype=bool,
        )
        return AttributeTable(
            values=self.values, missing=self.missing,
            warnings=self.warnings, absent_from_network=absent,
        )

    def row_sums(self) -> np.ndarray:
        return self.values.sum(axis=1, skipna=True).to_numpy()
