"""
Results tables: flat CSV rows, a city x (method, init) pivot, and the JSON
report of every cell.

Mobility Analytics Team — 2026-10
"""

import json
import logging
from pathlib import Path
from typing import List, Sequence, Union

import pandas as pd

from atomic_io import atomic_path, write_text_atomic
from .report import GridCell

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ["city", "method", "init", "features", "d", "seeds", "r2_mean", "r2_halfwidth",
                  "status", "error"]


def results_frame(cells: Sequence[GridCell]) -> pd.DataFrame:
    rows = []
    for cell in cells:
        rep = cell.report
        rows.append({
            "city": cell.city,
            "method": cell.method,
            "init": cell.init,
            "features": cell.options.get("features", ""),
            "d": cell.d,
            "seeds": " ".join(str(s) for s in cell.seeds),
            "r2_mean": rep.r2_mean if rep is not None else float("nan"),
            "r2_halfwidth": rep.r2_halfwidth if rep is not None else float("nan"),
            "status": cell.status,
            "error": cell.error,
        })
    return pd.DataFrame(rows, columns=RESULT_COLUMNS)


def pivot_results(frame: pd.DataFrame) -> pd.DataFrame:
    """City rows, one column per method/init[/d], cells "mean ± half" or "NA"."""
    def _fmt(row):
        if row["status"] != "ok":
            return "NA"
        return f"{row['r2_mean']:.3f} ± {row['r2_halfwidth']:.3f}"

    frame = frame.copy()
    frame["column"] = frame.apply(
        lambda r: "/".join(str(p) for p in (r["method"], r["features"] or r["init"], r["d"])
                           if p not in ("", None) and not pd.isna(p)),
        axis=1,
    )
    frame["value"] = frame.apply(_fmt, axis=1)
    return frame.pivot_table(index="city", columns="column", values="value", aggfunc="first")


def write_results(cells: Sequence[GridCell], csv_path: Union[str, Path], json_path: Union[str, Path]):
    frame = results_frame(cells)
    with atomic_path(csv_path) as tmp:
        frame.to_csv(tmp, index=False)
    payload = [cell.model_dump(mode="json") for cell in cells]
    write_text_atomic(json_path, json.dumps(payload, indent=2))
    logger.info("Wrote %d grid cells to %s and %s", len(cells), csv_path, json_path)


def read_results(json_path: Union[str, Path]) -> List[GridCell]:
    with open(json_path, encoding="utf-8") as f:
        return [GridCell.model_validate(item) for item in json.load(f)]
