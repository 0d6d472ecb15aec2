"""
SQLite cache for grid-cell reports.

Stores the EvalReport JSON of a finished cell keyed by the cell's
configuration fingerprint (city, method, init, d, seeds, options) to avoid
re-training models for cells already computed. Failures are logged and
treated as misses.

Mobility Analytics Team — 2026-10
"""

import logging
import os
import sqlite3
from datetime import datetime
from typing import Optional

from config import CACHE_DB_PATH
from .report import EvalReport, GridCell

logger = logging.getLogger(__name__)


def _get_db_path() -> str:
    path = os.getenv("COMMUTE_CACHE_DB", CACHE_DB_PATH)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    return path


def _init_db(conn: sqlite3.Connection):
    conn.execute("""
        CREATE TABLE IF NOT EXISTS grid_cache (
            cache_key TEXT PRIMARY KEY,
            city TEXT,
            method TEXT,
            created_at TEXT,
            report_json TEXT
        )
    """)
    conn.commit()


def get_cached(cell: GridCell) -> Optional[EvalReport]:
    """Look up a cached report. Returns None if not found."""
    try:
        conn = sqlite3.connect(_get_db_path())
        _init_db(conn)
        row = conn.execute(
            "SELECT report_json FROM grid_cache WHERE cache_key = ?",
            (cell.fingerprint(),),
        ).fetchone()
        conn.close()

        if row:
            logger.info("Cache hit for %s", cell.label)
            return EvalReport.model_validate_json(row[0])
        return None
    except Exception as e:
        logger.warning("Cache lookup failed: %s", e)
        return None


def store_cached(cell: GridCell, report: EvalReport):
    """Store a finished cell's report."""
    try:
        conn = sqlite3.connect(_get_db_path())
        _init_db(conn)
        conn.execute(
            """INSERT OR REPLACE INTO grid_cache
               (cache_key, city, method, created_at, report_json)
               VALUES (?, ?, ?, ?, ?)""",
            (cell.fingerprint(), cell.city, cell.method,
             datetime.now().isoformat(), report.model_dump_json()),
        )
        conn.commit()
        conn.close()
        logger.info("Cached report for %s", cell.label)
    except Exception as e:
        logger.warning("Cache store failed: %s", e)
