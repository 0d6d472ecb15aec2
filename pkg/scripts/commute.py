#!/usr/bin/env python3
"""
Commute-network CLI: synthetic cities, network statistics, embeddings,
clustering, model training and benchmark grids.

Usage:
    python scripts/commute.py synth --out data/planted --seed 7
    python scripts/commute.py grid --config config/synthetic.yaml --workers 4

Environment:
    COMMUTE_*           — library defaults (see src/config.py; .env is read)
    COMMUTE_CACHE_DB    — SQLite grid-cell cache used with --cache

Mobility Analytics Team — 2026-10
"""

import os
import sys

# Ensure src/ is on the path
_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
_SRC = os.path.join(_ROOT, 'src')
if _SRC not in sys.path:
    sys.path.insert(0, _SRC)

from cli import main  # noqa: E402

if __name__ == '__main__':
    sys.exit(main())
