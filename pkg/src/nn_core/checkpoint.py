"""
Parameter checkpoints: numpy .npz container of named float64 arrays plus a
JSON metadata entry. Round-trips bit-exactly.

Mobility Analytics Team — 2026-10
"""

import json
import logging
import zipfile
from typing import Any, Dict, Optional, Tuple

import numpy as np

from atomic_io import atomic_path
from .params import ModelParams

logger = logging.getLogger(__name__)

_META_KEY = "__meta__"

# fixed member timestamp so identical parameters give identical bytes
_ZIP_DATE = (1980, 1, 1, 0, 0, 0)


def save_checkpoint(params: ModelParams, path: str, metadata: Optional[Dict[str, Any]] = None):
    arrays = params.state_dict()
    if _META_KEY in arrays:
        raise ValueError(f"parameter name {_META_KEY!r} is reserved")
    meta = dict(metadata or {})
    meta["order"] = params.names()
    arrays[_META_KEY] = np.array(json.dumps(meta, sort_keys=True))
    with atomic_path(path) as tmp:
        with zipfile.ZipFile(tmp, "w", compression=zipfile.ZIP_STORED, allowZip64=True) as zf:
            for name, value in arrays.items():
                info = zipfile.ZipInfo(f"{name}.npy", date_time=_ZIP_DATE)
                with zf.open(info, "w", force_zip64=True) as member:
                    np.lib.format.write_array(member, np.asanyarray(value), allow_pickle=False)
    logger.info("Saved checkpoint with %d tensors to %s", len(params), path)


def load_checkpoint(path: str) -> Tuple[ModelParams, Dict[str, Any]]:
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data[_META_KEY])) if _META_KEY in data.files else {}
        order = meta.get("order") or [k for k in data.files if k != _META_KEY]
        state = {name: data[name].astype(np.float64) for name in order}
    return ModelParams.from_state_dict(state), meta
