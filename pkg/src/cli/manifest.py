"""
Run manifests: the effective config, seeds, library versions and wall time
written next to every command's outputs. A manifest can be passed back as
``--config`` to replay the run.

Mobility Analytics Team — 2026-10
"""

import json
import platform
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pandas as pd
import pydantic
import scipy
from pydantic import BaseModel, Field

from atomic_io import write_text_atomic
from .config import RunConfig


def library_versions() -> Dict[str, str]:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "pydantic": pydantic.VERSION,
    }


class RunManifest(BaseModel):
    command: str
    config: Dict[str, Any]
    seeds: List[int] = Field(default_factory=list)
    versions: Dict[str, str] = Field(default_factory=library_versions)
    started_at: str = Field(default_factory=lambda: datetime.now().isoformat(timespec="seconds"))
    wall_time_s: float = 0.0
    timings: Dict[str, float] = Field(default_factory=dict)      # runtime_s per report, seconds
    outputs: List[str] = Field(default_factory=list)
    status: str = "ok"
    errors: List[Dict[str, Any]] = Field(default_factory=list)


class ManifestRecorder:
    """Collects outputs of one command and writes ``manifest_<command>.json`` at the end."""

    def __init__(self, command: str, config: RunConfig, seeds: List[int]):
        self._t0 = time.perf_counter()
        self.manifest = RunManifest(command=command, config=config.to_flat(), seeds=list(seeds))
        self.out_dir = Path(config.out)

    def add_output(self, path) -> Path:
        self.manifest.outputs.append(str(path))
        return Path(path)

    def add_timing(self, label: str, seconds: float):
        self.manifest.timings[label] = round(float(seconds), 3)

    def add_error(self, where: str, message: str):
        self.manifest.errors.append({"where": where, "message": message})
        self.manifest.status = "failed"

    def write(self) -> Path:
        self.manifest.wall_time_s = round(time.perf_counter() - self._t0, 3)
        path = self.out_dir / f"manifest_{self.manifest.command}.json"
        write_text_atomic(path, json.dumps(self.manifest.model_dump(mode="json"), indent=2))
        return path
