"""
Pydantic models for evaluation reports and grid cells.

Mobility Analytics Team — 2026-10
"""

import hashlib
import json
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class EvalReport(BaseModel):
    """Out-of-sample result for one configuration, over one or more seeds."""
    city: str = ""
    method: str                             # vnn_two_step | gcn_vnn | gat_vnn | feature_mlp
    init: str = "-"                         # initial embedding; "-" for feature baselines
    d: Optional[int] = None
    split: str = "holdout"
    seeds: List[int] = Field(default_factory=list)
    r2_per_seed: List[float] = Field(default_factory=list)
    r2_mean: float = 0.0
    r2_halfwidth: float = 0.0               # sample std over seeds (0 for one seed)
    n_train: int = 0
    n_test: int = 0
    runtime_s: float = Field(default=0.0, exclude=True)   # logged, never serialized
    fingerprint: str = ""
    # last seed's test-node ground truth and predictions (original units)
    y_true: List[float] = Field(default_factory=list)
    y_pred: List[float] = Field(default_factory=list)
    loss_trace: List[float] = Field(default_factory=list)
    notes: str = ""

    @property
    def r2(self) -> float:
        return self.r2_mean

    def summary_row(self) -> Dict[str, Any]:
        return {
            "city": self.city, "method": self.method, "init": self.init,
            "d": self.d, "seeds": " ".join(str(s) for s in self.seeds),
            "r2_mean": self.r2_mean, "r2_halfwidth": self.r2_halfwidth,
        }


class GridCell(BaseModel):
    """One (city, method, init, d) cell of a benchmark grid."""
    city: str
    method: str
    init: str = "-"
    d: Optional[int] = None
    seeds: List[int] = Field(default_factory=list)
    options: Dict[str, Any] = Field(default_factory=dict)   # training overrides
    status: str = "pending"                 # pending | ok | NA
    error: str = ""
    report: Optional[EvalReport] = None
    cached: bool = False

    def fingerprint(self) -> str:
        """SHA-256 of the cell configuration (status and results excluded)."""
        key = {
            "city": self.city, "method": self.method, "init": self.init, "d": self.d,
            "seeds": list(self.seeds), "options": self.options,
        }
        raw = json.dumps(key, sort_keys=True, default=str)
        return hashlib.sha256(raw.encode()).hexdigest()[:32]

    @property
    def label(self) -> str:
        dim = "" if self.d is None else f"/d={self.d}"
        return f"{self.city}:{self.method}/{self.init}{dim}"
