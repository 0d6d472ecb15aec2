"""
Run configuration: pydantic models loaded from flat dotted-key YAML
(``input.od: data/od.csv``, ``model.method: gcn``), a run manifest, or
defaults, with command-line flags applied on top.

Mobility Analytics Team — 2026-10
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml
from pydantic import BaseModel, Field, field_validator

from atomic_io import write_text_atomic
from config import DEFAULT_SEEDS, EMBEDDING_DIM, KMEANS_K, TRAIN_FRACTION, WEIGHT_TRANSFORM
from evaluation import FEATURE_SETS

logger = logging.getLogger(__name__)

# command-line spellings -> internal names
METHOD_ALIASES = {"vnn": "vnn_two_step", "gcn": "gcn_vnn", "gat": "gat_vnn", "features": "feature_mlp"}
INIT_ALIASES = {"randomwalk": "random_walk", "random_walk": "random_walk",
                "spatial": "spatial", "svd": "svd", "laplacian": "laplacian"}


class InputConfig(BaseModel):
    od: Optional[str] = None
    income: Optional[str] = None
    income_column: str = "median_income"
    centroids: Optional[str] = None
    complaints: Optional[str] = None
    density: Optional[str] = None
    features: Optional[str] = None          # extra attribute file, block name "features"
    universe: Optional[str] = None          # GEOID list fixing the node set


class ModelConfig(BaseModel):
    method: str = "vnn"
    init: str = "spatial"
    d: int = EMBEDDING_DIM
    weight_transform: str = WEIGHT_TRANSFORM
    learned: bool = False                   # embed: write the VNN-trained table instead of the init

    @field_validator("method")
    @classmethod
    def _method(cls, v):
        if v not in METHOD_ALIASES and v not in METHOD_ALIASES.values():
            raise ValueError(f"unknown method {v!r}; choose from {sorted(METHOD_ALIASES)}")
        return v

    @field_validator("init")
    @classmethod
    def _init(cls, v):
        if v not in INIT_ALIASES:
            raise ValueError(f"unknown init {v!r}; choose from {sorted(INIT_ALIASES)}")
        return v

    @property
    def method_name(self) -> str:
        return METHOD_ALIASES.get(self.method, self.method)

    @property
    def init_name(self) -> str:
        return INIT_ALIASES[self.init]


class EvalConfig(BaseModel):
    seeds: List[int] = Field(default_factory=lambda: list(DEFAULT_SEEDS))
    split: str = f"holdout:{TRAIN_FRACTION}"
    k: int = KMEANS_K                       # clusters for the cluster command

    @field_validator("split")
    @classmethod
    def _split(cls, v):
        parse_split(v)
        return v


class GridConfig(BaseModel):
    methods: List[str] = Field(default_factory=lambda: ["vnn", "gcn", "gat"])
    inits: List[str] = Field(default_factory=lambda: ["spatial", "svd", "laplacian", "randomwalk"])
    dims: List[int] = Field(default_factory=lambda: [EMBEDDING_DIM])
    feature_sets: List[str] = Field(default_factory=lambda: ["311"])
    comparison: List[str] = Field(default_factory=lambda: list(FEATURE_SETS))   # features command
    workers: int = 1
    cache: bool = False


class SynthConfig(BaseModel):
    n: int = 60
    communities: int = 2
    lambda_in: float = 5.0
    lambda_out: float = 0.2
    income_gradient: float = 0.0
    income_noise: float = 3000.0


class TrainingConfig(BaseModel):
    """Optional epoch / rate overrides (None keeps library defaults)."""
    vnn_epochs: Optional[int] = None
    vnn_lr: Optional[float] = None
    head_epochs: Optional[int] = None
    gnn_epochs: Optional[int] = None
    gnn_lr: Optional[float] = None
    dropout: float = 0.0
    weight_decay: float = 0.0


class RunConfig(BaseModel):
    city: str = "city"
    out: str = "output"
    input: InputConfig = Field(default_factory=InputConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    eval: EvalConfig = Field(default_factory=EvalConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    synth: SynthConfig = Field(default_factory=SynthConfig)
    training: TrainingConfig = Field(default_factory=TrainingConfig)

    @classmethod
    def from_flat(cls, flat: Dict[str, Any]) -> "RunConfig":
        return cls.model_validate(unflatten(flat))

    def to_flat(self) -> Dict[str, Any]:
        return flatten(self.model_dump(mode="json"))

    def with_overrides(self, overrides: Dict[str, Any]) -> "RunConfig":
        flat = self.to_flat()
        unknown = [k for k in overrides if k not in flat]
        if unknown:
            raise KeyError(f"Unknown config keys: {unknown}")
        flat.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.from_flat(flat)

    def validate_paths(self, required: Tuple[str, ...] = ()):
        """Referenced input files must exist; the output directory must be writable."""
        inputs = self.input.model_dump()
        for key in required:
            if not inputs.get(key):
                raise ValueError(f"config key input.{key} is required for this command")
        missing = [f"input.{k}={v}" for k, v in inputs.items()
                   if k != "income_column" and v and not os.path.exists(v)]
        if missing:
            raise FileNotFoundError(f"input files not found: {missing}")
        out = Path(self.out)
        out.mkdir(parents=True, exist_ok=True)
        if not os.access(out, os.W_OK):
            raise PermissionError(f"output directory {out} is not writable")


def parse_split(spec: str) -> Tuple[str, float]:
    """'holdout:0.7' -> ('holdout', 0.7); 'kfold:5' -> ('kfold', 5)."""
    kind, _, value = spec.partition(":")
    if kind == "holdout":
        frac = float(value) if value else TRAIN_FRACTION
        if not 0.0 < frac < 1.0:
            raise ValueError(f"holdout fraction must be in (0, 1), got {frac}")
        return kind, frac
    if kind == "kfold":
        k = int(value) if value else 5
        if k < 2:
            raise ValueError(f"kfold needs k >= 2, got {k}")
        return kind, k
    raise ValueError(f"split must look like holdout:0.7 or kfold:5, got {spec!r}")


def flatten(tree: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat = {}
    for key, value in tree.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def unflatten(flat: Dict[str, Any]) -> Dict[str, Any]:
    tree: Dict[str, Any] = {}
    for key, value in flat.items():
        node = tree
        parts = str(key).split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ValueError(f"config key {key!r} conflicts with a scalar value")
        node[parts[-1]] = value
    return tree


def load_config(path: Optional[str]) -> RunConfig:
    """Read a flat YAML config or a run manifest (JSON with a ``config`` entry)."""
    if not path:
        return RunConfig()
    with open(path, encoding="utf-8") as f:
        text = f.read()
    if path.endswith(".json"):
        data = json.loads(text)
        flat = data.get("config", data)
    else:
        flat = yaml.safe_load(text) or {}
    if not isinstance(flat, dict):
        raise ValueError(f"{path}: config must be a mapping of dotted keys")
    logger.info("Loaded run config from %s (%d keys)", path, len(flat))
    return RunConfig.from_flat(flat)


def write_config(config: RunConfig, path: str):
    write_text_atomic(path, yaml.safe_dump(config.to_flat(), sort_keys=True))
