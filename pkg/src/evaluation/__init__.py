"""
Evaluation
==========

Splits, R², seed and fold aggregation, the (city, method, init, d)
benchmark grid, the input-feature comparison and results files.
"""

from .cache import get_cached, store_cached
from .comparison import run_feature_comparison
from .crossval import FoldScores, aggregate_seeds, cross_validate, safe_r_squared, seed_statistics
from .features import FEATURE_SETS, MissingDataError, concat_features, feature_matrix, standardize_block
from .grid import (
    METHODS, GridSettings, build_cells, gnn_config, head_config, learned_embedding, run_cell, run_grid,
    run_seed, vnn_config,
)
from .metrics import r_squared
from .report import EvalReport, GridCell
from .results import RESULT_COLUMNS, pivot_results, read_results, results_frame, write_results
from .split import SPLIT_KINDS, SplitPlan, labeled_nodes, make_split, split_for_target

__all__ = [
    'EvalReport',
    'FEATURE_SETS',
    'FoldScores',
    'GridCell',
    'GridSettings',
    'METHODS',
    'MissingDataError',
    'RESULT_COLUMNS',
    'SPLIT_KINDS',
    'SplitPlan',
    'aggregate_seeds',
    'build_cells',
    'concat_features',
    'cross_validate',
    'feature_matrix',
    'get_cached',
    'gnn_config',
    'head_config',
    'labeled_nodes',
    'learned_embedding',
    'make_split',
    'pivot_results',
    'r_squared',
    'read_results',
    'results_frame',
    'run_cell',
    'run_feature_comparison',
    'run_grid',
    'run_seed',
    'safe_r_squared',
    'seed_statistics',
    'split_for_target',
    'standardize_block',
    'store_cached',
    'vnn_config',
]
