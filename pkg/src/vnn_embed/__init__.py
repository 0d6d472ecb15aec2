"""
Edge-reconstruction embeddings and the supervised head
======================================================

Step one learns a node table E by reconstructing the transformed O-D matrix
from squared embedding differences; step two fits an MLP from E (or any
feature matrix) to the node-level target.
"""

from .model import VnnConfig, VnnEmbedModel, reconstruction_hidden
from .pairs import (
    SAMPLING_MODES,
    PairwiseBatch,
    epoch_pairs,
    make_pairs,
    pair_features,
    pair_features_array,
    reconstruction_target,
    resolve_sampling,
)
from .predict import (
    HeadConfig,
    RegressorFit,
    fit_mlp_regressor,
    predict_income_from_embedding,
    score_features,
)
from .train import build_model, initial_embedding, reconstruction_mse, train_vnn_embedding

__all__ = [
    'HeadConfig',
    'PairwiseBatch',
    'RegressorFit',
    'SAMPLING_MODES',
    'VnnConfig',
    'VnnEmbedModel',
    'build_model',
    'epoch_pairs',
    'fit_mlp_regressor',
    'initial_embedding',
    'make_pairs',
    'pair_features',
    'pair_features_array',
    'predict_income_from_embedding',
    'reconstruction_hidden',
    'reconstruction_mse',
    'reconstruction_target',
    'resolve_sampling',
    'score_features',
    'train_vnn_embedding',
]
