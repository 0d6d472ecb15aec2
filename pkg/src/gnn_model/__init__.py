"""
Graph neural network models
===========================

Two graph layers (GCN or multi-head GAT) over an initial node embedding,
followed by an MLP head, trained end-to-end against a node-level target.

Public API:
-----------
    GnnConfig, GnnModel            - architecture and parameters
    gcn_layer, gat_layer           - single layers
    train_end_to_end               - masked transductive training + report
    extract_hidden                 - H¹ / H² as an embedding table
"""

from .layers import COMBINE_MODES, check_neighborhoods, gat_head, gat_layer, gcn_layer
from .model import LAYER_KINDS, ForwardResult, GnnConfig, GnnModel, LayerState
from .train import extract_hidden, fit_gnn, train_end_to_end

__all__ = [
    'COMBINE_MODES',
    'ForwardResult',
    'GnnConfig',
    'GnnModel',
    'LAYER_KINDS',
    'LayerState',
    'check_neighborhoods',
    'extract_hidden',
    'fit_gnn',
    'gat_head',
    'gat_layer',
    'gcn_layer',
    'train_end_to_end',
]
