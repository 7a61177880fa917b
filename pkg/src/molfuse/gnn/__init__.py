"""Graph neural network layers and batching."""

from .batch import EmptyGraphError, GnnError, GraphBatch
from .layers import (
    GnnConfig,
    GraphEncoder,
    attentive_fp_encode,
    attentive_readout,
    afp_node_layer,
    gat_layer,
    gcn_layer,
    glorot,
    gru_cell,
    readout,
    zeros,
)

__all__ = [
    "EmptyGraphError",
    "GnnConfig",
    "GnnError",
    "GraphBatch",
    "GraphEncoder",
    "afp_node_layer",
    "attentive_fp_encode",
    "attentive_readout",
    "gat_layer",
    "gcn_layer",
    "glorot",
    "gru_cell",
    "readout",
    "zeros",
]
