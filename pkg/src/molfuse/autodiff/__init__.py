"""Tensor engine: reverse-mode autodiff, Adam, checkpoints."""

from .checkpoint import CheckpointError, load_params, save_params
from .optim import Adam, OptimizerState, adam_step
from .ops import (
    add,
    bce_with_logits,
    concat,
    div,
    dropout,
    exp,
    gather_rows,
    leaky_relu,
    log,
    matmul,
    mul,
    pow_const,
    relu,
    reshape,
    scatter_add_rows,
    segment_max,
    sigmoid,
    softmax,
    sub,
    tanh,
    tmean,
    transpose,
    tsum,
)
from .tensor import (
    AutodiffError,
    DetachedGraphError,
    NotScalarError,
    ShapeMismatchError,
    Tape,
    Tensor,
    as_tensor,
    backward,
    default_dtype,
    no_grad,
    set_default_dtype,
)

__all__ = [
    "Adam",
    "AutodiffError",
    "CheckpointError",
    "DetachedGraphError",
    "NotScalarError",
    "OptimizerState",
    "ShapeMismatchError",
    "Tape",
    "Tensor",
    "adam_step",
    "add",
    "as_tensor",
    "backward",
    "bce_with_logits",
    "concat",
    "default_dtype",
    "div",
    "dropout",
    "exp",
    "gather_rows",
    "leaky_relu",
    "load_params",
    "log",
    "matmul",
    "mul",
    "no_grad",
    "pow_const",
    "relu",
    "reshape",
    "save_params",
    "scatter_add_rows",
    "segment_max",
    "set_default_dtype",
    "sigmoid",
    "softmax",
    "sub",
    "tanh",
    "tmean",
    "transpose",
    "tsum",
]
