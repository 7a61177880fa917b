"""Differentiable primitive operations on Tensors."""

from __future__ import annotations

import numpy as np

from .tensor import ShapeMismatchError, Tensor, as_tensor, make_result


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to the original operand shape."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and g.shape[i] > 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    data = a.data + b.data
    return make_result(data, (a, b), lambda g: (
        _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    data = a.data - b.data
    return make_result(data, (a, b), lambda g: (
        _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)))


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    data = a.data * b.data
    return make_result(data, (a, b), lambda g: (
        _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)))


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    data = a.data / b.data
    return make_result(data, (a, b), lambda g: (
        _unbroadcast(g / b.data, a.shape),
        _unbroadcast(-g * a.data / (b.data * b.data), b.shape)))


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeMismatchError(f"matmul expects 2-D tensors, got {a.shape} @ {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatchError(f"matmul inner dims differ: {a.shape} @ {b.shape}")
    data = a.data @ b.data
    return make_result(data, (a, b), lambda g: (g @ b.data.T, a.data.T @ g))


def exp(a) -> Tensor:
    a = as_tensor(a)
    data = np.exp(a.data)
    return make_result(data, (a,), lambda g: (g * data,))


def log(a) -> Tensor:
    a = as_tensor(a)
    return make_result(np.log(a.data), (a,), lambda g: (g / a.data,))


def tanh(a) -> Tensor:
    a = as_tensor(a)
    data = np.tanh(a.data)
    return make_result(data, (a,), lambda g: (g * (1.0 - data * data),))


def sigmoid(a) -> Tensor:
    a = as_tensor(a)
    data = 1.0 / (1.0 + np.exp(-np.clip(a.data, -500, 500)))
    return make_result(data, (a,), lambda g: (g * data * (1.0 - data),))


def relu(a) -> Tensor:
    a = as_tensor(a)
    data = np.maximum(a.data, 0.0)
    return make_result(data, (a,), lambda g: (g * (a.data > 0),))


def leaky_relu(a, slope: float = 0.2) -> Tensor:
    a = as_tensor(a)
    data = np.where(a.data > 0, a.data, slope * a.data)
    return make_result(data, (a,), lambda g: (g * np.where(a.data > 0, 1.0, slope),))


def pow_const(a, p: float) -> Tensor:
    a = as_tensor(a)
    data = a.data ** p
    return make_result(data, (a,), lambda g: (g * p * a.data ** (p - 1),))


def softmax(a, axis: int = -1, mask: np.ndarray | None = None) -> Tensor:
    """Numerically stabilized softmax; masked-out entries get zero weight.

    ``mask`` is a constant boolean array broadcastable to ``a``; rows with no
    valid entry come out all-zero rather than NaN.
    """
    a = as_tensor(a)
    x = a.data
    if mask is not None:
        mask = np.broadcast_to(np.asarray(mask, dtype=bool), x.shape)
        x = np.where(mask, x, -np.inf)
    m = np.max(x, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    e = np.exp(x - m)
    denom = e.sum(axis=axis, keepdims=True)
    y = e / np.where(denom == 0.0, 1.0, denom)

    def backward_fn(g):
        inner = (g * y).sum(axis=axis, keepdims=True)
        return (y * (g - inner),)

    return make_result(y, (a,), backward_fn)


def concat(parts, axis: int = 0) -> Tensor:
    parts = [as_tensor(p) for p in parts]
    if not parts:
        raise ShapeMismatchError("concat of zero tensors")
    data = np.concatenate([p.data for p in parts], axis=axis)
    sizes = [p.shape[axis] for p in parts]
    splits = np.cumsum(sizes)[:-1]

    def backward_fn(g):
        return tuple(np.split(g, splits, axis=axis))

    return make_result(data, tuple(parts), backward_fn)


def tsum(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    data = a.data.sum(axis=axis, keepdims=keepdims)

    def backward_fn(g):
        if axis is None:
            return (np.broadcast_to(g, a.shape).copy(),)
        gg = g if keepdims else np.expand_dims(g, axis)
        return (np.broadcast_to(gg, a.shape).copy(),)

    return make_result(data, (a,), backward_fn)


def tmean(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    if axis is None:
        count = a.size
    else:
        count = a.shape[axis]
    return mul(tsum(a, axis=axis, keepdims=keepdims), 1.0 / count)


def transpose(a) -> Tensor:
    a = as_tensor(a)
    if a.ndim != 2:
        raise ShapeMismatchError(f"transpose expects a 2-D tensor, got {a.shape}")
    return make_result(a.data.T.copy(), (a,), lambda g: (g.T,))


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    data = a.data.reshape(shape)
    return make_result(data, (a,), lambda g: (g.reshape(a.shape),))


def gather_rows(a, index) -> Tensor:
    """Select rows along the first axis; duplicates allowed."""
    a = as_tensor(a)
    idx = np.asarray(index, dtype=np.intp)
    if idx.ndim != 1:
        raise ShapeMismatchError("gather_rows index must be 1-D")
    if idx.size and (idx.min() < 0 or idx.max() >= a.shape[0]):
        raise ShapeMismatchError("gather_rows index out of range")
    data = a.data[idx]

    def backward_fn(g):
        ga = np.zeros_like(a.data)
        np.add.at(ga, idx, g)
        return (ga,)

    return make_result(data, (a,), backward_fn)


def scatter_add_rows(a, index, n_rows: int) -> Tensor:
    """out[index[i]] += a[i]; rows absent from index stay zero."""
    a = as_tensor(a)
    idx = np.asarray(index, dtype=np.intp)
    if idx.ndim != 1 or idx.shape[0] != a.shape[0]:
        raise ShapeMismatchError("scatter_add_rows index must match rows of input")
    if idx.size and (idx.min() < 0 or idx.max() >= n_rows):
        raise ShapeMismatchError("scatter_add_rows index out of range")
    out = np.zeros((n_rows,) + a.shape[1:], dtype=a.dtype)
    np.add.at(out, idx, a.data)
    return make_result(out, (a,), lambda g: (g[idx],))


def dropout(a, rate: float, rng: np.random.Generator) -> Tensor:
    """Inverted dropout; identity when rate == 0."""
    a = as_tensor(a)
    if rate <= 0.0:
        return a
    keep = (rng.random(a.shape) >= rate) / (1.0 - rate)
    return make_result(a.data * keep, (a,), lambda g: (g * keep,))


def bce_with_logits(logits, targets: np.ndarray, mask: np.ndarray | None = None) -> Tensor:
    """Mean binary cross entropy from logits; masked entries contribute nothing.

    Stable form softplus(z) - z*y per entry. A fully-masked input yields a
    constant zero (no gradient flows).
    """
    z = as_tensor(logits)
    y = np.asarray(targets, dtype=np.float64)
    if y.shape != z.shape:
        raise ShapeMismatchError(f"targets {y.shape} vs logits {z.shape}")
    if mask is None:
        m = np.ones_like(y)
    else:
        m = np.asarray(mask, dtype=np.float64)
        if m.shape != z.shape:
            raise ShapeMismatchError(f"mask {m.shape} vs logits {z.shape}")
    count = m.sum()
    if count == 0:
        return Tensor(0.0)
    x = z.data
    softplus = np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))
    value = (m * (softplus - x * y)).sum() / count
    sig = 1.0 / (1.0 + np.exp(-np.clip(x, -500, 500)))

    def backward_fn(g):
        return (g * m * (sig - y) / count,)

    return make_result(np.asarray(value), (z,), backward_fn)


def segment_max(values: np.ndarray, segment_ids: np.ndarray, n_segments: int) -> np.ndarray:
    """Per-segment max of a 1-D array (plain numpy; used for stabilization)."""
    out = np.full(n_segments, -np.inf)
    np.maximum.at(out, segment_ids, values)
    return np.where(np.isfinite(out), out, 0.0)
