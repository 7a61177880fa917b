"""Dense tensors with reverse-mode automatic differentiation.

Operations build a dynamic graph of parent links and local backward
closures; ``backward`` linearizes it into a Tape (topological order, each
node visited once) and accumulates gradients into ``requires_grad`` leaves.
Forward math is vectorized numpy; float64 by default, float32 optional.
"""

from __future__ import annotations

import threading

import numpy as np


class AutodiffError(Exception):
    pass


class ShapeMismatchError(AutodiffError):
    pass


class NotScalarError(AutodiffError):
    pass


class DetachedGraphError(AutodiffError):
    pass


_state = threading.local()


def grad_enabled() -> bool:
    return getattr(_state, "grad_enabled", True)


def default_dtype():
    return getattr(_state, "default_dtype", np.float64)


def set_default_dtype(dtype) -> None:
    """Set the dtype new tensors default to: 'f64'/'f32' or a numpy dtype."""
    lookup = {"f64": np.float64, "f32": np.float32,
              np.float64: np.float64, np.float32: np.float32}
    if dtype not in lookup:
        raise ValueError(f"unsupported dtype {dtype!r}; use 'f64' or 'f32'")
    _state.default_dtype = lookup[dtype]


class no_grad:
    """Context manager disabling graph construction (frozen-model forward)."""

    def __enter__(self):
        self._prev = grad_enabled()
        _state.grad_enabled = False
        return self

    def __exit__(self, *exc):
        _state.grad_enabled = self._prev
        return False


class Tensor:
    __slots__ = ("data", "requires_grad", "grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, dtype=None):
        arr = np.asarray(data, dtype=dtype if dtype is not None else default_dtype())
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(default_dtype())
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self._parents: tuple[Tensor, ...] = ()
        self._backward = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = None

    def _accumulate(self, g) -> None:
        if self.grad is None:
            self.grad = np.array(g, dtype=self.data.dtype, copy=True)
        else:
            self.grad = self.grad + g

    def __repr__(self):
        flag = ", grad" if self.requires_grad else ""
        return f"Tensor(shape={self.data.shape}{flag})"

    # operator sugar; heavy lifting lives in ops.py
    def __add__(self, other):
        from . import ops
        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from . import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from . import ops
        return ops.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        from . import ops
        return ops.div(self, other)

    def __rtruediv__(self, other):
        from . import ops
        return ops.div(other, self)

    def __matmul__(self, other):
        from . import ops
        return ops.matmul(self, other)

    def __neg__(self):
        from . import ops
        return ops.mul(self, -1.0)


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def make_result(data, parents, backward_fn) -> Tensor:
    """Wrap an op result, linking the graph only when grads are live."""
    out = Tensor(data)
    if grad_enabled() and any(p.requires_grad or p._parents for p in parents):
        out.requires_grad = any(p.requires_grad or p._parents for p in parents)
        out._parents = tuple(parents)
        out._backward = backward_fn
    return out


class Tape:
    """Topologically ordered record of the ops reachable from one root."""

    def __init__(self, nodes: list[Tensor]):
        self.nodes = nodes

    @classmethod
    def from_root(cls, root: Tensor) -> "Tape":
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in seen:
                    stack.append((parent, False))
        return cls(order)

    def backward(self, root: Tensor) -> dict[int, np.ndarray]:
        grads: dict[int, np.ndarray] = {id(root): np.ones_like(root.data)}
        leaf_grads: dict[int, np.ndarray] = {}
        for node in reversed(self.nodes):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node.requires_grad and node._backward is None:
                node._accumulate(g)
                leaf_grads[id(node)] = node.grad
            if node._backward is None:
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if pg is None or not (parent.requires_grad or parent._parents):
                    continue
                if id(parent) in grads:
                    grads[id(parent)] = grads[id(parent)] + pg
                else:
                    grads[id(parent)] = pg
        return leaf_grads


def backward(loss: Tensor) -> dict[int, np.ndarray]:
    """Accumulate d(loss)/d(leaf) into every requires_grad leaf under loss.

    Returns a map from leaf ``id()`` to the accumulated gradient array.
    """
    if loss.size != 1:
        raise NotScalarError(f"loss must be scalar, got shape {loss.shape}")
    if not loss._parents:
        raise DetachedGraphError("loss is not attached to a computation graph")
    return Tape.from_root(loss).backward(loss)
