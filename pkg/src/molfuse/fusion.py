"""Fuse a fragment's structural descriptor with its description tokens.

Two operators: plain token averaging, and cross attention where the
structural vector queries the tokens (scaled dot product, scalar weight per
token summing to 1). Either way the fused vector is the concatenation
[structural | pooled-text], structural part first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .autodiff import Tensor, ops
from .autodiff.tensor import ShapeMismatchError

SECTIONS = ("structural", "physical", "chemical", "photovoltaic")


class FusionError(Exception):
    pass


class EmptyDescriptionError(FusionError):
    pass


class EmptyAfterFilterError(FusionError):
    pass


@dataclass
class TokenEmbeddings:
    tokens: list[str]
    matrix: Tensor  # [n_tokens, d_text]
    sections: list[str]
    fragment_key: str = ""

    def __post_init__(self):
        n = len(self.tokens)
        if n == 0:
            raise EmptyDescriptionError(f"no tokens for {self.fragment_key!r}")
        if self.matrix.shape[0] != n or len(self.sections) != n:
            raise ShapeMismatchError(
                f"{self.fragment_key!r}: {n} tokens vs matrix {self.matrix.shape} "
                f"and {len(self.sections)} section labels"
            )

    @property
    def d_text(self) -> int:
        return self.matrix.shape[1]


@dataclass
class FusionParams:
    W_Q: Tensor  # [d_text, d_k]
    W_K: Tensor  # [d_s, d_k]
    W_V: Tensor  # [d_s, d_k]

    @property
    def d_k(self) -> int:
        return self.W_Q.shape[1]


def init_fusion_params(rng: np.random.Generator, d_s: int, d_text: int,
                       d_k: int = 64) -> FusionParams:
    from .gnn.layers import glorot
    return FusionParams(
        W_Q=glorot(rng, d_text, d_k),
        W_K=glorot(rng, d_s, d_k),
        W_V=glorot(rng, d_s, d_k),
    )


@dataclass
class FusedFragmentVector:
    v: Tensor  # [d_s + d_text]
    provenance: str
    weights: np.ndarray | None = None  # per-token attention, None for average
    value_projection: Tensor | None = field(default=None, repr=False)


def _as_row(s: Tensor) -> Tensor:
    if s.ndim == 1:
        return ops.reshape(s, (1, s.shape[0]))
    if s.ndim == 2 and s.shape[0] == 1:
        return s
    raise ShapeMismatchError(f"structural descriptor must be a vector, got {s.shape}")


def fuse_average(s: Tensor, t: TokenEmbeddings) -> FusedFragmentVector:
    """concat(s, mean over token rows)."""
    row = _as_row(s)
    pooled = ops.tmean(t.matrix, axis=0, keepdims=True)  # [1, d_text]
    v = ops.reshape(ops.concat([row, pooled], axis=1), (-1,))
    return FusedFragmentVector(v=v, provenance=t.fragment_key)


def fuse_attention(s: Tensor, t: TokenEmbeddings, p: FusionParams,
                   use_value_projection: bool = False) -> FusedFragmentVector:
    """Structural vector queries the tokens; pooled text is the weighted mean.

    Per token i: alpha_i = softmax over tokens of (Q K^T / sqrt(d_k))_i with
    Q = t W_Q and K = s W_K; pooled = sum_i alpha_i t_i. The value projection
    s W_V is returned, and optionally gates the pooled text (sigmoid) when
    use_value_projection is set.
    """
    row = _as_row(s)
    if row.shape[1] != p.W_K.shape[0]:
        raise ShapeMismatchError(
            f"structural dim {row.shape[1]} vs W_K rows {p.W_K.shape[0]}"
        )
    if t.d_text != p.W_Q.shape[0]:
        raise ShapeMismatchError(f"text dim {t.d_text} vs W_Q rows {p.W_Q.shape[0]}")
    q = t.matrix @ p.W_Q  # [N, d_k]
    k = row @ p.W_K  # [1, d_k]
    value = row @ p.W_V  # [1, d_k]
    logits = ops.mul(q @ ops.transpose(k), 1.0 / np.sqrt(p.d_k))  # [N, 1]
    alpha = ops.softmax(logits, axis=0)  # [N, 1]
    pooled = ops.transpose(alpha) @ t.matrix  # [1, d_text]
    if use_value_projection:
        if p.d_k != t.d_text:
            raise ShapeMismatchError(
                "use_value_projection requires d_k == d_text "
                f"({p.d_k} != {t.d_text})"
            )
        pooled = ops.mul(pooled, ops.sigmoid(value))
    v = ops.reshape(ops.concat([row, pooled], axis=1), (-1,))
    return FusedFragmentVector(
        v=v,
        provenance=t.fragment_key,
        weights=alpha.data.reshape(-1).copy(),
        value_projection=value,
    )


def select_sections(t: TokenEmbeddings, sections) -> TokenEmbeddings:
    """Keep only tokens whose section label is in the subset, order preserved."""
    subset = set(sections)
    if not subset:
        raise FusionError("requested section subset is empty")
    unknown = subset - set(SECTIONS)
    if unknown:
        raise FusionError(f"unknown section name(s): {sorted(unknown)}")
    if subset == set(SECTIONS):
        return t
    keep = [i for i, label in enumerate(t.sections) if label in subset]
    if not keep:
        raise EmptyAfterFilterError(
            f"{t.fragment_key!r}: no tokens left after filtering to {sorted(subset)}"
        )
    return TokenEmbeddings(
        tokens=[t.tokens[i] for i in keep],
        matrix=ops.gather_rows(t.matrix, keep),
        sections=[t.sections[i] for i in keep],
        fragment_key=t.fragment_key,
    )
