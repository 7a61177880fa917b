"""Graph layer families: GCN, GAT, AttentiveFP, and graph readouts.

All layers run on a dense block-diagonal GraphBatch. Attention is masked
row-wise softmax over each node's neighborhood (self-loop included), so
every attention row sums to 1 over valid entries.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..autodiff import Tensor, ops
from ..autodiff.tensor import ShapeMismatchError
from .batch import EmptyGraphError, GnnError, GraphBatch

LAYER_KINDS = ("gcn", "gat", "attentive_fp")


@dataclass
class GnnConfig:
    layer_kind: str = "attentive_fp"
    hidden_dim: int = 128
    n_layers: int = 2
    n_heads: int = 4
    n_timesteps: int = 2
    dropout: float = 0.1
    use_bond_features: bool = True  # attentive_fp only
    readout: str | None = None  # default: attentive for attentive_fp, else mean

    def __post_init__(self):
        if self.layer_kind not in LAYER_KINDS:
            raise GnnError(f"unknown layer_kind {self.layer_kind!r}")
        if self.hidden_dim <= 0 or self.n_layers <= 0:
            raise GnnError("hidden_dim and n_layers must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise GnnError("dropout must lie in [0, 1)")
        if self.layer_kind == "gat" and self.hidden_dim % self.n_heads:
            raise GnnError("hidden_dim must be divisible by n_heads")

    def resolved_readout(self) -> str:
        if self.readout is not None:
            return self.readout
        return "attentive" if self.layer_kind == "attentive_fp" else "mean"

    def to_dict(self) -> dict:
        return asdict(self)


def glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> Tensor:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return Tensor(rng.uniform(-limit, limit, size=(fan_in, fan_out)),
                  requires_grad=True)


def zeros(*shape) -> Tensor:
    return Tensor(np.zeros(shape), requires_grad=True)


def _init_gru(rng, params, prefix, dim):
    for gate in ("z", "r", "n"):
        params[f"{prefix}.W{gate}"] = glorot(rng, dim, dim)
        params[f"{prefix}.U{gate}"] = glorot(rng, dim, dim)
        params[f"{prefix}.b{gate}"] = zeros(1, dim)


def gru_cell(params, prefix, x: Tensor, h: Tensor) -> Tensor:
    p = lambda name: params[f"{prefix}.{name}"]
    z = ops.sigmoid(x @ p("Wz") + h @ p("Uz") + p("bz"))
    r = ops.sigmoid(x @ p("Wr") + h @ p("Ur") + p("br"))
    n = ops.tanh(x @ p("Wn") + ops.mul(r, h @ p("Un")) + p("bn"))
    return ops.add(ops.mul(ops.sub(1.0, z), n), ops.mul(z, h))


# --- GCN ---

def gcn_layer(batch: GraphBatch, W: Tensor, H: Tensor | None = None,
              activation: str = "relu") -> Tensor:
    """act(D^-1/2 (A+I) D^-1/2 H W)."""
    H = batch.node_features if H is None else H
    if H.shape[1] != W.shape[0]:
        raise ShapeMismatchError(f"gcn_layer: features {H.shape} vs W {W.shape}")
    out = Tensor(batch.normalized_adjacency()) @ H @ W
    if activation == "relu":
        return ops.relu(out)
    if activation == "identity":
        return out
    raise GnnError(f"unknown activation {activation!r}")


# --- GAT ---

def _attention_rows(logits: Tensor, mask: np.ndarray) -> Tensor:
    return ops.softmax(logits, axis=1, mask=mask)


def gat_layer(batch: GraphBatch, params: dict, prefix: str,
              H: Tensor | None = None, n_heads: int = 4,
              return_attention: bool = False):
    """Multi-head neighborhood attention; heads concatenated."""
    H = batch.node_features if H is None else H
    mask = batch.neighbor_mask()
    outs = []
    alphas = []
    for head in range(n_heads):
        W = params[f"{prefix}.head{head}.W"]
        a_src = params[f"{prefix}.head{head}.a_src"]
        a_dst = params[f"{prefix}.head{head}.a_dst"]
        HW = H @ W
        src = HW @ a_src  # [N,1]
        dst = HW @ a_dst  # [N,1]
        logits = ops.leaky_relu(ops.add(src, ops.transpose(dst)), slope=0.2)
        alpha = _attention_rows(logits, mask)
        outs.append(alpha @ HW)
        alphas.append(alpha)
    out = ops.concat(outs, axis=1) if len(outs) > 1 else outs[0]
    if return_attention:
        return out, alphas
    return out


def _init_gat_layer(rng, params, prefix, in_dim, hidden_dim, n_heads):
    head_dim = hidden_dim // n_heads
    for head in range(n_heads):
        params[f"{prefix}.head{head}.W"] = glorot(rng, in_dim, head_dim)
        params[f"{prefix}.head{head}.a_src"] = glorot(rng, head_dim, 1)
        params[f"{prefix}.head{head}.a_dst"] = glorot(rng, head_dim, 1)


# --- AttentiveFP ---

def _init_afp_layer(rng, params, prefix, dim, use_bond_features):
    params[f"{prefix}.a_src"] = glorot(rng, dim, 1)
    params[f"{prefix}.a_dst"] = glorot(rng, dim, 1)
    params[f"{prefix}.W_msg"] = glorot(rng, dim, dim)
    if use_bond_features:
        params[f"{prefix}.w_bond"] = zeros(4, 1)
    _init_gru(rng, params, f"{prefix}.gru", dim)


def afp_node_layer(batch: GraphBatch, params: dict, prefix: str, H: Tensor,
                   use_bond_features: bool, return_attention: bool = False):
    mask = batch.neighbor_mask()
    src = H @ params[f"{prefix}.a_src"]
    dst = H @ params[f"{prefix}.a_dst"]
    logits = ops.add(src, ops.transpose(dst))
    if use_bond_features:
        w_bond = params[f"{prefix}.w_bond"]
        for k, bond_mask in enumerate(batch.bond_order_masks()):
            if bond_mask.any():
                coeff = ops.reshape(ops.gather_rows(w_bond, [k]), (1, 1))
                logits = ops.add(logits, ops.mul(coeff, Tensor(bond_mask)))
    logits = ops.leaky_relu(logits, slope=0.2)
    alpha = _attention_rows(logits, mask)
    context = alpha @ (H @ params[f"{prefix}.W_msg"])
    out = gru_cell(params, f"{prefix}.gru", context, H)
    if return_attention:
        return out, alpha
    return out


def _init_attentive_readout(rng, params, prefix, dim):
    params[f"{prefix}.a_graph"] = glorot(rng, dim, 1)
    params[f"{prefix}.a_node"] = glorot(rng, dim, 1)
    params[f"{prefix}.W_ctx"] = glorot(rng, dim, dim)
    _init_gru(rng, params, f"{prefix}.gru", dim)


def attentive_readout(batch: GraphBatch, params: dict, prefix: str, H: Tensor,
                      n_timesteps: int) -> Tensor:
    """Virtual super node attends over its graph's nodes for n timesteps."""
    gmask = batch.graph_mask()
    state = Tensor(batch.mean_matrix()) @ H  # [G, dim]
    for _ in range(n_timesteps):
        g_part = state @ params[f"{prefix}.a_graph"]  # [G,1]
        n_part = H @ params[f"{prefix}.a_node"]  # [N,1]
        logits = ops.leaky_relu(ops.add(g_part, ops.transpose(n_part)), slope=0.2)
        alpha = ops.softmax(logits, axis=1, mask=gmask)  # [G,N]
        context = alpha @ (H @ params[f"{prefix}.W_ctx"])
        state = gru_cell(params, f"{prefix}.gru", context, state)
    return state


# --- plain readout op ---

def readout(node_features: Tensor, graph_ids, mode: str,
            n_graphs: int | None = None) -> Tensor:
    """Segment mean/sum over graphs (attentive readout lives in the encoder)."""
    ids = np.asarray(graph_ids, dtype=np.intp)
    n = int(ids.max()) + 1 if n_graphs is None else n_graphs
    counts = np.bincount(ids, minlength=n)
    if (counts == 0).any():
        raise EmptyGraphError(f"graph {int(np.argmin(counts))} has no nodes")
    member = (np.arange(n)[:, None] == ids[None, :]).astype(np.float64)
    if mode == "sum":
        return Tensor(member) @ node_features
    if mode == "mean":
        return Tensor(member / member.sum(axis=1, keepdims=True)) @ node_features
    raise GnnError(f"unknown readout mode {mode!r}")


# --- full encoder ---

class GraphEncoder:
    """One GNN family stacked n_layers deep plus a graph-level readout."""

    def __init__(self, cfg: GnnConfig, in_dim: int, prefix: str):
        self.cfg = cfg
        self.in_dim = in_dim
        self.prefix = prefix

    @property
    def out_dim(self) -> int:
        return self.cfg.hidden_dim

    def init_params(self, rng: np.random.Generator) -> dict[str, Tensor]:
        cfg = self.cfg
        params: dict[str, Tensor] = {}
        if cfg.layer_kind == "gcn":
            dim = self.in_dim
            for layer in range(cfg.n_layers):
                params[f"{self.prefix}.layer{layer}.W"] = glorot(rng, dim, cfg.hidden_dim)
                dim = cfg.hidden_dim
        elif cfg.layer_kind == "gat":
            dim = self.in_dim
            for layer in range(cfg.n_layers):
                _init_gat_layer(rng, params, f"{self.prefix}.layer{layer}", dim,
                                cfg.hidden_dim, cfg.n_heads)
                dim = cfg.hidden_dim
        else:
            params[f"{self.prefix}.W_init"] = glorot(rng, self.in_dim, cfg.hidden_dim)
            params[f"{self.prefix}.b_init"] = zeros(1, cfg.hidden_dim)
            for layer in range(cfg.n_layers):
                _init_afp_layer(rng, params, f"{self.prefix}.layer{layer}",
                                cfg.hidden_dim, cfg.use_bond_features)
        if self.cfg.resolved_readout() == "attentive":
            _init_attentive_readout(rng, params, f"{self.prefix}.readout",
                                    cfg.hidden_dim)
        return params

    def node_states(self, params: dict, batch: GraphBatch, training: bool = False,
                    rng: np.random.Generator | None = None) -> Tensor:
        cfg = self.cfg
        H = batch.node_features

        def drop(t: Tensor) -> Tensor:
            if training and cfg.dropout > 0.0:
                if rng is None:
                    raise GnnError("training forward needs an rng for dropout")
                return ops.dropout(t, cfg.dropout, rng)
            return t

        if cfg.layer_kind == "gcn":
            for layer in range(cfg.n_layers):
                H = gcn_layer(batch, params[f"{self.prefix}.layer{layer}.W"], H)
                H = drop(H)
        elif cfg.layer_kind == "gat":
            for layer in range(cfg.n_layers):
                H = gat_layer(batch, params, f"{self.prefix}.layer{layer}", H,
                              n_heads=cfg.n_heads)
                H = ops.relu(H)
                H = drop(H)
        else:
            use_bonds = cfg.use_bond_features
            if use_bonds and batch.bond_orders is None:
                raise GnnError("use_bond_features=True but batch lacks bond orders")
            H = ops.relu(H @ params[f"{self.prefix}.W_init"]
                         + params[f"{self.prefix}.b_init"])
            for layer in range(cfg.n_layers):
                H = afp_node_layer(batch, params, f"{self.prefix}.layer{layer}", H,
                                   use_bonds)
                H = drop(H)
        return H

    def forward(self, params: dict, batch: GraphBatch, training: bool = False,
                rng: np.random.Generator | None = None) -> Tensor:
        H = self.node_states(params, batch, training=training, rng=rng)
        mode = self.cfg.resolved_readout()
        if mode == "attentive":
            return attentive_readout(batch, params, f"{self.prefix}.readout", H,
                                     self.cfg.n_timesteps)
        return readout(H, batch.graph_ids, mode, n_graphs=batch.n_graphs)


def attentive_fp_encode(batch: GraphBatch, params: dict, prefix: str,
                        cfg: GnnConfig) -> Tensor:
    """Graph embeddings from the AttentiveFP encoder (inference mode)."""
    encoder = GraphEncoder(cfg, batch.node_features.shape[1], prefix)
    return encoder.forward(params, batch)
