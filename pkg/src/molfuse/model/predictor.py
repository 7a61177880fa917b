"""The full predictor: fragment GNN -> text fusion -> molecule GNN -> head.

Unique molecules and unique fragments are compiled once per dataset; every
forward pass encodes each unique fragment exactly once, fuses text in a
single segment-batched attention, runs the molecule-level GNN over all
fragment graphs at once, and reads donor/acceptor rows for the head.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..autodiff import Tensor, ops
from ..autodiff.tensor import no_grad
from ..chem.canon import to_smiles
from ..chem.mol import MolecularGraph, SINGLE
from ..chem.smiles import parse_smiles
from ..data.embstore import EmbeddingStore
from ..frag.decompose import decompose
from ..fusion import SECTIONS, EmptyAfterFilterError
from ..gnn.batch import GraphBatch
from ..gnn.layers import GnnConfig, GraphEncoder, glorot, zeros
from .features import AtomFeatureConfig, adjacency_and_orders, featurize_atoms


class ModelError(Exception):
    pass


class MissingEmbeddingError(ModelError):
    pass


PAIR_MODES = ("pair", "donor_only", "acceptor_only")
FUSION_MODES = ("average", "attention", "none")
HEADS = ("regression", "classification")


@dataclass
class ModelConfig:
    fragment_gnn: GnnConfig = field(default_factory=GnnConfig)
    molecule_gnn: GnnConfig = field(default_factory=GnnConfig)
    features: AtomFeatureConfig = field(default_factory=AtomFeatureConfig)
    fusion_mode: str = "attention"
    text_sections: tuple[str, ...] = ("physical", "chemical")
    head: str = "regression"
    n_tasks: int = 1
    pair_mode: str = "pair"
    d_k: int = 64
    use_value_projection: bool = False
    head_hidden: int = 64

    def __post_init__(self):
        if isinstance(self.fragment_gnn, dict):
            self.fragment_gnn = GnnConfig(**self.fragment_gnn)
        if isinstance(self.molecule_gnn, dict):
            self.molecule_gnn = GnnConfig(**self.molecule_gnn)
        if isinstance(self.features, dict):
            self.features = AtomFeatureConfig(**self.features)
        if isinstance(self.text_sections, list):
            self.text_sections = tuple(self.text_sections)
        if self.fusion_mode not in FUSION_MODES:
            raise ModelError(f"unknown fusion_mode {self.fusion_mode!r}")
        if self.head not in HEADS:
            raise ModelError(f"unknown head {self.head!r}")
        if self.pair_mode not in PAIR_MODES:
            raise ModelError(f"unknown pair_mode {self.pair_mode!r}")
        if self.head == "classification" and self.n_tasks < 1:
            raise ModelError("classification head needs n_tasks >= 1")
        bad = set(self.text_sections) - set(SECTIONS)
        if bad:
            raise ModelError(f"unknown text section(s): {sorted(bad)}")
        if not self.text_sections:
            raise ModelError("text_sections must be non-empty")

    def to_dict(self) -> dict:
        return {
            "fragment_gnn": self.fragment_gnn.to_dict(),
            "molecule_gnn": self.molecule_gnn.to_dict(),
            "features": self.features.to_dict(),
            "fusion_mode": self.fusion_mode,
            "text_sections": list(self.text_sections),
            "head": self.head,
            "n_tasks": self.n_tasks,
            "pair_mode": self.pair_mode,
            "d_k": self.d_k,
            "use_value_projection": self.use_value_projection,
            "head_hidden": self.head_hidden,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ModelConfig":
        return cls(**obj)


@dataclass
class Prediction:
    value: float | list[float]
    fragments_used: list[str]
    missing_embeddings: list[str]


class CompiledMolecules:
    """Static structure shared by every forward pass over a molecule set."""

    def __init__(self, cfg: ModelConfig, store: EmbeddingStore | None,
                 graphs: list[MolecularGraph], strict: bool):
        self.mol_ids = np.zeros(len(graphs), dtype=np.intp)  # input -> unique mol
        self.mol_keys: list[str] = []  # canonical smiles per unique molecule
        self.mol_fragment_keys: list[list[str]] = []
        self.missing_keys: list[str] = []

        frag_index: dict[str, int] = {}
        frag_feats: list[np.ndarray] = []
        frag_adjs: list[np.ndarray] = []
        frag_orders: list[np.ndarray] = []
        self.frag_keys: list[str] = []

        mol_index: dict[str, int] = {}
        node_frag: list[int] = []
        mol_node_adjs: list[np.ndarray] = []
        mol_node_orders: list[np.ndarray] = []

        for pos, mol in enumerate(graphs):
            canon = to_smiles(mol)
            if canon in mol_index:
                self.mol_ids[pos] = mol_index[canon]
                continue
            mol_index[canon] = len(self.mol_keys)
            self.mol_ids[pos] = mol_index[canon]
            self.mol_keys.append(canon)

            fg = decompose(mol)
            keys = []
            for frag in fg.fragments:
                key = frag.fragment_key
                keys.append(key)
                if key not in frag_index:
                    frag_index[key] = len(self.frag_keys)
                    self.frag_keys.append(key)
                    feats = featurize_atoms(frag.subgraph, cfg.features)
                    adj, orders = adjacency_and_orders(frag.subgraph)
                    frag_feats.append(feats)
                    frag_adjs.append(adj)
                    frag_orders.append(orders)
            self.mol_fragment_keys.append(keys)
            node_frag.extend(frag_index[k] for k in keys)
            n = len(fg.fragments)
            adj = np.zeros((n, n))
            orders = np.zeros((n, n), dtype=np.int64)
            for e in fg.edges:
                adj[e.frag_a, e.frag_b] = adj[e.frag_b, e.frag_a] = 1.0
                orders[e.frag_a, e.frag_b] = orders[e.frag_b, e.frag_a] = SINGLE
            mol_node_adjs.append(adj)
            mol_node_orders.append(orders)

        self.n_molecules = len(self.mol_keys)
        self.frag_batch = GraphBatch.from_graphs(frag_feats, frag_adjs, frag_orders)
        self.node_frag = np.asarray(node_frag, dtype=np.intp)

        sizes = [a.shape[0] for a in mol_node_adjs]
        total = sum(sizes)
        self._mol_adj = np.zeros((total, total))
        self._mol_orders = np.zeros((total, total), dtype=np.int64)
        self._mol_graph_ids = np.zeros(total, dtype=np.intp)
        off = 0
        for gi, size in enumerate(sizes):
            self._mol_adj[off:off + size, off:off + size] = mol_node_adjs[gi]
            self._mol_orders[off:off + size, off:off + size] = mol_node_orders[gi]
            self._mol_graph_ids[off:off + size] = gi
            off += size
        self._mol_batch_cache: GraphBatch | None = None

        self._build_tokens(cfg, store, strict)

    def _build_tokens(self, cfg: ModelConfig, store: EmbeddingStore | None,
                      strict: bool) -> None:
        n_frags = len(self.frag_keys)
        self.token_counts = np.zeros(n_frags)
        if cfg.fusion_mode == "none":
            self.token_matrix = np.zeros((0, 0))
            self.token_frag_ids = np.zeros(0, dtype=np.intp)
            self.d_text = 0
            return
        if store is None:
            raise ModelError("fusion requires an embedding store")
        d_text = store.d_text
        if d_text is None:
            raise ModelError("embedding store is empty")
        wanted = set(cfg.text_sections)
        rows: list[np.ndarray] = []
        ids: list[int] = []
        for fi, key in enumerate(self.frag_keys):
            record = store.get(key)
            if record is None:
                if strict:
                    raise MissingEmbeddingError(
                        f"fragment {key!r} has no embedding-store record"
                    )
                self.missing_keys.append(key)
                warnings.warn(f"no text for fragment {key!r}; using zero text vector",
                              stacklevel=2)
                continue
            keep = [i for i, s in enumerate(record.sections) if s in wanted]
            if not keep:
                if strict:
                    raise EmptyAfterFilterError(
                        f"fragment {key!r}: no tokens in sections {sorted(wanted)}"
                    )
                self.missing_keys.append(key)
                warnings.warn(
                    f"fragment {key!r} has no tokens in the requested sections; "
                    "using zero text vector", stacklevel=2)
                continue
            rows.append(record.embeddings[keep])
            ids.extend([fi] * len(keep))
            self.token_counts[fi] = len(keep)
        self.token_matrix = (
            np.concatenate(rows, axis=0) if rows else np.zeros((0, d_text))
        )
        self.token_frag_ids = np.asarray(ids, dtype=np.intp)
        self.d_text = d_text

    def molecule_batch(self, node_features: Tensor) -> GraphBatch:
        if self._mol_batch_cache is None:
            self._mol_batch_cache = GraphBatch(
                Tensor(np.zeros((self._mol_adj.shape[0], 1))),
                self._mol_adj, self._mol_graph_ids, n_graphs=self.n_molecules,
                bond_orders=self._mol_orders,
            )
        batch = self._mol_batch_cache
        clone = object.__new__(GraphBatch)
        clone.node_features = node_features
        clone.adjacency = batch.adjacency
        clone.graph_ids = batch.graph_ids
        clone.n_graphs = batch.n_graphs
        clone.bond_orders = batch.bond_orders
        clone._cache = batch._cache
        return clone


class Predictor:
    """Owns the parameter dict and runs the full multimodal forward pass."""

    def __init__(self, cfg: ModelConfig, d_text: int, seed: int = 0):
        if cfg.fusion_mode == "none":
            d_text = 0
        elif d_text <= 0:
            raise ModelError("text fusion requires d_text > 0")
        if cfg.fusion_mode == "attention" and cfg.use_value_projection \
                and cfg.d_k != d_text:
            raise ModelError(
                f"use_value_projection requires d_k == d_text ({cfg.d_k} != {d_text})"
            )
        self.cfg = cfg
        self.d_text = d_text
        self.frag_encoder = GraphEncoder(cfg.fragment_gnn, cfg.features.width, "frag")
        d_v = cfg.fragment_gnn.hidden_dim + d_text
        self.mol_encoder = GraphEncoder(cfg.molecule_gnn, d_v, "mol")
        self.params: dict[str, Tensor] = {}
        rng = np.random.default_rng(seed)
        self.params.update(self.frag_encoder.init_params(rng))
        if cfg.fusion_mode == "attention":
            self.params["fusion.W_Q"] = glorot(rng, d_text, cfg.d_k)
            self.params["fusion.W_K"] = glorot(rng, cfg.fragment_gnn.hidden_dim, cfg.d_k)
            self.params["fusion.W_V"] = glorot(rng, cfg.fragment_gnn.hidden_dim, cfg.d_k)
        self.params.update(self.mol_encoder.init_params(rng))
        head_in = cfg.molecule_gnn.hidden_dim * (2 if cfg.pair_mode == "pair" else 1)
        head_out = cfg.n_tasks if cfg.head == "classification" else 1
        self.params["head.W1"] = glorot(rng, head_in, cfg.head_hidden)
        self.params["head.b1"] = zeros(1, cfg.head_hidden)
        self.params["head.W2"] = glorot(rng, cfg.head_hidden, head_out)
        self.params["head.b2"] = zeros(1, head_out)

    # --- compilation ---

    def compile(self, graphs: list[MolecularGraph], store: EmbeddingStore | None,
                strict: bool = True) -> CompiledMolecules:
        comp = CompiledMolecules(self.cfg, store, graphs, strict)
        if self.cfg.fusion_mode != "none" and comp.d_text != self.d_text:
            raise ModelError(
                f"store d_text {comp.d_text} != model d_text {self.d_text}"
            )
        return comp

    # --- forward pieces ---

    def _fuse(self, structural: Tensor, comp: CompiledMolecules) -> Tensor:
        cfg = self.cfg
        if cfg.fusion_mode == "none":
            return structural
        n_frags = len(comp.frag_keys)
        tokens = Tensor(comp.token_matrix)
        if comp.token_matrix.shape[0] == 0:
            pooled = Tensor(np.zeros((n_frags, comp.d_text)))
            return ops.concat([structural, pooled], axis=1)
        if cfg.fusion_mode == "average":
            counts = np.where(comp.token_counts > 0, comp.token_counts, 1.0)
            mean_mat = np.zeros((n_frags, comp.token_matrix.shape[0]))
            mean_mat[comp.token_frag_ids, np.arange(len(comp.token_frag_ids))] = 1.0
            mean_mat /= counts[:, None]
            pooled = Tensor(mean_mat) @ tokens
            return ops.concat([structural, pooled], axis=1)
        # attention: tokens of every fragment share one segment softmax
        ids = comp.token_frag_ids
        q = tokens @ self.params["fusion.W_Q"]  # [T, d_k]
        k_rows = structural @ self.params["fusion.W_K"]  # [K, d_k]
        k_per_token = ops.gather_rows(k_rows, ids)
        logits = ops.mul(
            ops.tsum(ops.mul(q, k_per_token), axis=1, keepdims=True),
            1.0 / np.sqrt(cfg.d_k),
        )  # [T, 1]
        shift = ops.segment_max(logits.data.reshape(-1), ids, n_frags)
        centered = ops.sub(logits, shift[ids][:, None])
        e = ops.exp(centered)
        denom = ops.scatter_add_rows(e, ids, n_frags)  # [K, 1]
        alpha = ops.div(e, ops.gather_rows(denom, ids))
        pooled = ops.scatter_add_rows(ops.mul(alpha, tokens), ids, n_frags)
        if cfg.use_value_projection:
            v_rows = structural @ self.params["fusion.W_V"]
            pooled = ops.mul(pooled, ops.sigmoid(v_rows))
        return ops.concat([structural, pooled], axis=1)

    def molecule_embeddings(self, comp: CompiledMolecules, training: bool = False,
                            rng: np.random.Generator | None = None) -> Tensor:
        structural = self.frag_encoder.forward(self.params, comp.frag_batch,
                                               training=training, rng=rng)
        fused = self._fuse(structural, comp)
        node_features = ops.gather_rows(fused, comp.node_frag)
        mol_batch = comp.molecule_batch(node_features)
        return self.mol_encoder.forward(self.params, mol_batch,
                                        training=training, rng=rng)

    def head_logits(self, embeddings: Tensor, donor_ids, acceptor_ids) -> Tensor:
        mode = self.cfg.pair_mode
        if acceptor_ids is None:
            x = ops.gather_rows(embeddings, donor_ids)
        elif mode == "pair":
            x = ops.concat([
                ops.gather_rows(embeddings, donor_ids),
                ops.gather_rows(embeddings, acceptor_ids),
            ], axis=1)
        elif mode == "donor_only":
            x = ops.gather_rows(embeddings, donor_ids)
        else:
            x = ops.gather_rows(embeddings, acceptor_ids)
        hidden = ops.relu(x @ self.params["head.W1"] + self.params["head.b1"])
        return hidden @ self.params["head.W2"] + self.params["head.b2"]

    def forward(self, comp: CompiledMolecules, donor_ids, acceptor_ids,
                training: bool = False,
                rng: np.random.Generator | None = None) -> Tensor:
        embeddings = self.molecule_embeddings(comp, training=training, rng=rng)
        return self.head_logits(embeddings, donor_ids, acceptor_ids)

    # --- public ops ---

    def encode_molecule(self, mol: MolecularGraph | str,
                        store: EmbeddingStore | None,
                        strict: bool = True) -> np.ndarray:
        if isinstance(mol, str):
            mol = parse_smiles(mol)
        comp = self.compile([mol], store, strict=strict)
        with no_grad():
            return self.molecule_embeddings(comp).data[0].copy()

    def predict_pair(self, donor: str, acceptor: str,
                     store: EmbeddingStore | None,
                     strict: bool = False) -> Prediction:
        graphs = [parse_smiles(donor), parse_smiles(acceptor)]
        comp = self.compile(graphs, store, strict=strict)
        donor_ids = comp.mol_ids[[0]]
        acceptor_ids = comp.mol_ids[[1]]
        with no_grad():
            out = self.forward(comp, donor_ids, acceptor_ids).data[0]
        if self.cfg.head == "classification":
            value = [float(p) for p in 1.0 / (1.0 + np.exp(-out))]
        else:
            value = float(out[0])
        return Prediction(
            value=value,
            fragments_used=list(comp.frag_keys),
            missing_embeddings=list(comp.missing_keys),
        )


def loss(pred: Tensor, target, head: str, mask=None) -> Tensor:
    """Training objective: MSE for regression, masked mean BCE for
    classification (pred as per-task probabilities)."""
    y = np.asarray(target, dtype=np.float64).reshape(pred.shape)
    if head == "regression":
        diff = ops.sub(pred, y)
        return ops.tmean(ops.mul(diff, diff))
    if head != "classification":
        raise ModelError(f"unknown head {head!r}")
    if mask is None:
        m = np.ones_like(y)
    else:
        m = np.asarray(mask, dtype=np.float64).reshape(pred.shape)
    count = m.sum()
    if count == 0:
        return Tensor(0.0)
    p = ops.mul(ops.add(ops.mul(pred, 1.0 - 2e-12), 1e-12), 1.0)  # clip away 0/1
    term = ops.add(
        ops.mul(ops.log(p), y * m),
        ops.mul(ops.log(ops.sub(1.0, p)), (1.0 - y) * m),
    )
    return ops.mul(ops.tsum(term), -1.0 / count)
