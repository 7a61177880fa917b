"""Block-diagonal graph batching for dense message passing."""

from __future__ import annotations

import numpy as np

from ..autodiff import Tensor


class GnnError(Exception):
    pass


class EmptyGraphError(GnnError):
    pass


class GraphBatch:
    """A batch of graphs as one block-diagonal dense adjacency.

    ``adjacency`` is symmetric 0/1 with self-loops on the diagonal;
    ``graph_ids`` maps each node to its graph. ``bond_orders`` (optional)
    holds the integer bond order per off-diagonal edge, 0 elsewhere.
    """

    def __init__(self, node_features: Tensor, adjacency: np.ndarray,
                 graph_ids: np.ndarray, n_graphs: int | None = None,
                 bond_orders: np.ndarray | None = None):
        adjacency = np.asarray(adjacency, dtype=np.float64)
        graph_ids = np.asarray(graph_ids, dtype=np.intp)
        n = adjacency.shape[0]
        if adjacency.shape != (n, n):
            raise GnnError(f"adjacency must be square, got {adjacency.shape}")
        if node_features.shape[0] != n or graph_ids.shape != (n,):
            raise GnnError("node_features/adjacency/graph_ids sizes disagree")
        if not np.array_equal(adjacency, adjacency.T):
            raise GnnError("adjacency must be symmetric")
        np.fill_diagonal(adjacency, 1.0)
        self.node_features = node_features
        self.adjacency = adjacency
        self.graph_ids = graph_ids
        self.n_graphs = int(graph_ids.max()) + 1 if n_graphs is None else n_graphs
        self.bond_orders = bond_orders
        counts = np.bincount(graph_ids, minlength=self.n_graphs)
        if (counts == 0).any():
            empty = int(np.argmin(counts))
            raise EmptyGraphError(f"graph {empty} has no nodes")
        self._cache: dict[str, np.ndarray] = {}

    @property
    def n_nodes(self) -> int:
        return self.adjacency.shape[0]

    @classmethod
    def from_graphs(cls, features: list[np.ndarray], adjacencies: list[np.ndarray],
                    bond_orders: list[np.ndarray] | None = None) -> "GraphBatch":
        if not features:
            raise EmptyGraphError("batch of zero graphs")
        sizes = [f.shape[0] for f in features]
        total = sum(sizes)
        feat = np.concatenate(features, axis=0)
        adj = np.zeros((total, total))
        orders = np.zeros((total, total), dtype=np.int64)
        ids = np.zeros(total, dtype=np.intp)
        off = 0
        for gi, (size, a) in enumerate(zip(sizes, adjacencies)):
            if size == 0:
                raise EmptyGraphError(f"graph {gi} has no nodes")
            adj[off:off + size, off:off + size] = a
            if bond_orders is not None:
                orders[off:off + size, off:off + size] = bond_orders[gi]
            ids[off:off + size] = gi
            off += size
        return cls(Tensor(feat), adj, ids, n_graphs=len(features),
                   bond_orders=orders if bond_orders is not None else None)

    # --- cached derived constants ---

    def neighbor_mask(self) -> np.ndarray:
        if "mask" not in self._cache:
            self._cache["mask"] = self.adjacency > 0
        return self._cache["mask"]

    def normalized_adjacency(self) -> np.ndarray:
        """D^-1/2 (A+I) D^-1/2 for the GCN propagation rule."""
        if "norm" not in self._cache:
            deg = self.adjacency.sum(axis=1)
            inv_sqrt = 1.0 / np.sqrt(deg)
            self._cache["norm"] = self.adjacency * inv_sqrt[:, None] * inv_sqrt[None, :]
        return self._cache["norm"]

    def graph_mask(self) -> np.ndarray:
        """[n_graphs, n_nodes] membership mask."""
        if "gmask" not in self._cache:
            self._cache["gmask"] = (
                np.arange(self.n_graphs)[:, None] == self.graph_ids[None, :]
            )
        return self._cache["gmask"]

    def mean_matrix(self) -> np.ndarray:
        if "meanmat" not in self._cache:
            m = self.graph_mask().astype(np.float64)
            self._cache["meanmat"] = m / m.sum(axis=1, keepdims=True)
        return self._cache["meanmat"]

    def sum_matrix(self) -> np.ndarray:
        if "summat" not in self._cache:
            self._cache["summat"] = self.graph_mask().astype(np.float64)
        return self._cache["summat"]

    def bond_order_masks(self) -> list[np.ndarray]:
        """0/1 masks per bond order (single, double, triple, aromatic)."""
        if self.bond_orders is None:
            raise GnnError("batch was built without bond orders")
        if "bmasks" not in self._cache:
            self._cache["bmasks"] = [
                (self.bond_orders == k).astype(np.float64) for k in (1, 2, 3, 4)
            ]
        return self._cache["bmasks"]
