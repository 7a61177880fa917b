"""Molecular graph model: atoms, bonds, ring perception, implicit hydrogens."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace

from .elements import SUPPORTED_ELEMENTS, allowed_valences

SINGLE = 1
DOUBLE = 2
TRIPLE = 3
AROMATIC = 4

BOND_ORDER_VALUE = {SINGLE: 1.0, DOUBLE: 2.0, TRIPLE: 3.0, AROMATIC: 1.5}


class ChemError(Exception):
    """Base class for chemistry-layer failures."""


class SmilesSyntaxError(ChemError):
    pass


class UnsupportedFeatureError(ChemError):
    pass


class ValenceError(ChemError):
    pass


class LengthMismatchError(ChemError):
    pass


@dataclass(frozen=True)
class Atom:
    element: str
    aromatic: bool = False
    formal_charge: int = 0
    implicit_h: int = 0
    index: int = 0
    # Number of severed bonds this atom carries inside a fragment subgraph;
    # 0 for atoms of whole molecules.
    attachment: int = 0


@dataclass(frozen=True)
class Bond:
    a: int
    b: int
    order: int = SINGLE
    in_ring: bool = False

    def endpoints(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)

    def other(self, idx: int) -> int:
        return self.b if idx == self.a else self.a


@dataclass
class MolecularGraph:
    atoms: list[Atom]
    bonds: list[Bond]
    rings: list[tuple[int, ...]] = field(default_factory=list)
    source_smiles: str = ""

    def __post_init__(self) -> None:
        self._neighbors: list[list[tuple[int, int]]] | None = None

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def n_bonds(self) -> int:
        return len(self.bonds)

    def neighbors(self, idx: int) -> list[tuple[int, int]]:
        """(neighbor atom index, bond index) pairs for one atom."""
        if self._neighbors is None:
            nbrs: list[list[tuple[int, int]]] = [[] for _ in self.atoms]
            for bi, bond in enumerate(self.bonds):
                nbrs[bond.a].append((bond.b, bi))
                nbrs[bond.b].append((bond.a, bi))
            self._neighbors = nbrs
        return self._neighbors[idx]

    def degree(self, idx: int) -> int:
        return len(self.neighbors(idx))

    def ring_atoms(self) -> set[int]:
        return {i for bond in self.bonds if bond.in_ring for i in (bond.a, bond.b)}

    def explicit_valence(self, idx: int) -> float:
        return sum(BOND_ORDER_VALUE[self.bonds[bi].order] for _, bi in self.neighbors(idx))

    def permuted(self, order: list[int]) -> "MolecularGraph":
        """Relabel atoms so that new index i holds old atom order[i]."""
        if sorted(order) != list(range(self.n_atoms)):
            raise ValueError("order must be a permutation of atom indices")
        old_to_new = {old: new for new, old in enumerate(order)}
        atoms = [replace(self.atoms[old], index=new) for new, old in enumerate(order)]
        bonds = [
            replace(b, a=old_to_new[b.a], b=old_to_new[b.b]) for b in self.bonds
        ]
        rings = [tuple(old_to_new[i] for i in ring) for ring in self.rings]
        return MolecularGraph(atoms=atoms, bonds=bonds, rings=rings, source_smiles="")


def connected_components(n_atoms: int, bonds: list[Bond]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n_atoms)]
    for bond in bonds:
        adj[bond.a].append(bond.b)
        adj[bond.b].append(bond.a)
    seen = [False] * n_atoms
    comps = []
    for start in range(n_atoms):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        comps.append(comp)
    return comps


def _bridge_bonds(n_atoms: int, bonds: list[Bond]) -> set[int]:
    """Bond indices that are bridges (removal disconnects); the rest lie on cycles."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_atoms)]
    for bi, bond in enumerate(bonds):
        adj[bond.a].append((bond.b, bi))
        adj[bond.b].append((bond.a, bi))
    disc = [-1] * n_atoms
    low = [0] * n_atoms
    bridges: set[int] = set()
    timer = 0
    for root in range(n_atoms):
        if disc[root] != -1:
            continue
        # Iterative DFS; parallel bonds are impossible in our graphs so
        # tracking the incoming bond index is enough for parent skipping.
        stack: list[tuple[int, int, int]] = [(root, -1, 0)]
        while stack:
            v, in_bond, state = stack.pop()
            if state == 0:
                disc[v] = low[v] = timer
                timer += 1
                stack.append((v, in_bond, 1))
                for w, bi in adj[v]:
                    if bi == in_bond:
                        continue
                    if disc[w] == -1:
                        stack.append((w, bi, 0))
                    else:
                        low[v] = min(low[v], disc[w])
            else:
                for w, bi in adj[v]:
                    if bi == in_bond:
                        continue
                    low[v] = min(low[v], low[w])
                    if disc[v] < low[w]:
                        bridges.add(bi)
    return bridges


def _shortest_path(adj: list[list[tuple[int, int]]], src: int, dst: int,
                   skip_bond: int) -> list[int] | None:
    """BFS path src -> dst avoiding one bond; returns bond-index path."""
    prev: dict[int, tuple[int, int]] = {src: (-1, -1)}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        if v == dst:
            path = []
            while v != src:
                pv, pb = prev[v]
                path.append(pb)
                v = pv
            path.reverse()
            return path
        for w, bi in adj[v]:
            if bi == skip_bond or w in prev:
                continue
            prev[w] = (v, bi)
            queue.append(w)
    return None


def perceive_rings(n_atoms: int, bonds: list[Bond]) -> tuple[list[tuple[int, ...]], set[int]]:
    """Smallest set of smallest rings plus the set of ring-bond indices.

    Candidate cycles come from per-bond shortest cycles; a greedy GF(2)
    sweep ordered by size keeps exactly cycle-rank independent rings.
    """
    ring_bond_idx = {
        bi for bi in range(len(bonds)) if bi not in _bridge_bonds(n_atoms, bonds)
    }
    n_rings = len(bonds) - n_atoms + len(connected_components(n_atoms, bonds))
    if n_rings == 0:
        return [], set()

    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_atoms)]
    for bi in ring_bond_idx:
        bond = bonds[bi]
        adj[bond.a].append((bond.b, bi))
        adj[bond.b].append((bond.a, bi))

    candidates: list[tuple[int, int, tuple[int, ...]]] = []
    for bi in sorted(ring_bond_idx):
        bond = bonds[bi]
        path = _shortest_path(adj, bond.a, bond.b, bi)
        if path is None:
            continue
        cycle_bonds = tuple(sorted(path + [bi]))
        candidates.append((len(cycle_bonds), bi, cycle_bonds))
    candidates.sort()

    basis: dict[int, int] = {}  # highest set bit -> reduced bitmask over bonds
    rings_bonds: list[tuple[int, ...]] = []
    for _, _, cycle_bonds in candidates:
        vec = 0
        for bi in cycle_bonds:
            vec |= 1 << bi
        while vec:
            high = vec.bit_length() - 1
            if high not in basis:
                basis[high] = vec
                rings_bonds.append(cycle_bonds)
                break
            vec ^= basis[high]
        if len(rings_bonds) == n_rings:
            break

    rings: list[tuple[int, ...]] = []
    for cycle_bonds in rings_bonds:
        rings.append(_order_cycle_atoms(bonds, cycle_bonds))
    return rings, ring_bond_idx


def _order_cycle_atoms(bonds: list[Bond], cycle_bonds: tuple[int, ...]) -> tuple[int, ...]:
    nxt: dict[int, list[int]] = {}
    for bi in cycle_bonds:
        bond = bonds[bi]
        nxt.setdefault(bond.a, []).append(bond.b)
        nxt.setdefault(bond.b, []).append(bond.a)
    start = min(nxt)
    ordered = [start]
    prev = -1
    cur = start
    for _ in range(len(cycle_bonds) - 1):
        a, b = nxt[cur]
        step = b if a == prev else a
        ordered.append(step)
        prev, cur = cur, step
    return tuple(ordered)


def _pi_candidates(element: str, aromatic: bool, n_aromatic_bonds: int) -> tuple[int, ...]:
    """Possible pi-system valence contributions of an aromatic atom.

    An aromatic C/N/Si hosts one formal double bond inside the ring
    (counting each aromatic sigma bond as 1 plus this increment matches the
    1.5-per-bond-then-floor convention); pyrrole-type N and divalent O/S/Se
    donate a lone pair instead and contribute nothing extra.
    """
    if not aromatic or n_aromatic_bonds == 0:
        return (0,)
    if element in ("C", "Si"):
        return (1,)
    if element == "N":
        return (1, 0)
    return (0,)


def sigma_valence(element: str, bond_orders: list[int]) -> int:
    return sum(1 if order == AROMATIC else order for order in bond_orders)


def implicit_hydrogens(element: str, charge: int, aromatic: bool,
                       bond_orders: list[int], attachments: int = 0) -> int:
    """Implicit H count for an organic-subset atom (lowest valence that fits)."""
    sigma = sigma_valence(element, bond_orders) + attachments
    n_arom = sum(1 for order in bond_orders if order == AROMATIC)
    valences = sorted(allowed_valences(element, charge))
    for pi in _pi_candidates(element, aromatic, n_arom):
        for valence in valences:
            if valence >= sigma + pi:
                return valence - sigma - pi
    raise ValenceError(
        f"explicit valence {sigma} exceeds allowed {valences} for {element}"
    )


def check_valence(graph: MolecularGraph) -> None:
    """Raise ValenceError unless bond-order sum + implicit H hits an allowed valence."""
    for atom in graph.atoms:
        if atom.element not in SUPPORTED_ELEMENTS:
            raise UnsupportedFeatureError(f"element {atom.element!r} not supported")
        orders = [graph.bonds[bi].order for _, bi in graph.neighbors(atom.index)]
        sigma = sigma_valence(atom.element, orders) + atom.attachment + atom.implicit_h
        n_arom = sum(1 for order in orders if order == AROMATIC)
        allowed = allowed_valences(atom.element, atom.formal_charge)
        if not any(
            sigma + pi in allowed
            for pi in _pi_candidates(atom.element, atom.aromatic, n_arom)
        ):
            raise ValenceError(
                f"atom {atom.index} ({atom.element}{atom.formal_charge:+d}): "
                f"valence {sigma} (+pi) not in allowed {sorted(allowed)}"
            )
