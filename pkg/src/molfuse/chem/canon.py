"""Canonical atom ranking and SMILES serialization.

Ranking is iterative neighborhood refinement over (element, aromatic,
charge, attachment, implicit H) seeds. Remaining ties are broken by
splitting one member of the lowest tied class at a time and keeping the
lexicographically smallest serialization, so isomorphic graphs always map
to the same string regardless of input atom order.
"""

from __future__ import annotations

from .elements import SUPPORTED_ELEMENTS
from .mol import AROMATIC, DOUBLE, SINGLE, TRIPLE, Atom, MolecularGraph, implicit_hydrogens

_ELEMENT_CODE = {el: i for i, el in enumerate(sorted(SUPPORTED_ELEMENTS))}
_BOND_TEXT = {SINGLE: "", DOUBLE: "=", TRIPLE: "#", AROMATIC: ""}


def _initial_invariants(graph: MolecularGraph) -> list[tuple]:
    inv = []
    for atom in graph.atoms:
        inv.append((
            _ELEMENT_CODE[atom.element],
            int(atom.aromatic),
            atom.formal_charge,
            atom.attachment,
            atom.implicit_h,
            graph.degree(atom.index),
        ))
    return inv


def _refine(graph: MolecularGraph, invariants: list[tuple]) -> list[int]:
    ranks = _dense_ranks(invariants)
    n_classes = len(set(ranks))
    while True:
        signatures = []
        for i in range(graph.n_atoms):
            nbr = sorted(
                (graph.bonds[bi].order, ranks[j]) for j, bi in graph.neighbors(i)
            )
            signatures.append((ranks[i], tuple(nbr)))
        ranks = _dense_ranks(signatures)
        new_n = len(set(ranks))
        if new_n == n_classes:
            return ranks
        n_classes = new_n


def _dense_ranks(keys: list) -> list[int]:
    order = {key: rank for rank, key in enumerate(sorted(set(keys)))}
    return [order[key] for key in keys]


def canonical_ranks(graph: MolecularGraph) -> list[int]:
    """Discrete canonical ranking (0..n-1), invariant under atom relabeling."""
    _, ranks = _canon_search(graph, _refine(graph, _initial_invariants(graph)))
    return ranks


def to_smiles(graph: MolecularGraph) -> str:
    """Canonical SMILES for a connected molecular graph (markers included)."""
    smiles, _ = _canon_search(graph, _refine(graph, _initial_invariants(graph)))
    return smiles


def _canon_search(graph: MolecularGraph, ranks: list[int]) -> tuple[str, list[int]]:
    counts: dict[int, int] = {}
    for rank in ranks:
        counts[rank] = counts.get(rank, 0) + 1
    tied = sorted(rank for rank, c in counts.items() if c > 1)
    if not tied:
        return _serialize(graph, ranks), ranks
    target = tied[0]
    best: tuple[str, list[int]] | None = None
    for i in range(graph.n_atoms):
        if ranks[i] != target:
            continue
        split = [(rank, 0 if j == i else 1) for j, rank in enumerate(ranks)]
        candidate = _canon_search(graph, _refine(graph, split))
        if best is None or candidate[0] < best[0]:
            best = candidate
    assert best is not None
    return best


def _needs_bracket(atom: Atom, orders: list[int]) -> bool:
    if atom.element in ("Si", "Se", "H"):
        return True
    if atom.formal_charge != 0:
        return True
    bare_h = implicit_hydrogens(
        atom.element, atom.formal_charge, atom.aromatic, orders, atom.attachment
    )
    return bare_h != atom.implicit_h


def _atom_token(atom: Atom, orders: list[int]) -> str:
    symbol = atom.element.lower() if atom.aromatic else atom.element
    if not _needs_bracket(atom, orders):
        return symbol
    h = atom.implicit_h
    h_text = "" if h == 0 else ("H" if h == 1 else f"H{h}")
    q = atom.formal_charge
    if q == 0:
        q_text = ""
    elif q in (1, -1):
        q_text = "+" if q == 1 else "-"
    else:
        q_text = f"{q:+d}"
    return f"[{symbol}{h_text}{q_text}]"


def _bond_text(graph: MolecularGraph, bond_idx: int) -> str:
    bond = graph.bonds[bond_idx]
    if bond.order == SINGLE and graph.atoms[bond.a].aromatic and graph.atoms[bond.b].aromatic:
        return "-"
    return _BOND_TEXT[bond.order]


def _serialize(graph: MolecularGraph, ranks: list[int]) -> str:
    n = graph.n_atoms
    root = ranks.index(0)

    # Pass 1: canonical DFS (children in rank order) classifies each bond as
    # a tree edge or a ring closure. Closures get sequential numbers in
    # discovery order; no digit reuse keeps assignment trivially correct.
    visited = [False] * n
    used_bonds = [False] * graph.n_bonds
    tree_children: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    ring_digits: list[list[tuple[int, int]]] = [[] for _ in range(n)]  # (digit, bond)
    counter = 0

    def classify(v: int) -> None:
        nonlocal counter
        visited[v] = True
        for w, bi in sorted(graph.neighbors(v), key=lambda t: ranks[t[0]]):
            if used_bonds[bi]:
                continue
            used_bonds[bi] = True
            if visited[w]:
                counter += 1
                if counter > 99:
                    raise ValueError("more than 99 ring closures in one molecule")
                ring_digits[w].append((counter, bi))
                ring_digits[v].append((counter, bi))
            else:
                tree_children[v].append((w, bi))
                classify(w)

    classify(root)

    def digit_text(num: int) -> str:
        return str(num) if num < 10 else f"%{num:02d}"

    emitted: set[int] = set()

    def emit(v: int, incoming_bond: int | None) -> str:
        orders = [graph.bonds[bi].order for _, bi in graph.neighbors(v)]
        text = "" if incoming_bond is None else _bond_text(graph, incoming_bond)
        text += _atom_token(graph.atoms[v], orders)
        for num, bi in sorted(ring_digits[v]):
            # Bond symbol goes on the opening occurrence only.
            prefix = _bond_text(graph, bi) if num not in emitted else ""
            emitted.add(num)
            text += prefix + digit_text(num)
        text += "(*)" * graph.atoms[v].attachment
        children = tree_children[v]
        for idx, (w, bi) in enumerate(children):
            sub = emit(w, bi)
            text += sub if idx == len(children) - 1 else f"({sub})"
        return text

    return emit(root, None)
