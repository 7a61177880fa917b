"""Decompose molecules into functional modules and reassemble them.

A bond is cut iff it is a single, non-ring C-C bond with exactly one
endpoint belonging to a ring (the conjugated backbone side) and the other
endpoint acyclic (the side chain). Bonds linking two ring systems stay.
Severed bonds leave attachment markers on both atoms, so a fragment's
canonical form distinguishes e.g. an ethyl substituent from free ethane.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..chem.canon import to_smiles
from ..chem.mol import (
    SINGLE,
    Atom,
    Bond,
    ChemError,
    MolecularGraph,
    connected_components,
    perceive_rings,
)


class InconsistentAttachmentError(ChemError):
    pass


@dataclass(frozen=True)
class Fragment:
    subgraph: MolecularGraph
    attachment_points: frozenset[int]
    fragment_key: str
    contains_ring: bool
    parent_atoms: tuple[int, ...]  # local atom index -> parent atom index


@dataclass(frozen=True)
class FragmentEdge:
    frag_a: int
    frag_b: int
    atom_a: int  # local index inside frag_a
    atom_b: int  # local index inside frag_b


@dataclass
class FragmentGraph:
    fragments: list[Fragment]
    edges: list[FragmentEdge]
    parent_smiles: str

    def edge_pairs(self) -> list[tuple[int, int]]:
        return [(e.frag_a, e.frag_b) for e in self.edges]


def cut_bond_indices(mol: MolecularGraph) -> list[int]:
    ring_atoms = mol.ring_atoms()
    cuts = []
    for bi, bond in enumerate(mol.bonds):
        if bond.order != SINGLE or bond.in_ring:
            continue
        ea, eb = mol.atoms[bond.a], mol.atoms[bond.b]
        if ea.element != "C" or eb.element != "C":
            continue
        if (bond.a in ring_atoms) != (bond.b in ring_atoms):
            cuts.append(bi)
    return cuts


def decompose(mol: MolecularGraph) -> FragmentGraph:
    """Split at qualifying ring/side-chain bonds; single fragment if none."""
    cuts = set(cut_bond_indices(mol))
    kept = [b for bi, b in enumerate(mol.bonds) if bi not in cuts]
    comps = connected_components(mol.n_atoms, kept)
    comp_of = [0] * mol.n_atoms
    for ci, comp in enumerate(comps):
        for idx in comp:
            comp_of[idx] = ci

    attach_count = [0] * mol.n_atoms
    for bi in cuts:
        bond = mol.bonds[bi]
        attach_count[bond.a] += 1
        attach_count[bond.b] += 1

    fragments = []
    local_index: dict[int, int] = {}
    for comp in comps:
        ordered = sorted(comp)
        for local, parent_idx in enumerate(ordered):
            local_index[parent_idx] = local
        atoms = [
            replace(mol.atoms[p], index=local, attachment=attach_count[p])
            for local, p in enumerate(ordered)
        ]
        in_comp = set(ordered)
        bonds = [
            Bond(local_index[b.a], local_index[b.b], b.order)
            for b in kept
            if b.a in in_comp
        ]
        rings, ring_bonds = perceive_rings(len(atoms), bonds)
        bonds = [
            replace(b, in_ring=(bi in ring_bonds)) for bi, b in enumerate(bonds)
        ]
        sub = MolecularGraph(atoms=atoms, bonds=bonds, rings=rings)
        fragments.append(
            Fragment(
                subgraph=sub,
                attachment_points=frozenset(
                    i for i, a in enumerate(atoms) if a.attachment
                ),
                fragment_key=to_smiles(sub),
                contains_ring=bool(rings),
                parent_atoms=tuple(ordered),
            )
        )

    edges = [
        FragmentEdge(
            frag_a=comp_of[mol.bonds[bi].a],
            frag_b=comp_of[mol.bonds[bi].b],
            atom_a=local_index[mol.bonds[bi].a],
            atom_b=local_index[mol.bonds[bi].b],
        )
        for bi in sorted(cuts)
    ]
    return FragmentGraph(fragments=fragments, edges=edges,
                         parent_smiles=mol.source_smiles)


def canonical_key(frag: Fragment) -> str:
    """Canonical marker-bearing SMILES; equal iff fragments are isomorphic."""
    return to_smiles(frag.subgraph)


def reassemble(fg: FragmentGraph) -> MolecularGraph:
    """Rejoin fragments along their cut bonds; inverse of decompose."""
    offsets = []
    total = 0
    for frag in fg.fragments:
        offsets.append(total)
        total += frag.subgraph.n_atoms

    capacity: list[int] = [0] * total
    atoms: list[Atom] = []
    bonds: list[Bond] = []
    for fi, frag in enumerate(fg.fragments):
        off = offsets[fi]
        for atom in frag.subgraph.atoms:
            capacity[off + atom.index] = atom.attachment
            atoms.append(replace(atom, index=off + atom.index, attachment=0))
        for bond in frag.subgraph.bonds:
            bonds.append(Bond(off + bond.a, off + bond.b, bond.order))

    for edge in fg.edges:
        if not (0 <= edge.frag_a < len(fg.fragments)
                and 0 <= edge.frag_b < len(fg.fragments)):
            raise InconsistentAttachmentError(f"edge references missing fragment: {edge}")
        ga = offsets[edge.frag_a] + edge.atom_a
        gb = offsets[edge.frag_b] + edge.atom_b
        if capacity[ga] <= 0 or capacity[gb] <= 0:
            raise InconsistentAttachmentError(
                f"edge {edge} has no matching attachment marker"
            )
        capacity[ga] -= 1
        capacity[gb] -= 1
        bonds.append(Bond(ga, gb, SINGLE))

    leftover = sum(capacity)
    if leftover:
        raise InconsistentAttachmentError(
            f"{leftover} attachment marker(s) left unmatched after reassembly"
        )

    rings, ring_bonds = perceive_rings(total, bonds)
    bonds = [replace(b, in_ring=(bi in ring_bonds)) for bi, b in enumerate(bonds)]
    return MolecularGraph(atoms=atoms, bonds=bonds, rings=rings,
                          source_smiles=fg.parent_smiles)
