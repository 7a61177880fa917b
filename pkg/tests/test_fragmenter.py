"""Decomposition predicate, partition invariants, reassembly, canonical keys."""

import random
from pathlib import Path

import pytest

from molfuse.chem import parse_smiles, to_smiles
from molfuse.frag import (
    FragmentEdge,
    FragmentGraph,
    InconsistentAttachmentError,
    canonical_key,
    decompose,
    reassemble,
)
from helpers import isomorphic

FIXTURES = Path(__file__).parent / "fixtures"


def test_ethylbenzene():
    fg = decompose(parse_smiles("CCc1ccccc1"))
    assert len(fg.fragments) == 2
    assert len(fg.edges) == 1
    ring = [f for f in fg.fragments if f.contains_ring]
    chain = [f for f in fg.fragments if not f.contains_ring]
    assert len(ring) == 1 and len(chain) == 1
    assert ring[0].subgraph.n_atoms == 6
    assert chain[0].subgraph.n_atoms == 2


def test_benzene_single_fragment():
    fg = decompose(parse_smiles("c1ccccc1"))
    assert len(fg.fragments) == 1
    assert len(fg.edges) == 0


def test_biphenyl_not_cut():
    # ring-ring single bonds are backbone-backbone, not ring/side-chain
    fg = decompose(parse_smiles("c1ccc(cc1)-c1ccccc1"))
    assert len(fg.fragments) == 1
    assert len(fg.edges) == 0


def test_heteroatom_links_not_cut():
    # only C-C bonds qualify
    fg = decompose(parse_smiles("COc1ccccc1"))
    assert len(fg.fragments) == 1


def test_double_bond_not_cut():
    # methylenecyclohexane: the exocyclic C=C is not single order
    fg = decompose(parse_smiles("C=C1CCCCC1"))
    assert len(fg.fragments) == 1
    # styrene: the vinyl-ring C-C bond is single, so it is cut
    fg = decompose(parse_smiles("C=Cc1ccccc1"))
    assert len(fg.fragments) == 2


def test_partition_and_conservation(corpus_graphs):
    for mol in corpus_graphs:
        fg = decompose(mol)
        n_frag_atoms = sum(f.subgraph.n_atoms for f in fg.fragments)
        n_frag_bonds = sum(f.subgraph.n_bonds for f in fg.fragments)
        assert n_frag_atoms == mol.n_atoms
        assert n_frag_bonds + len(fg.edges) == mol.n_bonds
        # attachment markers match edges two-sided
        n_attach = sum(a.attachment for f in fg.fragments for a in f.subgraph.atoms)
        assert n_attach == 2 * len(fg.edges)
        # fragment graph connectivity: fragments + edges form one component
        if len(fg.fragments) > 1:
            seen = {0}
            frontier = [0]
            while frontier:
                cur = frontier.pop()
                for e in fg.edges:
                    for a, b in ((e.frag_a, e.frag_b), (e.frag_b, e.frag_a)):
                        if a == cur and b not in seen:
                            seen.add(b)
                            frontier.append(b)
            assert seen == set(range(len(fg.fragments)))


def test_reassemble_roundtrip(corpus_graphs):
    for mol in corpus_graphs:
        rebuilt = reassemble(decompose(mol))
        assert isomorphic(mol, rebuilt)
        assert to_smiles(rebuilt) == to_smiles(mol)


def test_reassemble_single_fragment():
    mol = parse_smiles("c1ccccc1")
    fg = decompose(mol)
    assert isomorphic(reassemble(fg), mol)


def test_reassemble_corrupted_edges():
    fg = decompose(parse_smiles("CCc1ccccc1"))
    broken = FragmentGraph(
        fragments=fg.fragments,
        edges=fg.edges + [fg.edges[0]],  # duplicate edge exceeds capacity
        parent_smiles=fg.parent_smiles,
    )
    with pytest.raises(InconsistentAttachmentError):
        reassemble(broken)
    missing = FragmentGraph(fragments=fg.fragments, edges=[],
                            parent_smiles=fg.parent_smiles)
    with pytest.raises(InconsistentAttachmentError):
        reassemble(missing)
    bad_ref = FragmentGraph(
        fragments=fg.fragments,
        edges=[FragmentEdge(0, 5, 0, 0)],
        parent_smiles=fg.parent_smiles,
    )
    with pytest.raises(InconsistentAttachmentError):
        reassemble(bad_ref)


def test_decompose_permutation_invariant(corpus_graphs):
    rnd = random.Random(7)
    for mol in corpus_graphs[::5]:
        fg = decompose(mol)
        keys = sorted(f.fragment_key for f in fg.fragments)
        for _ in range(5):
            order = list(range(mol.n_atoms))
            rnd.shuffle(order)
            fg2 = decompose(mol.permuted(order))
            assert sorted(f.fragment_key for f in fg2.fragments) == keys
            assert len(fg2.edges) == len(fg.edges)


def test_canonical_key_contract():
    fg = decompose(parse_smiles("CCc1ccccc1"))
    for frag in fg.fragments:
        assert canonical_key(frag) == frag.fragment_key
    keys = {f.fragment_key for f in fg.fragments}
    assert len(keys) == 2  # ethyl != phenyl


def test_attachment_distinguishes_key():
    # an ethyl substituent is not free ethane
    ethane_key = to_smiles(parse_smiles("CC"))
    fg = decompose(parse_smiles("CCc1ccccc1"))
    chain = next(f for f in fg.fragments if not f.contains_ring)
    assert chain.fragment_key != ethane_key
    assert "*" in chain.fragment_key


def test_twenty_fixture_fragments_distinct_keys():
    lines = (FIXTURES / "fragments_20.txt").read_text().splitlines()
    frags = []
    for line in lines:
        smiles, pick = line.split("\t")
        fg = decompose(parse_smiles(smiles))
        frags.append(next(f for f in fg.fragments
                          if f.contains_ring == (pick == "ring")))
    keys = [f.fragment_key for f in frags]
    assert len(keys) == 20
    assert len(set(keys)) == 20
    # independent check: the 20 fragments really are pairwise non-isomorphic
    from helpers import as_networkx
    import networkx as nx
    for i in range(20):
        for j in range(i + 1, 20):
            assert not nx.is_isomorphic(
                as_networkx(frags[i].subgraph), as_networkx(frags[j].subgraph),
                node_match=lambda x, y: (x["element"], x["aromatic"],
                                         x["attachment"]) == (y["element"],
                                                              y["aromatic"],
                                                              y["attachment"]),
                edge_match=lambda x, y: x["order"] == y["order"],
            ), (keys[i], keys[j])


def test_key_permutation_stability():
    rnd = random.Random(3)
    fg = decompose(parse_smiles("CC(C)Cc1ccc(s1)-c1ccc2c(c1)nsn2"))
    for frag in fg.fragments:
        sub = frag.subgraph
        for _ in range(100):
            order = list(range(sub.n_atoms))
            rnd.shuffle(order)
            assert to_smiles(sub.permuted(order)) == frag.fragment_key
