"""Path fingerprints and Tanimoto distance."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from molfuse.chem import (
    LengthMismatchError,
    parse_smiles,
    path_fingerprint,
    tanimoto_distance,
)
from molfuse.chem.fingerprint import Fingerprint, mean_pairwise_tanimoto


def test_single_atom_sets_bits():
    fp = path_fingerprint(parse_smiles("C"))
    assert fp.n_set >= 1
    assert fp.n_bits == 2048


def test_nset_matches_popcount():
    fp = path_fingerprint(parse_smiles("CCc1ccccc1"))
    assert fp.n_set == int.from_bytes(fp.bits, "little").bit_count()


def test_aromatic_vs_aliphatic_ring_differ():
    assert path_fingerprint(parse_smiles("c1ccccc1")) != \
        path_fingerprint(parse_smiles("C1CCCCC1"))


def test_permutation_invariance(corpus_graphs):
    rnd = random.Random(5)
    for mol in corpus_graphs[::7]:
        fp = path_fingerprint(mol)
        for _ in range(5):
            order = list(range(mol.n_atoms))
            rnd.shuffle(order)
            assert path_fingerprint(mol.permuted(order)) == fp


def test_tanimoto_identity_and_disjoint():
    a = path_fingerprint(parse_smiles("CCO"))
    assert tanimoto_distance(a, a) == 0.0
    x = Fingerprint(bits=bytes([0b1]) + bytes(255), n_set=1)
    y = Fingerprint(bits=bytes([0b10]) + bytes(255), n_set=1)
    assert tanimoto_distance(x, y) == 1.0


def test_tanimoto_worked_example():
    # bits {1,2,3} vs {2,3,4}: 1 - 2/4
    def from_positions(positions):
        value = 0
        for p in positions:
            value |= 1 << p
        return Fingerprint(bits=value.to_bytes(256, "little"), n_set=len(positions))

    a = from_positions({1, 2, 3})
    b = from_positions({2, 3, 4})
    assert tanimoto_distance(a, b) == pytest.approx(0.5, abs=0)


def test_tanimoto_both_empty_is_zero():
    empty = Fingerprint(bits=bytes(256), n_set=0)
    assert tanimoto_distance(empty, empty) == 0.0


def test_length_mismatch():
    a = Fingerprint(bits=bytes(256), n_set=0)
    b = Fingerprint(bits=bytes(128), n_set=0)
    with pytest.raises(LengthMismatchError):
        tanimoto_distance(a, b)


@given(st.lists(st.integers(min_value=0, max_value=2047), max_size=40),
       st.lists(st.integers(min_value=0, max_value=2047), max_size=40))
@settings(max_examples=100, deadline=None)
def test_tanimoto_symmetry_and_range(pos_a, pos_b):
    def pack(positions):
        value = 0
        for p in positions:
            value |= 1 << p
        return Fingerprint(bits=value.to_bytes(256, "little"),
                           n_set=value.bit_count())

    a, b = pack(pos_a), pack(pos_b)
    d_ab = tanimoto_distance(a, b)
    d_ba = tanimoto_distance(b, a)
    assert d_ab == d_ba
    assert 0.0 <= d_ab <= 1.0
    assert tanimoto_distance(a, a) == 0.0


def test_mean_pairwise(corpus_graphs):
    fps = [path_fingerprint(m) for m in corpus_graphs[:8]]
    mean = mean_pairwise_tanimoto(fps)
    brute = []
    for i in range(len(fps)):
        for j in range(i + 1, len(fps)):
            brute.append(tanimoto_distance(fps[i], fps[j]))
    assert mean == pytest.approx(sum(brute) / len(brute), rel=1e-12)
    assert mean_pairwise_tanimoto(fps[:1]) == 0.0
    # identical molecules have distance 0
    assert mean_pairwise_tanimoto([fps[0], fps[0]]) == 0.0


def test_kernels_agree_when_compiled(corpus_graphs):
    from molfuse.chem import fingerprint as fp_mod
    if fp_mod._compiled is None:
        pytest.skip("compiled kernel not built")
    for mol in corpus_graphs[:10]:
        compiled = fp_mod.path_fingerprint(mol)
        pure = fp_mod.Fingerprint(bits=b"", n_set=0)
        hashes = fp_mod._path_hashes_pure(mol, 7)
        value = 0
        for h in hashes:
            value |= 1 << (h % 2048)
        assert compiled.bits == value.to_bytes(256, "little")
