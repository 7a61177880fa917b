"""Hashed linear-path fingerprints and Tanimoto distance.

Paths of 1..max_path_len+1 atoms are encoded as alternating atom/bond codes,
read in whichever direction hashes lexicographically smaller, FNV-1a hashed,
and folded into a fixed-width bitset. A compiled kernel is used when the
optional extension built from ``_speedups.pyx`` is importable; set
``MOLFUSE_PURE_PYTHON=1`` to force the pure-Python fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .elements import SUPPORTED_ELEMENTS
from .mol import LengthMismatchError, MolecularGraph

_ELEMENT_CODE = {el: i for i, el in enumerate(sorted(SUPPORTED_ELEMENTS))}

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

try:  # pragma: no cover - exercised via the equivalence test when built
    from . import _speedups as _compiled
except ImportError:
    _compiled = None

if os.environ.get("MOLFUSE_PURE_PYTHON"):
    _compiled = None


def kernel_name() -> str:
    return "compiled" if _compiled is not None else "pure-python"


@dataclass(frozen=True)
class Fingerprint:
    bits: bytes
    n_set: int

    @property
    def n_bits(self) -> int:
        return len(self.bits) * 8


def _atom_code(graph: MolecularGraph, idx: int) -> int:
    atom = graph.atoms[idx]
    sign = 0 if atom.formal_charge == 0 else (1 if atom.formal_charge > 0 else 2)
    return (_ELEMENT_CODE[atom.element] << 4) | (int(atom.aromatic) << 2) | sign


def _fnv(codes: list[int]) -> int:
    h = _FNV_OFFSET
    for code in codes:
        h ^= code
        h = (h * _FNV_PRIME) & _MASK64
    return h


def _path_hashes_pure(graph: MolecularGraph, max_path_len: int) -> set[int]:
    hashes: set[int] = set()
    atom_codes = [_atom_code(graph, i) for i in range(graph.n_atoms)]
    max_codes = 2 * max_path_len + 1  # atoms interleaved with bond codes

    def extend(codes: list[int], tail: int, on_path: set[int]) -> None:
        forward = codes
        backward = codes[::-1]
        hashes.add(_fnv(forward if forward <= backward else backward))
        if len(codes) >= max_codes:
            return
        for nbr, bi in graph.neighbors(tail):
            if nbr in on_path:
                continue
            bond_code = 0x100 | graph.bonds[bi].order
            on_path.add(nbr)
            extend(codes + [bond_code, atom_codes[nbr]], nbr, on_path)
            on_path.remove(nbr)

    for start in range(graph.n_atoms):
        extend([atom_codes[start]], start, {start})
    return hashes


def path_fingerprint(graph: MolecularGraph, max_path_len: int = 7,
                     n_bits: int = 2048) -> Fingerprint:
    """Hashed linear-path fingerprint; invariant under atom relabeling."""
    if n_bits % 8:
        raise ValueError("n_bits must be a multiple of 8")
    if _compiled is not None:
        flat_nbrs, offsets, bond_codes = _adjacency_arrays(graph)
        atom_codes = [_atom_code(graph, i) for i in range(graph.n_atoms)]
        hashes = _compiled.path_hashes(atom_codes, flat_nbrs, offsets, bond_codes,
                                       max_path_len)
    else:
        hashes = _path_hashes_pure(graph, max_path_len)
    value = 0
    for h in hashes:
        value |= 1 << (h % n_bits)
    bits = value.to_bytes(n_bits // 8, "little")
    return Fingerprint(bits=bits, n_set=value.bit_count())


def _adjacency_arrays(graph: MolecularGraph) -> tuple[list[int], list[int], list[int]]:
    flat: list[int] = []
    bond_codes: list[int] = []
    offsets = [0]
    for i in range(graph.n_atoms):
        for nbr, bi in graph.neighbors(i):
            flat.append(nbr)
            bond_codes.append(0x100 | graph.bonds[bi].order)
        offsets.append(len(flat))
    return flat, offsets, bond_codes


def tanimoto_distance(a: Fingerprint, b: Fingerprint) -> float:
    """1 - |a AND b| / |a OR b|; two empty fingerprints have distance 0."""
    if len(a.bits) != len(b.bits):
        raise LengthMismatchError(
            f"fingerprint lengths differ: {len(a.bits) * 8} vs {len(b.bits) * 8}"
        )
    ia = int.from_bytes(a.bits, "little")
    ib = int.from_bytes(b.bits, "little")
    union = (ia | ib).bit_count()
    if union == 0:
        return 0.0
    return 1.0 - (ia & ib).bit_count() / union


def mean_pairwise_tanimoto(fps: list[Fingerprint]) -> float:
    """Mean Tanimoto distance over all unordered pairs; 0 for < 2 inputs."""
    m = len(fps)
    if m < 2:
        return 0.0
    if _compiled is not None:
        return _compiled.mean_pairwise_tanimoto([fp.bits for fp in fps])
    total = 0.0
    ints = [int.from_bytes(fp.bits, "little") for fp in fps]
    for i in range(m):
        for j in range(i + 1, m):
            union = (ints[i] | ints[j]).bit_count()
            if union:
                total += 1.0 - (ints[i] & ints[j]).bit_count() / union
    return total / (m * (m - 1) / 2)
