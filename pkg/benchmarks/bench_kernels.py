#!/usr/bin/env python3
"""Compare the compiled fingerprint/Tanimoto kernels against the
pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [n_molecules]
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from molfuse.chem import parse_smiles  # noqa: E402
from molfuse.chem import fingerprint as fp  # noqa: E402

BACKBONES = ["c1ccc({})s1", "c1ccc({})o1", "c1ccc({})cc1", "c1cc({})c2c(c1)nsn2",
             "c1ccc2cc({})ccc2c1"]
CHAINS = ["CC", "CCC", "CCCC", "CC(C)C", "CCCCCC", "CC(CC)CC", "CCOC", "CCSC"]


def corpus(n: int):
    mols = []
    i = 0
    while len(mols) < n:
        backbone = BACKBONES[i % len(BACKBONES)]
        chain = CHAINS[(i * 7 + 3) % len(CHAINS)]
        extra = CHAINS[(i * 5 + 1) % len(CHAINS)]
        smiles = extra + backbone.format(chain)
        mols.append(parse_smiles(smiles))
        i += 1
    return mols


def bench_paths(mols):
    if fp._compiled is None:
        print("compiled kernel unavailable; build the extension first")
        compiled_dt = float("nan")
    else:
        t0 = time.perf_counter()
        for mol in mols:
            flat, offsets, bonds = fp._adjacency_arrays(mol)
            atom_codes = [fp._atom_code(mol, i) for i in range(mol.n_atoms)]
            fp._compiled.path_hashes(atom_codes, flat, offsets, bonds, 7)
        compiled_dt = time.perf_counter() - t0
    t0 = time.perf_counter()
    for mol in mols:
        fp._path_hashes_pure(mol, 7)
    pure_dt = time.perf_counter() - t0
    return compiled_dt, pure_dt


def bench_tanimoto(mols):
    fps = [fp.path_fingerprint(m) for m in mols]
    raw = [f.bits for f in fps]
    if fp._compiled is None:
        compiled_dt = float("nan")
    else:
        t0 = time.perf_counter()
        fp._compiled.mean_pairwise_tanimoto(raw)
        compiled_dt = time.perf_counter() - t0
    ints = [int.from_bytes(b, "little") for b in raw]
    t0 = time.perf_counter()
    total = 0.0
    m = len(ints)
    for i in range(m):
        for j in range(i + 1, m):
            union = (ints[i] | ints[j]).bit_count()
            if union:
                total += 1.0 - (ints[i] & ints[j]).bit_count() / union
    pure_dt = time.perf_counter() - t0
    return compiled_dt, pure_dt


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 400
    mols = corpus(n)
    print(f"{n} molecules, mean {sum(m.n_atoms for m in mols) / n:.1f} atoms")
    c_dt, p_dt = bench_paths(mols)
    print(f"path enumeration : compiled {c_dt:8.3f}s  pure {p_dt:8.3f}s  "
          f"speedup {p_dt / c_dt:5.1f}x")
    c_dt, p_dt = bench_tanimoto(mols)
    print(f"pairwise tanimoto: compiled {c_dt:8.3f}s  pure {p_dt:8.3f}s  "
          f"speedup {p_dt / c_dt:5.1f}x")


if __name__ == "__main__":
    main()
