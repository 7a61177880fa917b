#!/usr/bin/env python3
"""Regenerate the checked-in test fixtures (deterministic).

Fixtures:
  corpus_smiles.txt        50-molecule parser/fragmenter corpus
  fragments_20.txt         20 pairwise non-isomorphic fragment sources
  overfit_pairs.csv/.jsonl 20-pair noiseless regression set + store
  directional_pairs.csv/.jsonl
                           200 pairs whose targets depend on a per-fragment
                           latent that EN-only structure cannot see (C vs Se
                           twins share electronegativity) but text leaks
  clf_molecules.csv/.jsonl linearly separable single-molecule labels + store
"""

from __future__ import annotations

import csv
import hashlib
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from molfuse.chem import parse_smiles, to_smiles  # noqa: E402
from molfuse.data.embstore import EmbeddingRecord, write_embedding_store  # noqa: E402
from molfuse.frag import decompose, reassemble  # noqa: E402

FIXTURES = Path(__file__).resolve().parents[1] / "tests" / "fixtures"

D_TEXT = 8
SECTION_CYCLE = ["structural", "structural", "physical", "physical",
                 "chemical", "chemical", "photovoltaic", "photovoltaic"]

CORPUS = [
    # named in the acceptance criteria
    "c1ccccc1",                      # benzene
    "CCc1ccccc1",                    # ethylbenzene
    "c1ccc(cc1)-c1ccccc1",           # biphenyl
    "c1ccsc1",                       # thiophene
    # thiophene-based backbones with side chains
    "CCCCCCc1cccs1",
    "CCCCCCc1ccc(s1)-c1ccc(s1)CCCCCC",
    "Cc1ccc(s1)-c1ccc(s1)-c1ccc(C)s1",
    "CCC(C)Cc1cc2sc3cc(CC(CC)C)sc3c2s1",
    "c1ccc(s1)-c1ccco1",
    "CCCCc1ccc(o1)C(=O)OC",
    # fused aromatics
    "c1ccc2ccccc2c1",
    "c1ccc2cc3ccccc3cc2c1",
    "Cc1ccc2ccccc2c1",
    "CCCCc1ccc2cc(CC)ccc2c1",
    # benzothiadiazole-like
    "c1ccc2c(c1)nsn2",
    "Cc1ccc2c(c1)nsn2",
    "c1ccc(cc1)-c1ccc2c(c1)nsn2",
    "CCCCCCc1ccc(s1)-c1ccc2c(c1)nsn2",
    # heteroatoms and halogens
    "Fc1ccccc1",
    "Clc1ccccc1",
    "Brc1ccc(cc1)CC",
    "N#Cc1ccccc1",
    "N#Cc1ccc(cc1)C#N",
    "COc1ccccc1",
    "CSc1ccccc1",
    "CC(=O)c1ccccc1",
    "CC(=O)OCc1ccccc1",
    "O=C(OCC)c1ccc(s1)C",
    "c1ccncc1",
    "Cc1ccncc1",
    "c1cc[nH]c1",
    "Cn1cccc1",
    "[se]1cccc1",
    "CCCCc1cc[se]c1",
    # silicon bridges and chains
    "CC[Si](CC)(CC)c1ccccc1",
    "C[Si](C)(C)Cc1ccc(s1)C",
    # sp3 bridged biaryls (fluorene-like)
    "C1c2ccccc2-c2ccccc21",
    "CCC1(CC)c2ccccc2-c2ccccc21",
    "C[Si]1(C)c2ccccc2-c2ccccc21",
    # alkenes/alkynes in chains
    "C=Cc1ccccc1",
    "C#Cc1ccccc1",
    # branched side chains
    "CC(C)Cc1ccc(s1)C(C)C",
    "CCC(CC)COc1ccccc1",
    "CC(C)(C)c1ccccc1",
    # multiple rings joined by chains
    "c1ccc(cc1)CCc1ccccc1",
    "c1ccc(cc1)COc1ccccc1",
    "Cc1ccc(s1)CC(C)Cc1ccc(C)s1",
    # charged / bracket atoms
    "[O-]C(=O)c1ccccc1",
    "C[N+](C)(C)Cc1ccccc1",
    # plain chains
    "CCCCCCCC",
]

# Twin side chains: same EN-labeled graph (C and Se both have Pauling 2.55),
# different canonical keys. latent +delta for the C variant, -delta for Se.
TWIN_CHAINS = [
    ("CCCCC", "CC[Se]CC"),
    ("CC(C)CC", "CC(C)[Se]C"),
    ("CCCCCC", "CCC[Se]CC"),
    ("CC(CC)CC", "CC(CC)[Se]C"),
]

BACKBONES_D = ["c1ccc({})s1", "c1ccc({})o1", "c1ccc({})cc1", "c1cc({})c2c(c1)nsn2"]
BACKBONES_A = ["N#Cc1ccc({})s1", "O=C(OC)c1ccc({})s1", "Fc1ccc({})cc1",
               "c1ccc2cc({})ccc2c1", "Clc1ccc({})s1"]


def key_rng(key: str, salt: str = "") -> np.random.Generator:
    digest = hashlib.sha256((salt + key).encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def token_record(key: str, latent: float) -> EmbeddingRecord:
    """Token matrix whose token-mean is exactly latent on channel 0."""
    rng = key_rng(key, "tokens")
    n_tok = len(SECTION_CYCLE)
    noise = rng.normal(scale=0.6, size=(n_tok, D_TEXT))
    noise -= noise.mean(axis=0, keepdims=True)
    base = np.zeros(D_TEXT)
    base[0] = latent
    base[1:] = key_rng(key, "bias").normal(scale=0.3, size=D_TEXT - 1)
    rows = noise + base
    tokens = [f"tok{i}" for i in range(n_tok)]
    return EmbeddingRecord(
        fragment_key=key,
        description=f"synthetic description of {key}",
        tokens=tokens,
        sections=list(SECTION_CYCLE),
        embeddings=rows,
        encoder="synthetic-hash-v1",
    )


def fragment_keys(smiles: str) -> list[str]:
    return [f.fragment_key for f in decompose(parse_smiles(smiles)).fragments]


def build_directional():
    """20 donors x 10 acceptors; targets = backbone base + twin latents."""
    delta = 1.2
    latent: dict[str, float] = {}
    chains = []
    for ca, cb in TWIN_CHAINS:
        chains.append((ca, +delta))
        chains.append((cb, -delta))

    donors = []
    for bi, backbone in enumerate(BACKBONES_D):
        for ci in range(5):
            chain, _ = chains[(bi * 3 + ci) % len(chains)]
            donors.append(backbone.format(chain))
    donors = sorted(set(donors))[:20]
    acceptors = []
    for bi, backbone in enumerate(BACKBONES_A):
        for ci in range(2):
            chain, _ = chains[(bi * 2 + ci + 1) % len(chains)]
            acceptors.append(backbone.format(chain))
    acceptors = sorted(set(acceptors))[:10]
    assert len(donors) == 20 and len(acceptors) == 10

    chain_latent = {}
    for ca, cb in TWIN_CHAINS:
        chain_latent[ca] = +delta
        chain_latent[cb] = -delta

    all_keys: set[str] = set()
    base_weight = {}
    rows = []
    for d in donors:
        for a in acceptors:
            keys = fragment_keys(d) + fragment_keys(a)
            all_keys.update(keys)
            pce = 6.0
            for key in keys:
                if key not in base_weight:
                    base_weight[key] = float(key_rng(key, "w").uniform(-0.8, 0.8))
                pce += base_weight[key]
                pce += latent_for(key, latent, chain_latent)
            rows.append((d, a, round(pce, 6)))
    records = [token_record(k, latent.get(k, 0.0)) for k in sorted(all_keys)]
    return rows, records, latent


def latent_for(key: str, latent: dict, chain_latent: dict) -> float:
    if key in latent:
        return latent[key]
    value = 0.0
    # a fragment is a twin chain iff its key matches the decomposition of
    # one of the chain molecules attached to a ring (single attachment)
    for chain, lat in chain_latent.items():
        marked = attached_chain_key(chain)
        if key == marked:
            value = lat
            break
    latent[key] = value
    return value


_chain_key_cache: dict[str, str] = {}


def attached_chain_key(chain: str) -> str:
    # chains are substituted into backbones as "(chain)", so the first atom
    # of the chain text is the attachment atom
    if chain not in _chain_key_cache:
        mol = parse_smiles(f"c1ccc({chain})cc1")
        fg = decompose(mol)
        chain_frags = [f for f in fg.fragments if not f.contains_ring]
        assert len(chain_frags) == 1, chain
        _chain_key_cache[chain] = chain_frags[0].fragment_key
    return _chain_key_cache[chain]


def build_overfit():
    donors = ["CCc1ccccc1", "CCCCc1cccs1", "Cc1ccc(s1)-c1ccccc1", "COc1ccccc1",
              "CC(C)Cc1ccc(o1)C"]
    acceptors = ["N#Cc1ccccc1", "O=C(OC)c1cccs1", "Fc1ccc(cc1)C#N",
                 "Clc1ccc2ccccc2c1"]
    rows = []
    keys: set[str] = set()
    for i, d in enumerate(donors):
        for j, a in enumerate(acceptors):
            keys.update(fragment_keys(d) + fragment_keys(a))
            pce = 4.0 + 1.3 * i + 0.9 * j + 0.5 * np.sin(2.0 * i + 3.0 * j)
            rows.append((d, a, round(float(pce), 6)))
    records = [token_record(k, 0.0) for k in sorted(keys)]
    return rows, records


def build_classification():
    """Label = presence of a cyano-bearing fragment; separable by design."""
    positives_chain = "N#CC({})C#N"
    backbones = ["c1ccc({})cc1", "c1ccc({})s1", "c1ccc({})o1", "Cc1ccc({})s1",
                 "c1ccc2cc({})ccc2c1"]
    fillers = ["CCCC", "CC(C)C", "CCOC", "CCCCCC", "CSC", "CCC(C)C", "COC", "CCCC(C)C"]
    mols = []
    for bi, backbone in enumerate(backbones):
        for fi, filler in enumerate(fillers):
            if (bi + fi) % 2 == 0:
                smiles = backbone.format("CC(C#N)C#N".replace("{}", ""))
                smiles = backbone.format("C(C#N)C#N")
                label = 1
            else:
                smiles = backbone.format(filler)
                label = 0
            mols.append((smiles, label))
    keys: set[str] = set()
    for smiles, _ in mols:
        keys.update(fragment_keys(smiles))
    records = []
    for key in sorted(keys):
        # leak the label signal through text as well
        signal = 2.0 if "C#N" in key or "N#C" in key else -0.5
        records.append(token_record(key, signal))
    return mols, records


def write_pairs_csv(path: Path, rows):
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["donor_smiles", "acceptor_smiles", "pce"])
        for d, a, pce in rows:
            writer.writerow([d, a, pce])


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)

    # corpus: validate every molecule parses and round-trips
    seen = set()
    corpus = []
    for smiles in CORPUS:
        mol = parse_smiles(smiles)
        canon = to_smiles(mol)
        assert canon not in seen, f"duplicate corpus molecule {smiles}"
        seen.add(canon)
        rebuilt = reassemble(decompose(mol))
        assert to_smiles(rebuilt) == canon, f"round-trip failed for {smiles}"
        corpus.append(smiles)
    assert len(corpus) == 50, f"corpus has {len(corpus)} molecules, want 50"
    (FIXTURES / "corpus_smiles.txt").write_text("\n".join(corpus) + "\n")

    # 20 pairwise non-isomorphic fragments: each line is "smiles<TAB>pick"
    # where pick selects the ring or the chain fragment of the decomposition.
    frag_sources = [
        ("CCc1ccccc1", "ring"),      # phenyl(*)
        ("CCc1cccs1", "ring"),       # 2-thienyl(*)
        ("CCc1ccco1", "ring"),       # 2-furyl(*)
        ("CCc1ccncc1", "ring"),      # 4-pyridyl(*)
        ("CCc1ccc(F)cc1", "ring"),
        ("CCc1ccc(Cl)cc1", "ring"),
        ("CCc1ccc(Br)cc1", "ring"),
        ("CCc1ccc(OC)cc1", "ring"),
        ("CCc1ccc2ccccc2c1", "ring"),
        ("CCc1ccc2c(c1)nsn2", "ring"),
        ("CCc1cc[se]c1", "ring"),
        ("CCc1ccc(C#N)cc1", "ring"),  # para-disubstituted benzene(*)(*)
        ("Cc1ccccc1", "chain"),      # methyl(*)
        ("CCc1ccccc1", "chain"),     # ethyl(*)
        ("CCCc1ccccc1", "chain"),    # propyl(*)
        ("CC(C)c1ccccc1", "chain"),  # isopropyl(*)
        ("CC(C)(C)c1ccccc1", "chain"),
        ("CCOCc1ccccc1", "chain"),
        ("CCSCc1ccccc1", "chain"),
        ("CC(=O)Cc1ccccc1", "chain"),
    ]
    keys = []
    for smiles, pick in frag_sources:
        frags = decompose(parse_smiles(smiles)).fragments
        wanted = [f for f in frags if f.contains_ring == (pick == "ring")]
        keys.append(wanted[0].fragment_key)
    assert len(frag_sources) == 20
    assert len(set(keys)) == len(keys), "fragment fixture keys collide"
    (FIXTURES / "fragments_20.txt").write_text(
        "\n".join(f"{s}\t{p}" for s, p in frag_sources) + "\n"
    )

    rows, records = build_overfit()
    assert len(rows) == 20
    write_pairs_csv(FIXTURES / "overfit_pairs.csv", rows)
    write_embedding_store(records, FIXTURES / "overfit_store.jsonl")

    rows, records, latent = build_directional()
    assert len(rows) == 200, len(rows)
    n_twins = sum(1 for v in latent.values() if v != 0.0)
    assert n_twins >= 6, f"only {n_twins} twin fragments carry latent signal"
    write_pairs_csv(FIXTURES / "directional_pairs.csv", rows)
    write_embedding_store(records, FIXTURES / "directional_store.jsonl")

    mols, records = build_classification()
    with (FIXTURES / "clf_molecules.csv").open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["smiles", "has_dicyano"])
        for smiles, label in mols:
            writer.writerow([smiles, label])
    write_embedding_store(records, FIXTURES / "clf_store.jsonl")

    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
