import warnings
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def corpus_smiles() -> list[str]:
    return [
        line.strip()
        for line in (FIXTURES / "corpus_smiles.txt").read_text().splitlines()
        if line.strip()
    ]


@pytest.fixture(scope="session")
def corpus_graphs(corpus_smiles):
    from molfuse.chem import parse_smiles
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return [parse_smiles(s) for s in corpus_smiles]


@pytest.fixture(scope="session")
def overfit_store():
    from molfuse.data import read_embedding_store
    return read_embedding_store(FIXTURES / "overfit_store.jsonl")


@pytest.fixture()
def rng():
    return np.random.default_rng(0)


def tiny_gnn(kind="attentive_fp", hidden=8, dropout=0.0, **kw):
    from molfuse.gnn import GnnConfig
    return GnnConfig(layer_kind=kind, hidden_dim=hidden, n_layers=2, n_heads=2,
                     n_timesteps=2, dropout=dropout, **kw)


def tiny_model_config(fusion="attention", **kw):
    from molfuse.model import ModelConfig
    return ModelConfig(
        fragment_gnn=tiny_gnn(),
        molecule_gnn=tiny_gnn(),
        fusion_mode=fusion,
        d_k=8,
        **kw,
    )
