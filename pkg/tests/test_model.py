"""Featurization, the full predictor, loss, and the batched fusion path."""

import warnings

import numpy as np
import pytest

from conftest import tiny_model_config
from molfuse.autodiff import Tensor, ops
from molfuse.chem import parse_smiles
from molfuse.data.embstore import EmbeddingRecord, EmbeddingStore
from molfuse.frag import decompose
from molfuse.fusion import FusionParams, TokenEmbeddings, fuse_attention
from molfuse.model import (
    AtomFeatureConfig,
    MissingEmbeddingError,
    ModelConfig,
    ModelError,
    Predictor,
    UnknownElementError,
    featurize_atoms,
    loss,
)


def store_for(smiles_list, d_text=8, n_tokens=6, seed=0):
    keys = set()
    for smiles in smiles_list:
        keys.update(f.fragment_key for f in decompose(parse_smiles(smiles)).fragments)
    rng = np.random.default_rng(seed)
    sections = (["structural", "physical", "physical", "chemical", "chemical",
                 "photovoltaic"] * 3)[:n_tokens]
    records = {}
    for key in sorted(keys):
        records[key] = EmbeddingRecord(
            fragment_key=key, description=f"about {key}",
            tokens=[f"w{i}" for i in range(n_tokens)], sections=list(sections),
            embeddings=rng.normal(size=(n_tokens, d_text)), encoder="stub",
        )
    return EmbeddingStore(records)


# --- featurize_atoms ---

def test_en_only_feature():
    cfg = AtomFeatureConfig()
    mol = parse_smiles("C")
    feats = featurize_atoms(mol, cfg)
    assert feats.shape == (1, 1)
    # Pauling EN of carbon is 2.55, standardized by (x - 2.6) / 0.5
    assert feats[0, 0] == pytest.approx((2.55 - 2.6) / 0.5)


def test_aromatic_flag_feature():
    cfg = AtomFeatureConfig(features=("is_aromatic",))
    feats = featurize_atoms(parse_smiles("c1ccccc1"), cfg)
    assert np.array_equal(feats, np.ones((6, 1)))


def test_degree_feature_methane():
    cfg = AtomFeatureConfig(features=("degree",))
    feats = featurize_atoms(parse_smiles("C"), cfg)
    assert feats[0, 0] == 1.0  # one-hot slot for heavy-atom degree 0
    assert feats[0, 1:].sum() == 0.0


def test_all_features_width():
    cfg = AtomFeatureConfig(features=(
        "atomic_number", "mass", "electronegativity", "hybridization",
        "degree", "formal_charge", "implicit_explicit_valence", "is_aromatic",
    ))
    feats = featurize_atoms(parse_smiles("CC(=O)c1ccccc1"), cfg)
    assert feats.shape == (9, cfg.width)
    assert cfg.width == 1 + 1 + 1 + 3 + 7 + 1 + 2 + 1


def test_feature_config_validation():
    with pytest.raises(ValueError):
        AtomFeatureConfig(features=())
    with pytest.raises(ValueError):
        AtomFeatureConfig(features=("bogus",))


# --- predictor wiring ---

def test_fusion_none_ignores_store():
    cfg = tiny_model_config(fusion="none")
    model = Predictor(cfg, d_text=0, seed=0)
    out1 = model.encode_molecule("CCc1ccccc1", None)
    out2 = model.encode_molecule("CCc1ccccc1", store_for(["CCc1ccccc1"]))
    assert np.array_equal(out1, out2)


def test_single_fragment_molecule():
    cfg = tiny_model_config(fusion="none")
    model = Predictor(cfg, d_text=0, seed=0)
    emb = model.encode_molecule("c1ccccc1", None)
    assert emb.shape == (cfg.molecule_gnn.hidden_dim,)


def test_uncut_molecule_reduces_to_plain_gnn_stack():
    """With fusion off and no cuttable bond, the hierarchical model is the
    fragment encoder over the whole molecule feeding a one-node top graph."""
    import numpy as np
    from molfuse.autodiff import Tensor
    from molfuse.autodiff.tensor import no_grad
    from molfuse.gnn import GraphBatch
    from molfuse.model import adjacency_and_orders, featurize_atoms

    cfg = tiny_model_config(fusion="none")
    model = Predictor(cfg, d_text=0, seed=1)
    mol = parse_smiles("c1ccccc1")
    via_pipeline = model.encode_molecule(mol, None)

    with no_grad():
        feats = featurize_atoms(mol, cfg.features)
        adj, orders = adjacency_and_orders(mol)
        atom_batch = GraphBatch.from_graphs([feats], [adj], [orders])
        structural = model.frag_encoder.forward(model.params, atom_batch)
        top = GraphBatch(structural, np.zeros((1, 1)),
                         np.zeros(1, dtype=np.intp), n_graphs=1,
                         bond_orders=np.zeros((1, 1), dtype=np.int64))
        manual = model.mol_encoder.forward(model.params, top).data[0]
    assert np.abs(via_pipeline - manual).max() < 1e-12


def test_missing_embedding_strict_vs_lenient():
    smiles = "CCc1ccccc1"
    cfg = tiny_model_config()
    empty = EmbeddingStore({})
    partial = store_for([smiles])
    model = Predictor(cfg, d_text=8, seed=0)
    with pytest.raises(ModelError):
        model.encode_molecule(smiles, empty, strict=True)  # empty store
    # remove one key: strict raises naming it, lenient warns
    key = next(iter(partial.records))
    removed = EmbeddingStore({k: v for k, v in partial.records.items() if k != key})
    with pytest.raises(MissingEmbeddingError, match="has no embedding"):
        model.encode_molecule(smiles, removed, strict=True)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        emb = model.encode_molecule(smiles, removed, strict=False)
    assert emb.shape == (cfg.molecule_gnn.hidden_dim,)
    assert any("zero text vector" in str(w.message) for w in caught)


def test_atom_permutation_leaves_encoding(rng):
    smiles = "CC(C)Cc1ccc(s1)-c1ccc2c(c1)nsn2"
    cfg = tiny_model_config()
    store = store_for([smiles])
    model = Predictor(cfg, d_text=8, seed=1)
    mol = parse_smiles(smiles)
    base = model.encode_molecule(mol, store)
    for _ in range(10):
        order = rng.permutation(mol.n_atoms).tolist()
        emb = model.encode_molecule(mol.permuted(order), store)
        assert np.abs(emb - base).max() < 1e-9


def test_predict_pair_modes():
    donor, acceptor = "CCc1ccccc1", "N#Cc1ccc(cc1)C#N"
    store = store_for([donor, acceptor, "COc1ccccc1"])
    for mode in ("donor_only", "acceptor_only"):
        cfg = tiny_model_config(pair_mode=mode)
        model = Predictor(cfg, d_text=8, seed=3)
        a = model.predict_pair(donor, acceptor, store)
        b = model.predict_pair(donor, "COc1ccccc1", store)
        if mode == "donor_only":
            assert a.value == b.value
        else:
            assert a.value != b.value
    cfg = tiny_model_config(pair_mode="pair")
    model = Predictor(cfg, d_text=8, seed=3)
    a = model.predict_pair(donor, acceptor, store)
    b = model.predict_pair(donor, "COc1ccccc1", store)
    assert a.value != b.value


def test_identical_donor_acceptor_dedup():
    smiles = "CCc1ccccc1"
    store = store_for([smiles])
    model = Predictor(tiny_model_config(), d_text=8, seed=0)
    comp = model.compile([parse_smiles(smiles), parse_smiles(smiles)], store)
    assert comp.n_molecules == 1
    assert np.array_equal(comp.mol_ids, [0, 0])


def test_batched_attention_fusion_matches_single_op(rng):
    """The segment-batched fusion must equal per-fragment fuse_attention."""
    smiles = ["CCc1ccccc1", "CC(C)c1ccc(s1)C", "CCCCc1ccco1"]
    store = store_for(smiles)
    cfg = tiny_model_config()
    model = Predictor(cfg, d_text=8, seed=5)
    graphs = [parse_smiles(s) for s in smiles]
    comp = model.compile(graphs, store)
    structural = model.frag_encoder.forward(model.params, comp.frag_batch)
    fused = model._fuse(structural, comp).data

    params = FusionParams(W_Q=model.params["fusion.W_Q"],
                          W_K=model.params["fusion.W_K"],
                          W_V=model.params["fusion.W_V"])
    wanted = set(cfg.text_sections)
    for fi, key in enumerate(comp.frag_keys):
        record = store.get(key)
        keep = [i for i, sec in enumerate(record.sections) if sec in wanted]
        t = TokenEmbeddings(
            tokens=[record.tokens[i] for i in keep],
            matrix=Tensor(record.embeddings[keep]),
            sections=[record.sections[i] for i in keep],
            fragment_key=key,
        )
        single = fuse_attention(Tensor(structural.data[fi]), t, params)
        assert np.abs(single.v.data - fused[fi]).max() < 1e-10, key


def test_pair_mode_requires_pairs():
    from molfuse.data.datasets import MoleculeSample, TaskDataset
    from molfuse.model import prepare_data
    ds = TaskDataset(
        samples=[MoleculeSample("CC", np.array([1.0]))],
        task_kind="classification",
    )
    model = Predictor(tiny_model_config(fusion="none", head="classification"),
                      d_text=0, seed=0)
    with pytest.raises(ModelError):
        prepare_data(model, ds, None)


# --- loss ---

def test_loss_regression_zero():
    pred = Tensor([[1.0], [2.0]])
    assert float(loss(pred, [[1.0], [2.0]], "regression").data) == 0.0


def test_loss_bce_half():
    out = loss(Tensor([[0.5]]), [[1.0]], "classification")
    assert float(out.data) == pytest.approx(np.log(2.0), abs=1e-9)
    out = loss(Tensor([[0.5]]), [[0.0]], "classification")
    assert float(out.data) == pytest.approx(np.log(2.0), abs=1e-9)


def test_loss_bce_all_masked_zero_grad():
    logits = Tensor([[0.3], [0.7]], requires_grad=True)
    out = ops.bce_with_logits(logits, np.array([[1.0], [0.0]]),
                              np.zeros((2, 1)))
    assert float(out.data) == 0.0
    assert out._parents == ()  # constant: no gradient flows


def test_bce_with_logits_matches_probability_loss(rng):
    z = rng.normal(size=(5, 2))
    y = (rng.random((5, 2)) > 0.5).astype(float)
    stable = float(ops.bce_with_logits(Tensor(z), y).data)
    probs = 1.0 / (1.0 + np.exp(-z))
    composite = float(loss(Tensor(probs), y, "classification").data)
    assert stable == pytest.approx(composite, rel=1e-9)


def test_model_config_validation():
    with pytest.raises(ModelError):
        ModelConfig(fusion_mode="bogus")
    with pytest.raises(ModelError):
        ModelConfig(text_sections=("bogus",))
    with pytest.raises(ModelError):
        ModelConfig(pair_mode="both")
    cfg = ModelConfig()
    rebuilt = ModelConfig.from_dict(cfg.to_dict())
    assert rebuilt.to_dict() == cfg.to_dict()


def test_concurrent_prediction_on_frozen_model():
    """A frozen model serves predict_pair from several threads at once."""
    from concurrent.futures import ThreadPoolExecutor
    donor, acceptor = "CCc1ccccc1", "N#Cc1ccc(cc1)C#N"
    store = store_for([donor, acceptor])
    model = Predictor(tiny_model_config(), d_text=8, seed=4)
    expected = model.predict_pair(donor, acceptor, store).value
    with ThreadPoolExecutor(max_workers=8) as pool:
        values = list(pool.map(
            lambda _: model.predict_pair(donor, acceptor, store).value,
            range(32),
        ))
    assert all(v == expected for v in values)


def test_unknown_element_error():
    from molfuse.chem.mol import Atom, MolecularGraph
    mol = MolecularGraph(atoms=[Atom(element="H", index=0)], bonds=[], rings=[])
    mol.atoms[0] = Atom(element="Xx", index=0)
    with pytest.raises(UnknownElementError):
        featurize_atoms(mol, AtomFeatureConfig())
