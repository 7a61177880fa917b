"""CLI surface: fragment, stats, train, eval, predict, error mapping."""

import json
from pathlib import Path

import numpy as np
import pytest

from molfuse.cli import main

FIXTURES = Path(__file__).parent / "fixtures"

TINY = [
    "--set", "model.fragment_gnn.hidden_dim=8",
    "--set", "model.fragment_gnn.n_heads=2",
    "--set", "model.molecule_gnn.hidden_dim=8",
    "--set", "model.molecule_gnn.n_heads=2",
    "--set", "model.d_k=8",
    "--set", "model.head_hidden=8",
    "--set", "train.max_steps=40",
]


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_fragment_command(tmp_path, capsys):
    inp = tmp_path / "mols.smi"
    inp.write_text("CCc1ccccc1\nc1ccccc1\n")
    code, out, _ = run(["fragment", "--input", str(inp)], capsys)
    assert code == 0
    records = [json.loads(line) for line in out.strip().splitlines()]
    assert len(records) == 2
    assert len(records[0]["fragments"]) == 2
    assert records[0]["edges"] == [[0, 1]]
    assert all(set(f) == {"key", "smiles", "contains_ring"}
               for f in records[0]["fragments"])
    assert records[1]["fragments"][0]["contains_ring"] is True


def test_fragment_bad_smiles_exit_3(tmp_path, capsys):
    inp = tmp_path / "mols.smi"
    inp.write_text("CC(c1ccccc1\n")
    code, _, err = run(["fragment", "--input", str(inp)], capsys)
    assert code == 3
    payload = json.loads(err.strip().splitlines()[-1])
    assert payload["error"]["type"] == "SmilesSyntaxError"


def test_stats_command(capsys, tmp_path):
    out_path = tmp_path / "stats.json"
    code, out, err = run(["stats", "--pairs", str(FIXTURES / "overfit_pairs.csv"),
                          "--out", str(out_path)], capsys)
    assert code == 0
    report = json.loads(out_path.read_text())
    assert report["n_samples"] == 20
    assert "mean_tanimoto_distance" in report
    assert "molecules" in err  # human table on stderr


def test_train_eval_predict_flow(tmp_path, capsys):
    ckpt = tmp_path / "model.ckpt"
    code, out, _ = run([
        "train", "--pairs", str(FIXTURES / "overfit_pairs.csv"),
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
        "--checkpoint", str(ckpt), "--seed", "3", *TINY,
    ], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["seed"] == 3
    assert ckpt.exists() and Path(str(ckpt) + ".config.json").exists()
    assert "val" in report and "test" in report

    code, out, _ = run([
        "eval", "--checkpoint", str(ckpt),
        "--pairs", str(FIXTURES / "overfit_pairs.csv"),
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
        "--split", "train",
    ], capsys)
    assert code == 0
    evaluation = json.loads(out)
    assert evaluation["split"] == "train"
    assert "report" in evaluation

    code, out, _ = run([
        "predict", "--checkpoint", str(ckpt),
        "--donor", "CCc1ccccc1", "--acceptor", "N#Cc1ccccc1",
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
    ], capsys)
    assert code == 0
    pred = json.loads(out)
    assert "pce_percent" in pred
    assert pred["missing_embeddings"] == []


def test_eval_hash_mismatch(tmp_path, capsys):
    ckpt = tmp_path / "model.ckpt"
    run([
        "train", "--pairs", str(FIXTURES / "overfit_pairs.csv"),
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
        "--checkpoint", str(ckpt), *TINY,
    ], capsys)
    tampered = tmp_path / "tampered.jsonl"
    original = (FIXTURES / "overfit_store.jsonl").read_text()
    tampered.write_text(original.replace("synthetic description", "edited text"))
    code, _, err = run([
        "eval", "--checkpoint", str(ckpt),
        "--pairs", str(FIXTURES / "overfit_pairs.csv"),
        "--embedding-store", str(tampered),
    ], capsys)
    assert code == 3
    assert json.loads(err)["error"]["type"] == "HashMismatchError"


def test_predict_invalid_smiles_exit_3(tmp_path, capsys):
    ckpt = tmp_path / "model.ckpt"
    run([
        "train", "--pairs", str(FIXTURES / "overfit_pairs.csv"),
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
        "--checkpoint", str(ckpt), *TINY,
    ], capsys)
    code, _, err = run([
        "predict", "--checkpoint", str(ckpt), "--donor", "C1CC",
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
    ], capsys)
    assert code == 3
    payload = json.loads(err)
    assert payload["error"]["type"] == "SmilesSyntaxError"
    assert "position" in payload["error"]["message"] or "ring" in payload["error"]["message"]


def test_predict_lenient_reports_missing(tmp_path, capsys):
    ckpt = tmp_path / "model.ckpt"
    run([
        "train", "--pairs", str(FIXTURES / "overfit_pairs.csv"),
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
        "--checkpoint", str(ckpt), *TINY,
    ], capsys)
    # a donor whose fragments are not in the store; lenient is the default
    code, out, err = run([
        "predict", "--checkpoint", str(ckpt),
        "--donor", "CCCCCCCCc1cc[se]c1", "--acceptor", "N#Cc1ccccc1",
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
    ], capsys)
    assert code == 0
    pred = json.loads(out)
    assert len(pred["missing_embeddings"]) >= 1
    # strict mode instead refuses and names the fragment
    code, _, err = run([
        "predict", "--checkpoint", str(ckpt),
        "--donor", "CCCCCCCCc1cc[se]c1", "--acceptor", "N#Cc1ccccc1",
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
        "--strict-embeddings",
    ], capsys)
    assert code == 3
    payload = json.loads(err)
    assert payload["error"]["type"] == "MissingEmbeddingError"
    assert "*" in payload["error"]["message"] or "c1" in payload["error"]["message"]


def test_train_missing_store_fragment_strict(tmp_path, capsys):
    # train on molecules not covered by the store in strict mode
    pairs = tmp_path / "pairs.csv"
    pairs.write_text("donor_smiles,acceptor_smiles,pce\n"
                     "CCCCCCCCc1cc[se]c1,N#Cc1ccccc1,5.0\n" * 1)
    code, _, err = run([
        "train", "--pairs", str(pairs),
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
        "--checkpoint", str(tmp_path / "m.ckpt"), *TINY,
    ], capsys)
    assert code == 3
    payload = json.loads(err)
    assert payload["error"]["type"] == "MissingEmbeddingError"


def test_config_error_exit_2(capsys):
    code, _, err = run([
        "train", "--pairs", str(FIXTURES / "overfit_pairs.csv"),
        "--fusion", "attention",
    ], capsys)  # no --embedding-store
    assert code == 2
    assert json.loads(err)["error"]["type"] == "ConfigError"


def test_config_file_and_set_overrides(tmp_path, capsys):
    cfgus = tmp_path / "cfg.json"
    cfgus_payload = {
        "model": {"fusion_mode": "none",
                  "fragment_gnn": {"hidden_dim": 8, "n_heads": 2},
                  "molecule_gnn": {"hidden_dim": 8, "n_heads": 2},
                  "head_hidden": 8},
        "train": {"max_steps": 10},
    }
    cfgus.write_text(json.dumps(cfgus_payload))
    ckpt = tmp_path / "m.ckpt"
    code, out, _ = run([
        "train", "--pairs", str(FIXTURES / "overfit_pairs.csv"),
        "--config", str(cfgus), "--checkpoint", str(ckpt),
        "--set", "train.max_steps=5",
    ], capsys)
    assert code == 0
    sidecar = json.loads(Path(str(ckpt) + ".config.json").read_text())
    assert sidecar["model"]["fusion_mode"] == "none"
    assert sidecar["train"]["max_steps"] == 5
    assert json.loads(out)["steps_run"] == 5


def test_classification_task_flow(tmp_path, capsys):
    ckpt = tmp_path / "clf.ckpt"
    code, out, _ = run([
        "train", "--tasks", str(FIXTURES / "clf_molecules.csv"),
        "--embedding-store", str(FIXTURES / "clf_store.jsonl"),
        "--checkpoint", str(ckpt), "--seed", "1", *TINY,
    ], capsys)
    assert code == 0
    report = json.loads(out)
    assert "test" in report
    code, out, _ = run([
        "predict", "--checkpoint", str(ckpt), "--donor", "CCCCc1ccccc1",
        "--embedding-store", str(FIXTURES / "clf_store.jsonl"),
    ], capsys)
    assert code == 0
    pred = json.loads(out)
    assert "probabilities" in pred
    assert all(0.0 <= p <= 1.0 for p in pred["probabilities"])


def test_eval_retrain_seeds_aggregate(tmp_path, capsys):
    ckpt = tmp_path / "model.ckpt"
    run([
        "train", "--pairs", str(FIXTURES / "overfit_pairs.csv"),
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
        "--checkpoint", str(ckpt), *TINY,
    ], capsys)
    code, out, _ = run([
        "eval", "--checkpoint", str(ckpt),
        "--pairs", str(FIXTURES / "overfit_pairs.csv"),
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
        "--retrain", "--seeds", "1", "--split", "val",
    ], capsys)
    assert code == 0
    result = json.loads(out)
    assert len(result["seeds"]) == 1
    agg = result["aggregate"]
    for name, entry in agg.items():
        # single seed: CI degenerates to the point value
        assert entry["ci95"][0] == pytest.approx(entry["mean"])
        assert entry["ci95"][1] == pytest.approx(entry["mean"])


def test_eval_overfit_model_train_r2_and_predict(tmp_path, capsys):
    """An overfit model scores R^2 > 0.99 when evaluated on its training
    data, and predicting a training pair lands within 0.5 of the target."""
    ckpt = tmp_path / "model.ckpt"
    code, out, _ = run([
        "train", "--pairs", str(FIXTURES / "overfit_pairs.csv"),
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
        "--checkpoint", str(ckpt), "--seed", "7",
        "--set", "split.ratios=[100,0,0]",
        "--set", "model.fragment_gnn.hidden_dim=32",
        "--set", "model.fragment_gnn.n_heads=2",
        "--set", "model.molecule_gnn.hidden_dim=32",
        "--set", "model.molecule_gnn.n_heads=2",
        "--set", "model.d_k=8",
        "--set", "model.fragment_gnn.dropout=0",
        "--set", "model.molecule_gnn.dropout=0",
        "--set", "train.lr=0.003", "--set", "train.max_steps=1200",
    ], capsys)
    assert code == 0
    code, out, _ = run([
        "eval", "--checkpoint", str(ckpt),
        "--pairs", str(FIXTURES / "overfit_pairs.csv"),
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
        "--split", "train",
    ], capsys)
    assert code == 0
    evaluation = json.loads(out)
    assert evaluation["report"]["metrics"]["r2"] > 0.99

    import csv
    with open(FIXTURES / "overfit_pairs.csv", newline="") as handle:
        row = next(csv.DictReader(handle))
    code, out, _ = run([
        "predict", "--checkpoint", str(ckpt),
        "--donor", row["donor_smiles"], "--acceptor", row["acceptor_smiles"],
        "--embedding-store", str(FIXTURES / "overfit_store.jsonl"),
    ], capsys)
    assert code == 0
    pred = json.loads(out)
    assert abs(pred["pce_percent"] - float(row["pce"])) < 0.5


def test_outputs_are_json(capsys, tmp_path):
    inp = tmp_path / "m.smi"
    inp.write_text("CCc1ccccc1\n")
    code, out, _ = run(["fragment", "--input", str(inp)], capsys)
    for line in out.strip().splitlines():
        json.loads(line)  # every stdout line is valid JSON
