"""molfuse command line: fragment, stats, train, eval, predict.

Every command prints machine-readable JSON on stdout; human-readable tables
go to stderr. Errors come out as JSON on stderr with exit codes 2 (config),
3 (data), 4 (numeric failure).
"""

from __future__ import annotations

import os

# Pin BLAS to one thread before numpy loads, for reproducible runs.
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .autodiff import AutodiffError, load_params, save_params, set_default_dtype
from .autodiff.checkpoint import CheckpointError
from .chem.mol import ChemError
from .data.datasets import (
    DataError,
    TaskDataset,
    load_pairs,
    load_tasks,
    split as split_dataset,
)
from .data.embstore import EmbeddingStoreError, read_embedding_store
from .data.metrics import MetricsError, classification_report, regression_report
from .data.stats import dataset_stats, stats_table
from .chem.smiles import parse_smiles
from .frag.decompose import decompose
from .fusion import FusionError
from .gnn.batch import GnnError
from .model.features import UnknownElementError
from .model.predictor import MissingEmbeddingError, ModelConfig, ModelError, Predictor
from .model.train import (
    TrainConfig,
    evaluate_loss,
    predict_scores,
    prepare_data,
    train_model,
)


class ConfigError(Exception):
    pass


class HashMismatchError(DataError):
    pass


EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_CONFIG_ERRORS = (ConfigError, ModelError, GnnError, ValueError)
_DATA_ERRORS = (DataError, ChemError, EmbeddingStoreError, CheckpointError,
                FusionError, MissingEmbeddingError, UnknownElementError,
                FileNotFoundError, MetricsError)
_NUMERIC_ERRORS = (AutodiffError, FloatingPointError)


def default_config() -> dict:
    return {
        "seed": 0,
        "strict_embeddings": True,
        "split": {"ratios": [80, 10, 10], "seed": None},
        "train": {"lr": 1e-3, "max_steps": 2000, "patience": 30,
                  "precision": "f64"},
        "model": ModelConfig().to_dict(),
    }


def _apply_set(config: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ConfigError(f"--set expects key=value, got {assignment!r}")
    key, _, raw = assignment.partition("=")
    try:
        value = json.loads(raw)
    except ValueError:
        value = raw
    node = config
    parts = key.split(".")
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            node[part] = {}
        node = node[part]
    node[parts[-1]] = value


def build_config(args) -> dict:
    config = default_config()
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        except ValueError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
        _deep_update(config, loaded)
    for assignment in getattr(args, "set", None) or []:
        _apply_set(config, assignment)
    if getattr(args, "seed", None) is not None:
        config["seed"] = args.seed
    if getattr(args, "fusion", None):
        config["model"]["fusion_mode"] = args.fusion
    if getattr(args, "text_sections", None):
        config["model"]["text_sections"] = [
            s.strip() for s in args.text_sections.split(",") if s.strip()
        ]
    if getattr(args, "pair_mode", None):
        config["model"]["pair_mode"] = args.pair_mode
    if getattr(args, "strict_embeddings", None) is not None:
        config["strict_embeddings"] = args.strict_embeddings
    return config


def _deep_update(base: dict, extra: dict) -> None:
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value


def _load_dataset(args) -> tuple[TaskDataset, str, str]:
    if getattr(args, "pairs", None):
        return load_pairs(args.pairs), "pairs", args.pairs
    if getattr(args, "tasks", None):
        return load_tasks(args.tasks), "tasks", args.tasks
    raise ConfigError("one of --pairs or --tasks is required")


def _emit(obj, out_path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out_path:
        Path(out_path).write_text(text + "\n")
    else:
        print(text)


def _split_report(model, prep, dataset, idx, seed) -> dict:
    if len(idx) == 0:
        return {"error": "empty split"}
    scores = predict_scores(model, prep)[idx]
    try:
        if model.cfg.head == "classification":
            labels = np.stack([dataset.samples[i].labels for i in idx])
            report = classification_report(labels, scores,
                                           task_names=dataset.task_names, seed=seed)
        else:
            y = np.array([dataset.samples[i].pce for i in idx])
            report = regression_report(y, scores.reshape(-1), seed=seed)
    except MetricsError as exc:
        return {"error": str(exc)}
    return report.to_dict()


# --- commands ---

def cmd_fragment(args) -> int:
    if args.input and args.input != "-":
        lines = Path(args.input).read_text().splitlines()
    else:
        lines = sys.stdin.read().splitlines()
    for line in lines:
        smiles = line.strip()
        if not smiles or smiles.startswith("#"):
            continue
        fg = decompose(parse_smiles(smiles, strict=args.strict))
        record = {
            "smiles": smiles,
            "fragments": [
                {"key": f.fragment_key, "smiles": f.fragment_key,
                 "contains_ring": f.contains_ring}
                for f in fg.fragments
            ],
            "edges": [[e.frag_a, e.frag_b] for e in fg.edges],
        }
        print(json.dumps(record, sort_keys=True))
    return 0


def cmd_stats(args) -> int:
    dataset, _, _ = _load_dataset(args)
    report = dataset_stats(dataset)
    print(stats_table(report), file=sys.stderr)
    _emit(report, args.out)
    return 0


def _load_store_if_needed(config, args):
    if config["model"]["fusion_mode"] == "none":
        return None
    store_path = getattr(args, "embedding_store", None)
    if not store_path:
        raise ConfigError("--embedding-store is required unless fusion is 'none'")
    return read_embedding_store(store_path)


def cmd_train(args) -> int:
    config = build_config(args)
    dataset, kind, dataset_path = _load_dataset(args)
    split_seed = config["split"]["seed"]
    split_seed = config["seed"] if split_seed is None else split_seed
    dataset = split_dataset(dataset, tuple(config["split"]["ratios"]), seed=split_seed)
    store = _load_store_if_needed(config, args)
    if kind == "tasks":
        config["model"]["head"] = "classification"
        config["model"]["n_tasks"] = dataset.n_tasks
        if config["model"]["pair_mode"] == "pair":
            config["model"]["pair_mode"] = "donor_only"
    model_cfg = ModelConfig.from_dict(config["model"])
    train_opts = dict(config["train"])
    set_default_dtype(train_opts.pop("precision", "f64"))
    d_text = store.d_text if store is not None else 0
    model = Predictor(model_cfg, d_text=d_text or 0, seed=config["seed"])
    prep = prepare_data(model, dataset, store, strict=config["strict_embeddings"])
    tcfg = TrainConfig(seed=config["seed"], **train_opts)
    result = train_model(model, prep, tcfg,
                         log=lambda msg: print(msg, file=sys.stderr))
    if not np.isfinite(result.final_train_loss):
        raise AutodiffError("training diverged: non-finite final loss")

    checkpoint = args.checkpoint or "model.ckpt"
    save_params(model.params, checkpoint)
    sidecar = {
        "model": model_cfg.to_dict(),
        "d_text": model.d_text,
        "store_hash": store.content_hash if store is not None else None,
        "seed": config["seed"],
        "train": config["train"],
        "split": {"ratios": config["split"]["ratios"], "seed": split_seed},
        "dataset_kind": kind,
        "dataset_path": str(dataset_path),
        "strict_embeddings": config["strict_embeddings"],
    }
    Path(checkpoint + ".config.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n"
    )
    out = {
        "seed": config["seed"],
        "checkpoint": str(checkpoint),
        "steps_run": result.steps_run,
        "best_step": result.best_step,
        "train_loss": result.final_train_loss,
        "val": _split_report(model, prep, dataset, prep.val_idx, config["seed"]),
        "test": _split_report(model, prep, dataset, prep.test_idx, config["seed"]),
    }
    _emit(out, args.out)
    return 0


def _load_checkpoint(args):
    sidecar_path = args.checkpoint + ".config.json"
    try:
        sidecar = json.loads(Path(sidecar_path).read_text())
    except OSError as exc:
        raise CheckpointError(f"cannot read sidecar {sidecar_path}: {exc}") from exc
    model_cfg = ModelConfig.from_dict(sidecar["model"])
    model = Predictor(model_cfg, d_text=sidecar["d_text"], seed=sidecar["seed"])
    model.params = load_params(args.checkpoint)
    return model, sidecar


def cmd_eval(args) -> int:
    model, sidecar = _load_checkpoint(args)
    dataset, kind, _ = _load_dataset(args)
    ratios = tuple(sidecar["split"]["ratios"])
    dataset = split_dataset(dataset, ratios, seed=sidecar["split"]["seed"])
    store = None
    if model.cfg.fusion_mode != "none":
        if not args.embedding_store:
            raise ConfigError("--embedding-store is required unless fusion is 'none'")
        store = read_embedding_store(args.embedding_store)
        if sidecar.get("store_hash") and store.content_hash != sidecar["store_hash"]:
            raise HashMismatchError(
                "embedding store changed since training "
                f"({store.content_hash[:12]} != {sidecar['store_hash'][:12]})"
            )
    strict = sidecar.get("strict_embeddings", True)
    prep = prepare_data(model, dataset, store, strict=strict)
    idx = dataset.indices(args.split)
    base_seed = sidecar["seed"] if args.seed is None else args.seed

    if args.retrain:
        train_opts = dict(sidecar["train"])
        set_default_dtype(train_opts.pop("precision", "f64"))
        per_seed = []
        for k in range(args.seeds):
            seed_k = base_seed + k
            model_k = Predictor(model.cfg, d_text=model.d_text, seed=seed_k)
            prep_k = prepare_data(model_k, dataset, store, strict=strict)
            tcfg = TrainConfig(seed=seed_k, **train_opts)
            train_model(model_k, prep_k, tcfg)
            per_seed.append({
                "seed": seed_k,
                "report": _split_report(model_k, prep_k, dataset, idx, seed_k),
            })
        out = {"split": args.split, "retrain": True, "seeds": per_seed,
               "aggregate": _aggregate_seed_reports(per_seed)}
    elif args.seeds > 1:
        per_seed = [
            {"seed": base_seed + k,
             "report": _split_report(model, prep, dataset, idx, base_seed + k)}
            for k in range(args.seeds)
        ]
        out = {"split": args.split, "retrain": False, "seeds": per_seed,
               "aggregate": _aggregate_seed_reports(per_seed)}
    else:
        out = {"split": args.split, "seed": base_seed,
               "report": _split_report(model, prep, dataset, idx, base_seed),
               "loss": evaluate_loss(model, prep, idx) if len(idx) else None}
    _emit(out, args.out)
    return 0


def _aggregate_seed_reports(per_seed: list) -> dict:
    metric_values: dict[str, list[float]] = {}
    for entry in per_seed:
        metrics = entry["report"].get("metrics", {})
        for name, value in metrics.items():
            metric_values.setdefault(name, []).append(value)
    out = {}
    for name, values in metric_values.items():
        arr = np.array(values)
        out[name] = {
            "mean": float(arr.mean()),
            "ci95": [float(np.percentile(arr, 2.5)), float(np.percentile(arr, 97.5))],
            "n_seeds": len(values),
        }
    return out


def cmd_predict(args) -> int:
    model, sidecar = _load_checkpoint(args)
    store = None
    if model.cfg.fusion_mode != "none":
        if not args.embedding_store:
            raise ConfigError("--embedding-store is required unless fusion is 'none'")
        store = read_embedding_store(args.embedding_store)
    strict = bool(args.strict_embeddings)
    pred = model.predict_pair(args.donor, args.acceptor or args.donor, store,
                              strict=strict)
    out = {
        "seed": sidecar["seed"],
        "fragments_used": pred.fragments_used,
        "missing_embeddings": pred.missing_embeddings,
    }
    if model.cfg.head == "classification":
        out["probabilities"] = pred.value
    else:
        out["pce_percent"] = pred.value
    _emit(out, args.out)
    return 0


# --- argument parsing ---

def _add_common(sub, with_store=True):
    sub.add_argument("--config", help="JSON config file")
    sub.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a config entry (dotted path)")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--fusion", choices=["average", "attention", "none"])
    sub.add_argument("--text-sections", dest="text_sections",
                     help="comma list: structural,physical,chemical,photovoltaic")
    sub.add_argument("--pair-mode", dest="pair_mode",
                     choices=["pair", "donor_only", "acceptor_only"])
    sub.add_argument("--strict-embeddings", dest="strict_embeddings",
                     action=argparse.BooleanOptionalAction, default=None)
    sub.add_argument("--out", help="write the JSON report here instead of stdout")
    if with_store:
        sub.add_argument("--embedding-store", dest="embedding_store")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="molfuse",
        description="Fragment-level multimodal property prediction for OPV pairs",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("fragment", help="decompose SMILES into functional modules")
    p.add_argument("--input", default="-", help="SMILES file, '-' for stdin")
    p.add_argument("--strict", action="store_true",
                   help="reject stereo markers instead of stripping")
    p.set_defaults(fn=cmd_fragment)

    p = subs.add_parser("stats", help="dataset statistics report")
    p.add_argument("--pairs", help="donor/acceptor pair CSV")
    p.add_argument("--tasks", help="single-molecule task CSV")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_stats)

    p = subs.add_parser("train", help="train a model")
    p.add_argument("--pairs")
    p.add_argument("--tasks")
    p.add_argument("--checkpoint", default="model.ckpt")
    _add_common(p)
    p.set_defaults(fn=cmd_train)

    p = subs.add_parser("eval", help="evaluate a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--pairs")
    p.add_argument("--tasks")
    p.add_argument("--split", default="test", choices=["train", "val", "test"])
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--retrain", action="store_true",
                   help="retrain once per seed and aggregate")
    _add_common(p)
    p.set_defaults(fn=cmd_eval)

    p = subs.add_parser("predict", help="predict for one donor/acceptor pair")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--donor", required=True)
    p.add_argument("--acceptor")
    _add_common(p)
    p.set_defaults(fn=cmd_predict)
    return parser


def _error_json(exc: Exception) -> str:
    return json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}})


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _NUMERIC_ERRORS as exc:
        print(_error_json(exc), file=sys.stderr)
        return EXIT_NUMERIC
    except _DATA_ERRORS as exc:
        print(_error_json(exc), file=sys.stderr)
        return EXIT_DATA
    except _CONFIG_ERRORS as exc:
        print(_error_json(exc), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
