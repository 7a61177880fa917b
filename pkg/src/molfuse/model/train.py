"""Full-batch training with Adam and validation-loss early stopping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..autodiff import Adam, backward
from ..autodiff.tensor import no_grad
from ..chem.smiles import parse_smiles
from ..data.datasets import MoleculeSample, TaskDataset
from ..data.embstore import EmbeddingStore
from .predictor import CompiledMolecules, ModelError, Predictor, loss as task_loss


@dataclass
class TrainConfig:
    lr: float = 1e-3
    max_steps: int = 2000
    patience: int = 30  # early-stop patience in steps; 0 disables
    seed: int = 0


@dataclass
class PreparedData:
    comp: CompiledMolecules
    donor_ids: np.ndarray
    acceptor_ids: np.ndarray | None
    targets: np.ndarray  # [B, n_out]
    label_mask: np.ndarray | None
    train_idx: np.ndarray
    val_idx: np.ndarray
    test_idx: np.ndarray


@dataclass
class TrainResult:
    steps_run: int
    best_step: int
    history: list = field(default_factory=list)  # (step, train_loss, val_loss|None)
    final_train_loss: float = float("nan")
    best_val_loss: float = float("nan")


def prepare_data(model: Predictor, dataset: TaskDataset,
                 store: EmbeddingStore | None, strict: bool = True) -> PreparedData:
    if len(dataset) == 0:
        raise ModelError("empty dataset")
    single = isinstance(dataset.samples[0], MoleculeSample)
    if single:
        graphs = [parse_smiles(s.smiles) for s in dataset.samples]
        if model.cfg.pair_mode == "pair":
            raise ModelError("pair_mode='pair' needs donor/acceptor samples; "
                             "use donor_only for single-molecule datasets")
        comp = model.compile(graphs, store, strict=strict)
        donor_ids = comp.mol_ids
        acceptor_ids = None
        targets = np.stack([s.labels for s in dataset.samples])
        label_mask = ~np.isnan(targets)
        targets = np.where(label_mask, targets, 0.0)
    else:
        graphs = []
        for s in dataset.samples:
            graphs.append(parse_smiles(s.donor_smiles))
            graphs.append(parse_smiles(s.acceptor_smiles))
        comp = model.compile(graphs, store, strict=strict)
        donor_ids = comp.mol_ids[0::2]
        acceptor_ids = comp.mol_ids[1::2]
        targets = np.array([[s.pce] for s in dataset.samples])
        label_mask = None
    if dataset.split is None:
        train_idx = np.arange(len(dataset))
        val_idx = np.zeros(0, dtype=np.intp)
        test_idx = np.zeros(0, dtype=np.intp)
    else:
        train_idx = dataset.indices("train")
        val_idx = dataset.indices("val")
        test_idx = dataset.indices("test")
    return PreparedData(
        comp=comp, donor_ids=donor_ids, acceptor_ids=acceptor_ids,
        targets=targets, label_mask=label_mask,
        train_idx=train_idx, val_idx=val_idx, test_idx=test_idx,
    )


def _subset_loss(model: Predictor, logits, prep: PreparedData, idx: np.ndarray):
    from ..autodiff import ops
    picked = ops.gather_rows(logits, idx)
    target = prep.targets[idx]
    if model.cfg.head == "classification":
        mask = prep.label_mask[idx] if prep.label_mask is not None else None
        return ops.bce_with_logits(picked, target, mask)
    return task_loss(picked, target, "regression")


def evaluate_loss(model: Predictor, prep: PreparedData, idx: np.ndarray) -> float:
    with no_grad():
        logits = model.forward(prep.comp, prep.donor_ids, prep.acceptor_ids)
        return float(_subset_loss(model, logits, prep, idx).data)


def predict_scores(model: Predictor, prep: PreparedData) -> np.ndarray:
    """Head output in task units: raw PCE, or per-task probabilities."""
    with no_grad():
        logits = model.forward(prep.comp, prep.donor_ids, prep.acceptor_ids).data
    if model.cfg.head == "classification":
        return 1.0 / (1.0 + np.exp(-logits))
    return logits


def train_model(model: Predictor, prep: PreparedData, tcfg: TrainConfig,
                log=None) -> TrainResult:
    if len(prep.train_idx) == 0:
        raise ModelError("no training samples")
    rng = np.random.default_rng(tcfg.seed)
    opt = Adam(model.params, lr=tcfg.lr)
    use_val = len(prep.val_idx) > 0 and tcfg.patience > 0
    best_val = float("inf")
    best_step = 0
    best_params: dict[str, np.ndarray] | None = None
    bad = 0
    result = TrainResult(steps_run=0, best_step=0)

    for step in range(1, tcfg.max_steps + 1):
        logits = model.forward(prep.comp, prep.donor_ids, prep.acceptor_ids,
                               training=True, rng=rng)
        train_loss = _subset_loss(model, logits, prep, prep.train_idx)
        opt.zero_grad()
        backward(train_loss)
        opt.step()
        result.steps_run = step

        val_loss = None
        if use_val:
            val_loss = evaluate_loss(model, prep, prep.val_idx)
            if val_loss < best_val:
                best_val = val_loss
                best_step = step
                best_params = {k: p.data.copy() for k, p in model.params.items()}
                bad = 0
            else:
                bad += 1
        result.history.append((step, float(train_loss.data), val_loss))
        if log and (step % 100 == 0 or step == 1):
            log(f"step {step}: train {float(train_loss.data):.6f}"
                + (f" val {val_loss:.6f}" if val_loss is not None else ""))
        if use_val and bad > tcfg.patience:
            break

    if best_params is not None:
        for name, data in best_params.items():
            model.params[name].data = data
        result.best_step = best_step
        result.best_val_loss = best_val
    else:
        result.best_step = result.steps_run
    result.final_train_loss = evaluate_loss(model, prep, prep.train_idx)
    return result
