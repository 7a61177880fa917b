"""Dataset schemas, CSV loaders, deterministic splits."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..chem.mol import ChemError
from ..chem.smiles import parse_smiles


class DataError(Exception):
    pass


class SchemaError(DataError):
    pass


class RowError(DataError):
    pass


class EmptyDatasetError(DataError):
    pass


PAIR_COLUMNS = ("donor_smiles", "acceptor_smiles", "pce", "voc", "jsc", "ff", "source")
PAIR_REQUIRED = ("donor_smiles", "acceptor_smiles", "pce")

TRAIN, VAL, TEST = 0, 1, 2
SPLIT_NAMES = {"train": TRAIN, "val": VAL, "test": TEST}


@dataclass
class PairSample:
    donor_smiles: str
    acceptor_smiles: str
    pce: float
    voc: float | None = None
    jsc: float | None = None
    ff: float | None = None
    source: str | None = None


@dataclass
class MoleculeSample:
    smiles: str
    labels: np.ndarray  # [n_tasks], NaN = missing


@dataclass
class TaskDataset:
    samples: list
    task_kind: str  # "regression" | "classification"
    n_tasks: int = 1
    task_names: tuple[str, ...] = ()
    split: np.ndarray | None = None  # 0/1/2 per sample, None before split()

    def __len__(self) -> int:
        return len(self.samples)

    def indices(self, split_name: str) -> np.ndarray:
        if self.split is None:
            raise DataError("dataset has not been split")
        return np.flatnonzero(self.split == SPLIT_NAMES[split_name])

    def is_pairs(self) -> bool:
        return self.task_kind == "regression" and bool(self.samples) \
            and isinstance(self.samples[0], PairSample)


def _parse_float(text: str, line_no: int, column: str, required: bool) -> float | None:
    text = text.strip()
    if not text:
        if required:
            raise RowError(f"line {line_no}: empty {column}")
        return None
    try:
        value = float(text)
    except ValueError as exc:
        raise RowError(f"line {line_no}: bad {column} {text!r}") from exc
    if not math.isfinite(value):
        raise RowError(f"line {line_no}: non-finite {column} {text!r}")
    return value


def _check_smiles(text: str, line_no: int, column: str) -> str:
    text = text.strip()
    if not text:
        raise RowError(f"line {line_no}: empty {column}")
    try:
        parse_smiles(text)
    except ChemError as exc:
        raise RowError(f"line {line_no}: bad {column}: {exc}") from exc
    return text


def load_pairs(path) -> TaskDataset:
    """Donor/acceptor pair CSV with PCE target; row order preserved."""
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        missing = [c for c in PAIR_REQUIRED if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {missing}")
        unknown = [c for c in header if c not in PAIR_COLUMNS]
        if unknown:
            raise SchemaError(f"{path}: unknown column(s) {unknown}")
        col = {name: header.index(name) for name in header}
        samples = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise RowError(f"line {line_no}: expected {len(header)} cells, got {len(row)}")

            def cell(name):
                return row[col[name]] if name in col else ""

            samples.append(PairSample(
                donor_smiles=_check_smiles(cell("donor_smiles"), line_no, "donor_smiles"),
                acceptor_smiles=_check_smiles(cell("acceptor_smiles"), line_no,
                                              "acceptor_smiles"),
                pce=_parse_float(cell("pce"), line_no, "pce", required=True),
                voc=_parse_float(cell("voc"), line_no, "voc", required=False),
                jsc=_parse_float(cell("jsc"), line_no, "jsc", required=False),
                ff=_parse_float(cell("ff"), line_no, "ff", required=False),
                source=cell("source").strip() or None,
            ))
    return TaskDataset(samples=samples, task_kind="regression", n_tasks=1)


def load_tasks(path) -> TaskDataset:
    """MoleculeNet-style CSV: smiles,label_1..label_n; empty cell = missing."""
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if not header or header[0] != "smiles":
            raise SchemaError(f"{path}: first column must be 'smiles'")
        task_names = tuple(header[1:])
        if not task_names:
            raise SchemaError(f"{path}: no label columns")
        samples = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise RowError(f"line {line_no}: expected {len(header)} cells, got {len(row)}")
            smiles = _check_smiles(row[0], line_no, "smiles")
            labels = np.full(len(task_names), np.nan)
            for ti, cell in enumerate(row[1:]):
                cell = cell.strip()
                if not cell:
                    continue
                value = _parse_float(cell, line_no, header[1 + ti], required=True)
                if value not in (0.0, 1.0):
                    raise RowError(
                        f"line {line_no}: label {header[1 + ti]} must be 0/1, got {cell!r}"
                    )
                labels[ti] = value
            samples.append(MoleculeSample(smiles=smiles, labels=labels))
    return TaskDataset(samples=samples, task_kind="classification",
                       n_tasks=len(task_names), task_names=task_names)


def split(dataset: TaskDataset, ratios: tuple[int, int, int] = (80, 10, 10),
          seed: int = 0) -> TaskDataset:
    """Seeded shuffle split; val/test sizes floored, remainder to train."""
    if sum(ratios) != 100:
        raise DataError(f"split ratios must sum to 100, got {ratios}")
    n = len(dataset)
    if n == 0:
        raise EmptyDatasetError("cannot split an empty dataset")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_val = n * ratios[1] // 100
    n_test = n * ratios[2] // 100
    n_train = n - n_val - n_test
    assignment = np.empty(n, dtype=np.int64)
    assignment[perm[:n_train]] = TRAIN
    assignment[perm[n_train:n_train + n_val]] = VAL
    assignment[perm[n_train + n_val:]] = TEST
    return TaskDataset(samples=dataset.samples, task_kind=dataset.task_kind,
                       n_tasks=dataset.n_tasks, task_names=dataset.task_names,
                       split=assignment)
