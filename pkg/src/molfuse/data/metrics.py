"""Regression/classification metrics with percentile-bootstrap CIs."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class MetricsError(Exception):
    pass


class LengthMismatchError(MetricsError):
    pass


class ConstantTargetsError(MetricsError):
    pass


class SingleClassError(MetricsError):
    pass


def metrics_regression(y, y_hat) -> dict[str, float]:
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    y_hat = np.asarray(y_hat, dtype=np.float64).reshape(-1)
    if y.shape != y_hat.shape or y.size == 0:
        raise LengthMismatchError(f"lengths differ or empty: {y.shape} vs {y_hat.shape}")
    residual = y - y_hat
    ss_res = float((residual ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        raise ConstantTargetsError("targets are constant; R^2 undefined")
    return {
        "mse": float((residual ** 2).mean()),
        "mae": float(np.abs(residual).mean()),
        "r2": 1.0 - ss_res / ss_tot,
    }


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing the average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def metrics_auc(labels, scores) -> float:
    """Rank-based ROC-AUC (Mann-Whitney); ties count one half."""
    labels = np.asarray(labels, dtype=np.float64).reshape(-1)
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    if labels.shape != scores.shape or labels.size == 0:
        raise LengthMismatchError(f"lengths differ or empty: {labels.shape} vs {scores.shape}")
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos + n_neg != labels.size:
        raise MetricsError("labels must be 0/1")
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("need both classes for ROC-AUC")
    ranks = _average_ranks(scores)
    u = ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass
class MetricsReport:
    kind: str  # "regression" | "classification"
    n_samples: int
    metrics: dict[str, float]
    ci95: dict[str, tuple[float, float]] = field(default_factory=dict)
    per_task: dict[str, float] = field(default_factory=dict)
    bootstrap: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "n_samples": self.n_samples,
            "metrics": self.metrics,
            "ci95": {k: list(v) for k, v in self.ci95.items()},
        }
        if self.per_task:
            out["per_task"] = self.per_task
        if self.bootstrap:
            out["bootstrap"] = self.bootstrap
        return out


def _bootstrap(metric_fns: dict, n: int, seed: int, n_resamples: int):
    rng = np.random.default_rng(seed)
    values: dict[str, list[float]] = {name: [] for name in metric_fns}
    skipped = 0
    for _ in range(n_resamples):
        idx = rng.integers(0, n, size=n)
        try:
            row = {name: fn(idx) for name, fn in metric_fns.items()}
        except MetricsError:
            skipped += 1  # e.g. constant targets or one class in the resample
            continue
        for name, value in row.items():
            values[name].append(value)
    ci = {
        name: (float(np.percentile(v, 2.5)), float(np.percentile(v, 97.5)))
        for name, v in values.items() if v
    }
    return ci, skipped


def regression_report(y, y_hat, seed: int = 0, n_resamples: int = 1000) -> MetricsReport:
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    y_hat = np.asarray(y_hat, dtype=np.float64).reshape(-1)
    point = metrics_regression(y, y_hat)
    fns = {
        name: (lambda idx, _n=name: metrics_regression(y[idx], y_hat[idx])[_n])
        for name in ("mse", "mae", "r2")
    }
    ci, skipped = _bootstrap(fns, len(y), seed, n_resamples)
    return MetricsReport(
        kind="regression", n_samples=len(y), metrics=point, ci95=ci,
        bootstrap={"method": "percentile", "n_resamples": n_resamples,
                   "seed": seed, "skipped_degenerate": skipped},
    )


def classification_report(labels, scores, task_names=None, seed: int = 0,
                          n_resamples: int = 1000) -> MetricsReport:
    """Per-task ROC-AUC plus their mean; NaN labels are missing."""
    labels = np.atleast_2d(np.asarray(labels, dtype=np.float64))
    scores = np.atleast_2d(np.asarray(scores, dtype=np.float64))
    if labels.shape != scores.shape:
        raise LengthMismatchError(f"labels {labels.shape} vs scores {scores.shape}")
    n, n_tasks = labels.shape
    names = list(task_names) if task_names else [f"task_{i}" for i in range(n_tasks)]
    per_task = {}
    for ti in range(n_tasks):
        present = ~np.isnan(labels[:, ti])
        per_task[names[ti]] = metrics_auc(labels[present, ti], scores[present, ti])
    mean_auc = float(np.mean(list(per_task.values())))

    def mean_auc_at(idx):
        vals = []
        for ti in range(n_tasks):
            lab = labels[idx, ti]
            sc = scores[idx, ti]
            present = ~np.isnan(lab)
            vals.append(metrics_auc(lab[present], sc[present]))
        return float(np.mean(vals))

    ci, skipped = _bootstrap({"roc_auc_mean": mean_auc_at}, n, seed, n_resamples)
    return MetricsReport(
        kind="classification", n_samples=n,
        metrics={"roc_auc_mean": mean_auc}, ci95=ci, per_task=per_task,
        bootstrap={"method": "percentile", "n_resamples": n_resamples,
                   "seed": seed, "skipped_degenerate": skipped},
    )
