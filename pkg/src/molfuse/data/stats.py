"""Dataset diagnostics: counts, fragment vocabulary, Tanimoto diversity."""

from __future__ import annotations

import numpy as np

from ..chem.canon import to_smiles
from ..chem.fingerprint import mean_pairwise_tanimoto, path_fingerprint
from ..chem.smiles import parse_smiles
from ..frag.decompose import decompose
from .datasets import PairSample, TaskDataset


def _group_stats(smiles_set: set[str]) -> dict:
    graphs = [parse_smiles(s) for s in sorted(smiles_set)]
    fps = [path_fingerprint(g) for g in graphs]
    frag_keys: set[str] = set()
    for g in graphs:
        frag_keys.update(f.fragment_key for f in decompose(g).fragments)
    return {
        "n_molecules": len(graphs),
        "n_fragment_keys": len(frag_keys),
        "mean_tanimoto_distance": round(mean_pairwise_tanimoto(fps), 6),
        "_frag_keys": frag_keys,
    }


def dataset_stats(dataset: TaskDataset) -> dict:
    """Counts of samples/molecules/fragments, diversity, and target range."""
    report: dict = {"n_samples": len(dataset)}
    if dataset.samples and isinstance(dataset.samples[0], PairSample):
        donors = {to_smiles(parse_smiles(s.donor_smiles)) for s in dataset.samples}
        acceptors = {to_smiles(parse_smiles(s.acceptor_smiles)) for s in dataset.samples}
        groups = {
            "all": _group_stats(donors | acceptors),
            "donor": _group_stats(donors),
            "acceptor": _group_stats(acceptors),
        }
        for name, g in groups.items():
            g.pop("_frag_keys")
        report["molecules"] = {k: v["n_molecules"] for k, v in groups.items()}
        report["fragment_keys"] = {k: v["n_fragment_keys"] for k, v in groups.items()}
        report["mean_tanimoto_distance"] = {
            k: v["mean_tanimoto_distance"] for k, v in groups.items()
        }
        pce = np.array([s.pce for s in dataset.samples])
        report["pce_range"] = [float(pce.min()), float(pce.max())]
    else:
        molecules = {to_smiles(parse_smiles(s.smiles)) for s in dataset.samples}
        g = _group_stats(molecules)
        g.pop("_frag_keys")
        report["molecules"] = {"all": g["n_molecules"]}
        report["fragment_keys"] = {"all": g["n_fragment_keys"]}
        report["mean_tanimoto_distance"] = {"all": g["mean_tanimoto_distance"]}
        labels = np.stack([s.labels for s in dataset.samples])
        report["label_counts"] = {
            name: {
                "positive": int(np.nansum(labels[:, ti] == 1)),
                "negative": int(np.nansum(labels[:, ti] == 0)),
                "missing": int(np.isnan(labels[:, ti]).sum()),
            }
            for ti, name in enumerate(
                dataset.task_names or [f"task_{i}" for i in range(dataset.n_tasks)]
            )
        }
    return report


def stats_table(report: dict) -> str:
    """Aligned human-readable rendering of a dataset_stats report."""
    lines = [f"samples: {report['n_samples']}"]
    groups = list(report["molecules"].keys())
    header = f"{'':<24}" + "".join(f"{g:>12}" for g in groups)
    lines.append(header)
    for label, key in (
        ("molecules", "molecules"),
        ("fragment keys", "fragment_keys"),
        ("mean Tanimoto dist", "mean_tanimoto_distance"),
    ):
        row = f"{label:<24}" + "".join(f"{report[key][g]:>12}" for g in groups)
        lines.append(row)
    if "pce_range" in report:
        lo, hi = report["pce_range"]
        lines.append(f"{'PCE range':<24}[{lo}, {hi}]")
    if "label_counts" in report:
        for name, counts in report["label_counts"].items():
            lines.append(
                f"{name:<24}+{counts['positive']} -{counts['negative']} "
                f"missing {counts['missing']}"
            )
    return "\n".join(lines)
