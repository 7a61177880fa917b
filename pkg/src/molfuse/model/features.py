"""Atom-level feature vectors for the fragment GNN."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..chem.elements import ATOMIC_MASS, ATOMIC_NUMBER, ELECTRONEGATIVITY
from ..chem.mol import DOUBLE, TRIPLE, MolecularGraph

FEATURE_NAMES = (
    "atomic_number",
    "mass",
    "electronegativity",
    "hybridization",
    "degree",
    "formal_charge",
    "implicit_explicit_valence",
    "is_aromatic",
)

_HYBRID_WIDTH = 3  # sp / sp2 / sp3
_DEGREE_WIDTH = 7  # 0..6, clamped


class UnknownElementError(Exception):
    pass


@dataclass
class AtomFeatureConfig:
    """Enabled atom features plus the frozen standardization constants."""

    features: tuple[str, ...] = ("electronegativity",)
    en_mean: float = 2.6
    en_std: float = 0.5
    z_mean: float = 16.0
    z_std: float = 11.0
    mass_mean: float = 32.0
    mass_std: float = 26.0
    implicit_h_mean: float = 1.0
    implicit_h_std: float = 1.0
    explicit_valence_mean: float = 3.0
    explicit_valence_std: float = 1.5

    def __post_init__(self):
        if isinstance(self.features, list):
            self.features = tuple(self.features)
        if not self.features:
            raise ValueError("at least one atom feature must be enabled")
        unknown = set(self.features) - set(FEATURE_NAMES)
        if unknown:
            raise ValueError(f"unknown atom feature(s): {sorted(unknown)}")

    @property
    def width(self) -> int:
        total = 0
        for name in self.features:
            if name == "hybridization":
                total += _HYBRID_WIDTH
            elif name == "degree":
                total += _DEGREE_WIDTH
            elif name == "implicit_explicit_valence":
                total += 2
            else:
                total += 1
        return total

    def to_dict(self) -> dict:
        return asdict(self)


def _hybridization(mol: MolecularGraph, idx: int) -> int:
    """0 = sp, 1 = sp2, 2 = sp3 (coarse heuristic from bond orders)."""
    atom = mol.atoms[idx]
    orders = [mol.bonds[bi].order for _, bi in mol.neighbors(idx)]
    if TRIPLE in orders or orders.count(DOUBLE) >= 2:
        return 0
    if atom.aromatic or DOUBLE in orders:
        return 1
    return 2


def featurize_atoms(mol: MolecularGraph, cfg: AtomFeatureConfig) -> np.ndarray:
    """One feature row per atom; categorical features one-hot, numeric
    standardized by the frozen constants in cfg."""
    rows = np.zeros((mol.n_atoms, cfg.width))
    for atom in mol.atoms:
        if atom.element not in ELECTRONEGATIVITY:
            raise UnknownElementError(f"no feature tables for element {atom.element!r}")
        col = 0
        for name in cfg.features:
            if name == "atomic_number":
                rows[atom.index, col] = (ATOMIC_NUMBER[atom.element] - cfg.z_mean) / cfg.z_std
                col += 1
            elif name == "mass":
                rows[atom.index, col] = (ATOMIC_MASS[atom.element] - cfg.mass_mean) / cfg.mass_std
                col += 1
            elif name == "electronegativity":
                rows[atom.index, col] = (
                    ELECTRONEGATIVITY[atom.element] - cfg.en_mean
                ) / cfg.en_std
                col += 1
            elif name == "hybridization":
                rows[atom.index, col + _hybridization(mol, atom.index)] = 1.0
                col += _HYBRID_WIDTH
            elif name == "degree":
                rows[atom.index, col + min(mol.degree(atom.index), _DEGREE_WIDTH - 1)] = 1.0
                col += _DEGREE_WIDTH
            elif name == "formal_charge":
                rows[atom.index, col] = float(atom.formal_charge)
                col += 1
            elif name == "implicit_explicit_valence":
                rows[atom.index, col] = (
                    atom.implicit_h - cfg.implicit_h_mean
                ) / cfg.implicit_h_std
                rows[atom.index, col + 1] = (
                    mol.explicit_valence(atom.index) - cfg.explicit_valence_mean
                ) / cfg.explicit_valence_std
                col += 2
            elif name == "is_aromatic":
                rows[atom.index, col] = float(atom.aromatic)
                col += 1
    return rows


def adjacency_and_orders(mol: MolecularGraph) -> tuple[np.ndarray, np.ndarray]:
    """Dense 0/1 adjacency (no self loops) and integer bond-order matrix."""
    n = mol.n_atoms
    adj = np.zeros((n, n))
    orders = np.zeros((n, n), dtype=np.int64)
    for bond in mol.bonds:
        adj[bond.a, bond.b] = adj[bond.b, bond.a] = 1.0
        orders[bond.a, bond.b] = orders[bond.b, bond.a] = bond.order
    return adj, orders
