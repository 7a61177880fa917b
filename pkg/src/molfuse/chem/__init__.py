"""SMILES parsing, molecular graphs, fingerprints."""

from .mol import (
    AROMATIC,
    DOUBLE,
    SINGLE,
    TRIPLE,
    Atom,
    Bond,
    ChemError,
    LengthMismatchError,
    MolecularGraph,
    SmilesSyntaxError,
    UnsupportedFeatureError,
    ValenceError,
    connected_components,
    perceive_rings,
)
from .canon import canonical_ranks, to_smiles
from .fingerprint import (
    Fingerprint,
    kernel_name,
    mean_pairwise_tanimoto,
    path_fingerprint,
    tanimoto_distance,
)
from .smiles import parse_smiles

__all__ = [
    "AROMATIC",
    "DOUBLE",
    "SINGLE",
    "TRIPLE",
    "Atom",
    "Bond",
    "ChemError",
    "Fingerprint",
    "LengthMismatchError",
    "MolecularGraph",
    "SmilesSyntaxError",
    "UnsupportedFeatureError",
    "ValenceError",
    "canonical_ranks",
    "connected_components",
    "kernel_name",
    "mean_pairwise_tanimoto",
    "parse_smiles",
    "path_fingerprint",
    "perceive_rings",
    "tanimoto_distance",
    "to_smiles",
]
