"""Functional-module decomposition and the molecule-level fragment graph."""

from .decompose import (
    Fragment,
    FragmentEdge,
    FragmentGraph,
    InconsistentAttachmentError,
    canonical_key,
    cut_bond_indices,
    decompose,
    reassemble,
)

__all__ = [
    "Fragment",
    "FragmentEdge",
    "FragmentGraph",
    "InconsistentAttachmentError",
    "canonical_key",
    "cut_bond_indices",
    "decompose",
    "reassemble",
]
