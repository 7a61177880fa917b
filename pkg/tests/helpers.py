"""Shared test utilities: isomorphism oracle, finite-difference gradients."""

import networkx as nx
import numpy as np

from molfuse.chem import MolecularGraph


def finite_difference_check(make_loss, leaves, h=1e-6, rel_tol=1e-4,
                            max_entries=None, rng=None):
    """Central finite differences vs reverse-mode gradients.

    make_loss() rebuilds the scalar loss from the current leaf data each
    call; leaves is a dict name -> Tensor. Checks every entry, or a random
    subset of max_entries per leaf.
    """
    from molfuse.autodiff import backward

    for leaf in leaves.values():
        leaf.grad = None
    loss = make_loss()
    backward(loss)
    for name, leaf in leaves.items():
        assert leaf.grad is not None, f"no gradient reached {name}"
        flat = leaf.data.reshape(-1)
        grad = leaf.grad.reshape(-1)
        n = flat.shape[0]
        entries = range(n)
        if max_entries is not None and n > max_entries:
            picker = rng if rng is not None else np.random.default_rng(0)
            entries = picker.choice(n, size=max_entries, replace=False)
        for k in entries:
            orig = flat[k]
            flat[k] = orig + h
            f_plus = float(make_loss().data)
            flat[k] = orig - h
            f_minus = float(make_loss().data)
            flat[k] = orig
            fd = (f_plus - f_minus) / (2.0 * h)
            # central differences bottom out near 1e-10 absolute (f ~ O(1),
            # h = 1e-6), so tiny gradients are compared absolutely
            if abs(fd - grad[k]) < 1e-7:
                continue
            scale = max(abs(fd), abs(grad[k]))
            assert abs(fd - grad[k]) / scale < rel_tol, (
                f"{name}[{k}]: fd={fd!r} vs grad={grad[k]!r}"
            )


def as_networkx(mol: MolecularGraph) -> nx.Graph:
    g = nx.Graph()
    for atom in mol.atoms:
        g.add_node(atom.index, element=atom.element, aromatic=atom.aromatic,
                   charge=atom.formal_charge, h=atom.implicit_h,
                   attachment=atom.attachment)
    for bond in mol.bonds:
        g.add_edge(bond.a, bond.b, order=bond.order)
    return g


def isomorphic(a: MolecularGraph, b: MolecularGraph) -> bool:
    return nx.is_isomorphic(
        as_networkx(a), as_networkx(b),
        node_match=lambda x, y: all(
            x[k] == y[k]
            for k in ("element", "aromatic", "charge", "h", "attachment")
        ),
        edge_match=lambda x, y: x["order"] == y["order"],
    )
