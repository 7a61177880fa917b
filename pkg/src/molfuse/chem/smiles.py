"""SMILES reader for the supported grammar subset.

Covered: organic-subset atoms, bracket atoms (charge, explicit H), aromatic
lowercase, bond orders ``- = # :``, branches, ring closures ``1``-``9`` and
``%nn``, and bare ``*`` attachment markers (collapsed onto their neighbor
atom). Stereo markers are stripped with a warning in lenient mode and
rejected in strict mode. Dot-separated components, isotopes and atom classes
are rejected.
"""

from __future__ import annotations

import warnings

from .elements import AROMATIC_CAPABLE, SUPPORTED_ELEMENTS
from .mol import (
    AROMATIC,
    DOUBLE,
    SINGLE,
    TRIPLE,
    Atom,
    Bond,
    MolecularGraph,
    SmilesSyntaxError,
    UnsupportedFeatureError,
    implicit_hydrogens,
    perceive_rings,
    check_valence,
)

_BOND_CHARS = {"-": SINGLE, "=": DOUBLE, "#": TRIPLE, ":": AROMATIC}
_STEREO_CHARS = {"/", "\\"}
_TWO_LETTER = ("Cl", "Br", "Si", "Se")


class _RawAtom:
    __slots__ = ("element", "aromatic", "charge", "h_count", "bracket", "wildcard", "pos")

    def __init__(self, element, aromatic, charge, h_count, bracket, wildcard, pos):
        self.element = element
        self.aromatic = aromatic
        self.charge = charge
        self.h_count = h_count  # None unless set in a bracket
        self.bracket = bracket
        self.wildcard = wildcard
        self.pos = pos


def parse_smiles(smiles: str, strict: bool = False) -> MolecularGraph:
    """Parse a single-component SMILES string into a MolecularGraph."""
    if not smiles or not smiles.strip():
        raise SmilesSyntaxError("empty SMILES string")
    smiles = smiles.strip()

    atoms: list[_RawAtom] = []
    bonds: list[tuple[int, int, int | None, int]] = []  # (a, b, order|None, pos)
    stack: list[tuple[int, int]] = []  # (prev atom, atom count at '(')
    ring_open: dict[str, tuple[int, int | None, int]] = {}
    prev = -1
    pending: int | None = None
    pending_pos = -1
    i = 0
    n = len(smiles)

    def add_atom(raw: _RawAtom) -> None:
        nonlocal prev, pending
        atoms.append(raw)
        idx = len(atoms) - 1
        if prev >= 0:
            bonds.append((prev, idx, pending, raw.pos))
        elif pending is not None:
            raise SmilesSyntaxError(f"bond with no preceding atom at position {pending_pos}")
        pending = None
        prev = idx

    def close_or_open_ring(label: str, pos: int) -> None:
        nonlocal pending
        if prev < 0:
            raise SmilesSyntaxError(f"ring closure before any atom at position {pos}")
        if label in ring_open:
            other, other_order, other_pos = ring_open.pop(label)
            if other == prev:
                raise SmilesSyntaxError(f"ring bond to the same atom at position {pos}")
            order = pending if pending is not None else other_order
            if pending is not None and other_order is not None and pending != other_order:
                raise SmilesSyntaxError(
                    f"conflicting ring-closure bond orders at position {pos}"
                )
            bonds.append((other, prev, order, pos))
        else:
            ring_open[label] = (prev, pending, pos)
        pending = None

    while i < n:
        ch = smiles[i]
        if ch == ".":
            raise UnsupportedFeatureError(
                f"multi-component SMILES ('.') not supported, position {i}"
            )
        if ch in _STEREO_CHARS:
            if strict:
                raise UnsupportedFeatureError(f"stereo bond marker {ch!r} at position {i}")
            warnings.warn(f"stripping stereo marker {ch!r} in {smiles!r}", stacklevel=2)
            i += 1
            continue
        if ch in _BOND_CHARS:
            if pending is not None:
                raise SmilesSyntaxError(f"two bond symbols in a row at position {i}")
            pending = _BOND_CHARS[ch]
            pending_pos = i
            i += 1
            continue
        if ch == "(":
            if prev < 0:
                raise SmilesSyntaxError(f"branch before any atom at position {i}")
            if pending is not None:
                raise SmilesSyntaxError(f"bond symbol before '(' at position {i}")
            stack.append((prev, len(atoms)))
            i += 1
            continue
        if ch == ")":
            if not stack:
                raise SmilesSyntaxError(f"unmatched ')' at position {i}")
            if pending is not None:
                raise SmilesSyntaxError(f"dangling bond before ')' at position {i}")
            opener, count_at_open = stack.pop()
            if len(atoms) == count_at_open:
                raise SmilesSyntaxError(f"empty branch closing at position {i}")
            prev = opener
            i += 1
            continue
        if ch.isdigit():
            close_or_open_ring(ch, i)
            i += 1
            continue
        if ch == "%":
            if i + 2 >= n or not smiles[i + 1 : i + 3].isdigit():
                raise SmilesSyntaxError(f"'%' needs two digits at position {i}")
            close_or_open_ring(smiles[i + 1 : i + 3], i)
            i += 3
            continue
        if ch == "[":
            raw, i = _parse_bracket(smiles, i, strict)
            add_atom(raw)
            continue
        if ch == "*":
            add_atom(_RawAtom("*", False, 0, None, False, True, i))
            i += 1
            continue
        raw, i = _parse_bare_atom(smiles, i)
        add_atom(raw)

    if stack:
        raise SmilesSyntaxError(f"unmatched '(' ({len(stack)} open) in {smiles!r}")
    if ring_open:
        labels = ", ".join(sorted(ring_open))
        raise SmilesSyntaxError(f"unclosed ring closure(s) {labels} in {smiles!r}")
    if pending is not None:
        raise SmilesSyntaxError(f"dangling bond at end of {smiles!r}")
    if not atoms:
        raise SmilesSyntaxError(f"no atoms in {smiles!r}")

    return _finalize(smiles, atoms, bonds)


def _parse_bare_atom(smiles: str, i: int) -> tuple[_RawAtom, int]:
    for sym in ("Cl", "Br"):
        if smiles.startswith(sym, i):
            return _RawAtom(sym, False, 0, None, False, False, i), i + len(sym)
    ch = smiles[i]
    if ch in ("C", "N", "O", "S", "F"):
        return _RawAtom(ch, False, 0, None, False, False, i), i + 1
    if ch in ("c", "n", "o", "s"):
        return _RawAtom(ch.upper(), True, 0, None, False, False, i), i + 1
    if ch.upper() in SUPPORTED_ELEMENTS or ch in ("B", "P", "I", "b", "p"):
        raise UnsupportedFeatureError(
            f"element {ch!r} needs brackets or is unsupported, position {i}"
        )
    raise SmilesSyntaxError(f"unexpected character {ch!r} at position {i}")


def _parse_bracket(smiles: str, start: int, strict: bool) -> tuple[_RawAtom, int]:
    end = smiles.find("]", start)
    if end < 0:
        raise SmilesSyntaxError(f"unterminated bracket atom at position {start}")
    body = smiles[start + 1 : end]
    pos = start + 1
    i = 0

    if i < len(body) and body[i].isdigit():
        raise UnsupportedFeatureError(f"isotope labels not supported, position {pos}")

    # element symbol: uppercase + optional lowercase, lowercase aromatic
    # (c/n/o/s/se/si), or the '*' attachment marker
    element = None
    aromatic = False
    if body.startswith("*"):
        element, i = "*", 1
    elif i < len(body) and body[i].isalpha():
        sym = body[i]
        if i + 1 < len(body) and body[i + 1].isalpha() and body[i + 1].islower():
            sym = body[i : i + 2]
        if sym.islower():
            aromatic = True
            sym = sym.capitalize()
        if sym not in SUPPORTED_ELEMENTS:
            raise UnsupportedFeatureError(
                f"element {sym!r} not supported, position {pos}"
            )
        if aromatic and sym not in AROMATIC_CAPABLE:
            raise UnsupportedFeatureError(
                f"aromatic {sym!r} not supported, position {pos}"
            )
        element, i = sym, i + len(sym)
    if element is None:
        raise SmilesSyntaxError(f"bad bracket atom {body!r} at position {start}")

    h_count = 0
    charge = 0
    while i < len(body):
        ch = body[i]
        if ch == "@":
            if strict:
                raise UnsupportedFeatureError(f"chirality marker in {body!r}, position {pos}")
            warnings.warn(f"stripping chirality marker in [{body}]", stacklevel=3)
            i += 1
            while i < len(body) and body[i] == "@":
                i += 1
            continue
        if ch == "H":
            i += 1
            digits = ""
            while i < len(body) and body[i].isdigit():
                digits += body[i]
                i += 1
            h_count = int(digits) if digits else 1
            continue
        if ch in ("+", "-"):
            sign = 1 if ch == "+" else -1
            i += 1
            if i < len(body) and body[i] == ch:  # ++ / --
                charge = 2 * sign
                i += 1
            elif i < len(body) and body[i].isdigit():
                digits = ""
                while i < len(body) and body[i].isdigit():
                    digits += body[i]
                    i += 1
                charge = sign * int(digits)
            else:
                charge = sign
            continue
        if ch == ":":
            raise UnsupportedFeatureError(f"atom class in {body!r} not supported, position {pos}")
        raise SmilesSyntaxError(f"unexpected {ch!r} in bracket atom {body!r}")

    if element == "*" and (h_count or charge):
        raise UnsupportedFeatureError("attachment marker '*' cannot carry H or charge")
    return _RawAtom(element, aromatic, charge, h_count, True, element == "*", start), end + 1


def _finalize(smiles: str, raw_atoms: list[_RawAtom],
              raw_bonds: list[tuple[int, int, int | None, int]]) -> MolecularGraph:
    # Collapse '*' markers into attachment counts on their single neighbor.
    attach: dict[int, int] = {}
    keep: list[int] = []
    for idx, raw in enumerate(raw_atoms):
        if not raw.wildcard:
            keep.append(idx)
    wild = {idx for idx, raw in enumerate(raw_atoms) if raw.wildcard}
    kept_bonds: list[tuple[int, int, int | None, int]] = []
    wild_degree = {idx: 0 for idx in wild}
    for a, b, order, pos in raw_bonds:
        if a in wild and b in wild:
            raise SmilesSyntaxError(f"bond between two '*' markers at position {pos}")
        if a in wild or b in wild:
            marker, real = (a, b) if a in wild else (b, a)
            wild_degree[marker] += 1
            if order not in (None, SINGLE):
                raise UnsupportedFeatureError(
                    f"attachment marker bonds must be single, position {pos}"
                )
            attach[real] = attach.get(real, 0) + 1
        else:
            kept_bonds.append((a, b, order, pos))
    for idx, deg in wild_degree.items():
        if deg != 1:
            raise SmilesSyntaxError(
                f"attachment marker at position {raw_atoms[idx].pos} must have exactly one bond"
            )
    if not keep:
        raise SmilesSyntaxError(f"no real atoms in {smiles!r}")

    remap = {old: new for new, old in enumerate(keep)}
    n_atoms = len(keep)

    # Resolve bond orders: unspecified bonds between two aromatic atoms are
    # aromatic, everything else single. ':' requires aromatic endpoints.
    bonds: list[Bond] = []
    seen_pairs: set[tuple[int, int]] = set()
    for a, b, order, pos in kept_bonds:
        ra, rb = raw_atoms[a], raw_atoms[b]
        if order is None:
            order = AROMATIC if (ra.aromatic and rb.aromatic) else SINGLE
        elif order == AROMATIC and not (ra.aromatic and rb.aromatic):
            raise UnsupportedFeatureError(
                f"':' bond between non-aromatic atoms at position {pos}"
            )
        na, nb = remap[a], remap[b]
        pair = (na, nb) if na < nb else (nb, na)
        if pair in seen_pairs:
            raise SmilesSyntaxError(f"duplicate bond between atoms at position {pos}")
        seen_pairs.add(pair)
        bonds.append(Bond(na, nb, order))

    rings, ring_bond_idx = perceive_rings(n_atoms, bonds)

    # Aromatic bonds outside rings (e.g. biphenyl's inter-ring bond written
    # in lowercase context) are really single bonds.
    for bi, bond in enumerate(bonds):
        in_ring = bi in ring_bond_idx
        order = bond.order
        if order == AROMATIC and not in_ring:
            order = SINGLE
        bonds[bi] = Bond(bond.a, bond.b, order, in_ring)

    arom_count = [0] * n_atoms
    for bond in bonds:
        if bond.order == AROMATIC:
            arom_count[bond.a] += 1
            arom_count[bond.b] += 1
    for old_idx in keep:
        raw = raw_atoms[old_idx]
        if raw.aromatic and arom_count[remap[old_idx]] < 2:
            raise SmilesSyntaxError(
                f"aromatic atom at position {raw.pos} is not in an aromatic ring"
            )

    atoms: list[Atom] = []
    order_by_atom: list[list[int]] = [[] for _ in range(n_atoms)]
    for bond in bonds:
        order_by_atom[bond.a].append(bond.order)
        order_by_atom[bond.b].append(bond.order)
    for old_idx in keep:
        raw = raw_atoms[old_idx]
        new_idx = remap[old_idx]
        n_attach = attach.get(old_idx, 0)
        if raw.bracket:
            h = raw.h_count or 0
        else:
            h = implicit_hydrogens(
                raw.element, raw.charge, raw.aromatic, order_by_atom[new_idx], n_attach
            )
        atoms.append(
            Atom(
                element=raw.element,
                aromatic=raw.aromatic,
                formal_charge=raw.charge,
                implicit_h=h,
                index=new_idx,
                attachment=n_attach,
            )
        )

    graph = MolecularGraph(atoms=atoms, bonds=bonds, rings=rings, source_smiles=smiles)
    check_valence(graph)
    return graph
