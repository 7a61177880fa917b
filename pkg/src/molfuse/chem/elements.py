"""Element tables for the supported 10-element organic-photovoltaic chemistry."""

from __future__ import annotations

# Elements observed in the OPV corpus; everything else is rejected at parse time.
SUPPORTED_ELEMENTS = frozenset({"C", "H", "O", "N", "S", "Si", "Se", "Cl", "Br", "F"})

# Elements that may be written bare (organic subset); Si and Se always need brackets.
ORGANIC_SUBSET = frozenset({"C", "N", "O", "S", "Cl", "Br", "F"})

# Elements that may carry the aromatic (lowercase) flag.
AROMATIC_CAPABLE = frozenset({"C", "N", "O", "S", "Se", "Si"})

# Allowed total valences per element (bond-order sum + implicit hydrogens).
VALENCES: dict[str, tuple[int, ...]] = {
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "S": (2, 4, 6),
    "Si": (4,),
    "Se": (2, 4, 6),
    "Cl": (1,),
    "Br": (1,),
    "F": (1,),
    "H": (1,),
}

# Pauling electronegativities.
ELECTRONEGATIVITY: dict[str, float] = {
    "H": 2.20,
    "C": 2.55,
    "N": 3.04,
    "O": 3.44,
    "F": 3.98,
    "Si": 1.90,
    "S": 2.58,
    "Cl": 3.16,
    "Se": 2.55,
    "Br": 2.96,
}

ATOMIC_NUMBER: dict[str, int] = {
    "H": 1,
    "C": 6,
    "N": 7,
    "O": 8,
    "F": 9,
    "Si": 14,
    "S": 16,
    "Cl": 17,
    "Se": 34,
    "Br": 35,
}

ATOMIC_MASS: dict[str, float] = {
    "H": 1.008,
    "C": 12.011,
    "N": 14.007,
    "O": 15.999,
    "F": 18.998,
    "Si": 28.086,
    "S": 32.06,
    "Cl": 35.45,
    "Se": 78.971,
    "Br": 79.904,
}


def allowed_valences(element: str, charge: int = 0) -> tuple[int, ...]:
    """Valences an atom may carry, adjusted for formal charge.

    Cationic N/O/S/Se gain a bond per positive charge, anions lose one;
    charged carbon loses a bond either way (carbanion and carbenium are
    both trivalent). Halogens and H only ever bond once.
    """
    base = VALENCES[element]
    if charge == 0:
        return base
    if element == "C":
        shift = -abs(charge)
    elif element in ("N", "O", "S", "Se"):
        shift = charge
    else:
        return base
    return tuple(v + shift for v in base if v + shift >= 0) or (0,)
