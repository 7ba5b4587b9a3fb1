"""Built-in basic tuples, stored in their intransitive traversal order."""

from __future__ import annotations

from .generation import BasicTuple, validate_basic
from .preference import trybula_triplet
from .quantile import make_dice

# Efron dice; each beats the next in A, B, C, D, A, so the precedence cycle
# runs A < D < C < B < A.
EFRON = {
    "A": (0, 0, 4, 4, 4, 4),
    "B": (3, 3, 3, 3, 3, 3),
    "C": (2, 2, 2, 2, 6, 6),
    "D": (1, 1, 1, 5, 5, 5),
}
EFRON_ORDER = ("A", "D", "C", "B")

# rows of the Lo Shu square, sorted
LO_SHU = {"A": (2, 4, 9), "B": (3, 5, 7), "C": (1, 6, 8)}

SIMPLEST = {"A": (1, 1, 4), "B": (2, 2, 2), "C": (0, 3, 3)}


def _from_faces(name: str, table: dict, order) -> BasicTuple:
    return validate_basic([make_dice(table[k]) for k in order], name=name, labels=order)


def efron() -> BasicTuple:
    return _from_faces("ed", EFRON, EFRON_ORDER)


def lo_shu() -> BasicTuple:
    return _from_faces("cid", LO_SHU, ("A", "B", "C"))


def simplest() -> BasicTuple:
    return _from_faces("sid", SIMPLEST, ("A", "B", "C"))


def trybula(p) -> BasicTuple:
    """Exact triplet for rational ``p``; raises if it is not intransitive."""
    return validate_basic(trybula_triplet(p), name=None, labels=("X", "Y", "Z"))


PRESETS = {"ed": efron, "cid": lo_shu, "sid": simplest}


def get_preset(name: str) -> BasicTuple:
    try:
        return PRESETS[name.lower()]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)} or trybula") from None
