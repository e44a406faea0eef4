"""The 24-element single-qubit Clifford group as axis-angle rotations.

Composition and inversion are resolved numerically against the table with a
phase-invariant distance, so there is no hand-written multiplication table to
get wrong.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import GateSpec, gate_unitary, phase_invariant_distance

MATCH_TOL = 1e-9

_S2 = 1 / np.sqrt(2)
_S3 = 1 / np.sqrt(3)

# (index, name, rotation class, axis)
_ROWS = [
    (0, "I", "identity", (1, 0, 0)),
    (1, "X", "pi", (1, 0, 0)),
    (2, "Y", "pi", (0, 1, 0)),
    (3, "Z", "pi", (0, 0, 1)),
    (4, "C4", "2pi/3", (_S3, _S3, -_S3)),
    (5, "C5", "2pi/3", (_S3, -_S3, _S3)),
    (6, "C6", "2pi/3", (-_S3, _S3, _S3)),
    (7, "C7", "2pi/3", (-_S3, -_S3, -_S3)),
    (8, "C8", "2pi/3", (_S3, _S3, _S3)),
    (9, "C9", "2pi/3", (-_S3, _S3, -_S3)),
    (10, "C10", "2pi/3", (_S3, -_S3, -_S3)),
    (11, "C11", "2pi/3", (-_S3, -_S3, _S3)),
    (12, "X/2", "pi/2", (1, 0, 0)),
    (13, "-X/2", "pi/2", (-1, 0, 0)),
    (14, "Y/2", "pi/2", (0, 1, 0)),
    (15, "-Y/2", "pi/2", (0, -1, 0)),
    (16, "Z/2", "pi/2", (0, 0, 1)),
    (17, "-Z/2", "pi/2", (0, 0, -1)),
    (18, "C18", "pi", (_S2, 0, -_S2)),
    (19, "H", "pi", (_S2, 0, _S2)),
    (20, "C20", "pi", (0, _S2, _S2)),
    (21, "C21", "pi", (0, _S2, -_S2)),
    (22, "C22", "pi", (_S2, _S2, 0)),
    (23, "C23", "pi", (_S2, -_S2, 0)),
]

ROTATION_ANGLES = {
    "identity": 0.0,
    "pi": np.pi,
    "pi/2": np.pi / 2,
    "2pi/3": 2 * np.pi / 3,
}

NUM_CLIFFORDS = len(_ROWS)
IDENTITY = 0
NAMES = {name: idx for idx, name, _, _ in _ROWS}


class CliffordTableError(RuntimeError):
    """Raised when a product fails to resolve to a table entry."""


@dataclass(frozen=True)
class CliffordEntry:
    index: int
    name: str
    rotation_class: str
    axis: tuple
    unitary: np.ndarray

    @property
    def spec(self) -> GateSpec:
        return GateSpec(ROTATION_ANGLES[self.rotation_class], self.axis, self.index, self.name)


def _check_index(index: int) -> int:
    index = int(index)
    if not 0 <= index < NUM_CLIFFORDS:
        raise IndexError(f"Clifford index {index} out of range 0..{NUM_CLIFFORDS - 1}")
    return index


@lru_cache(maxsize=None)
def table() -> tuple:
    """All 24 entries, ordered by index."""
    entries = []
    for idx, name, cls, axis in _ROWS:
        spec = GateSpec(ROTATION_ANGLES[cls], axis, idx, name)
        entries.append(CliffordEntry(idx, name, cls, spec.axis, gate_unitary(spec)))
    return tuple(entries)


def clifford_lookup(index: int) -> GateSpec:
    """Gate spec of table entry ``index``; ``C0`` is the zero-angle identity."""
    return table()[_check_index(index)].spec


def clifford_unitary(index: int) -> np.ndarray:
    return table()[_check_index(index)].unitary


def find_clifford(u2, tol: float = MATCH_TOL) -> int:
    """Index of the table entry equal to ``u2`` up to global phase."""
    for entry in table():
        if phase_invariant_distance(entry.unitary, u2) < tol:
            return entry.index
    raise CliffordTableError("unitary does not match any Clifford entry")


@lru_cache(maxsize=None)
def _products() -> np.ndarray:
    prod = np.empty((NUM_CLIFFORDS, NUM_CLIFFORDS), dtype=int)
    for a in table():
        for b in table():
            prod[a.index, b.index] = find_clifford(a.unitary @ b.unitary)
    return prod


@lru_cache(maxsize=None)
def _inverses() -> np.ndarray:
    prod = _products()
    inv = np.empty(NUM_CLIFFORDS, dtype=int)
    for i in range(NUM_CLIFFORDS):
        (hits,) = np.nonzero(prod[i] == IDENTITY)
        if len(hits) != 1:
            raise CliffordTableError(f"entry {i} has {len(hits)} inverses")
        inv[i] = hits[0]
    return inv


def clifford_compose(i: int, j: int) -> int:
    """Index ``k`` with ``U_k ~ U_i U_j`` (``j`` acts first)."""
    return int(_products()[_check_index(i), _check_index(j)])


def clifford_inverse(i: int) -> int:
    return int(_inverses()[_check_index(i)])


def table_as_json() -> list:
    """JSON-ready table. Unitary entries are row-major ``[re, im]`` pairs in the (|0>, |1>) basis."""
    out = []
    for e in table():
        out.append({
            "index": e.index,
            "name": e.name,
            "rotation_class": e.rotation_class,
            "axis": [float(x) for x in e.axis],
            "unitary": [[float(z.real), float(z.imag)] for z in e.unitary.ravel()],
        })
    return out


def unitaries_from_json(data) -> list:
    if isinstance(data, str):
        data = json.loads(data)
    return [np.array([complex(re, im) for re, im in row["unitary"]]).reshape(2, 2) for row in data]
