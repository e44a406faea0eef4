"""Qutrit value types and operator algebra.

Every 3-dimensional array in this package is ordered ``(|0>, |e>, |1>)``: the
qubit lives on levels 0 and 2 of the ladder and ``|e>`` (index 1) is the
auxiliary level that is only populated transiently during a gate.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import expm

ATOL = 1e-12

# Ladder indices.
G, E, ONE = 0, 1, 2
BASIS_LABELS = ("0", "e", "1")

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
ID2 = np.eye(2, dtype=complex)
ID3 = np.eye(3, dtype=complex)


def ket(level: int) -> np.ndarray:
    v = np.zeros(3, dtype=complex)
    v[level] = 1.0
    return v


def projector(level: int) -> np.ndarray:
    return np.outer(ket(level), ket(level).conj())


def transition(i: int, j: int) -> np.ndarray:
    """``|i><j|`` on the qutrit."""
    op = np.zeros((3, 3), dtype=complex)
    op[i, j] = 1.0
    return op


@dataclass(frozen=True)
class QutritState:
    """Normalized pure state over ``(|0>, |e>, |1>)``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(3)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("zero vector is not a state")
        object.__setattr__(self, "amplitudes", amps / norm)

    @classmethod
    def basis(cls, level: int) -> "QutritState":
        return cls(ket(level))

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def overlap(self, other: "QutritState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def is_hermitian(a: np.ndarray, atol: float = ATOL) -> bool:
    return np.allclose(a, a.conj().T, atol=atol, rtol=0)


def is_unitary(u: np.ndarray, atol: float = ATOL) -> bool:
    u = np.asarray(u)
    return np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol, rtol=0)


def hermitian(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape != (3, 3) or not is_hermitian(a):
        raise ValueError("expected a 3x3 Hermitian matrix")
    return a


def unitary(u) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or not is_unitary(u):
        raise ValueError("expected a square unitary matrix")
    return u


def check_density_matrix(rho, atol: float = 1e-9) -> np.ndarray:
    """Validate a 3x3 density matrix and return it as a complex array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (3, 3):
        raise ValueError(f"density matrix must be 3x3, got {rho.shape}")
    if not is_hermitian(rho, atol):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise ValueError("density matrix does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -atol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def embed_qubit(u2: np.ndarray, aux_phase: complex = 1.0) -> np.ndarray:
    """Place a 2x2 operator on levels (0, 1) of the qutrit; ``|e>`` gets ``aux_phase``."""
    u = np.zeros((3, 3), dtype=complex)
    idx = [G, ONE]
    u[np.ix_(idx, idx)] = u2
    u[E, E] = aux_phase
    return u


def computational_block(u3: np.ndarray) -> np.ndarray:
    """The 2x2 block of a qutrit operator acting on span{|0>, |1>}."""
    idx = [G, ONE]
    return np.asarray(u3)[np.ix_(idx, idx)]


def axis_dot_sigma(axis) -> np.ndarray:
    n = np.asarray(axis, dtype=float)
    return n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z


def rotation(gamma: float, axis) -> np.ndarray:
    """``exp(-i gamma n.sigma / 2)`` in closed form."""
    return np.cos(gamma / 2) * ID2 - 1j * np.sin(gamma / 2) * axis_dot_sigma(axis)


@dataclass(frozen=True)
class GateSpec:
    """Target single-qubit rotation by ``gamma`` about the unit ``axis``."""

    gamma: float
    axis: tuple
    clifford_index: Optional[int] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        axis = tuple(float(x) for x in self.axis)
        if len(axis) != 3:
            raise ValueError("axis must have three components")
        if abs(np.linalg.norm(axis) - 1) > ATOL:
            raise ValueError(f"axis {axis} is not a unit vector")
        if not 0 <= self.gamma <= 2 * np.pi + ATOL:
            raise ValueError(f"rotation angle {self.gamma} outside [0, 2pi]")
        object.__setattr__(self, "axis", axis)

    @property
    def is_identity(self) -> bool:
        return self.gamma == 0

    @classmethod
    def from_unitary(cls, u2) -> "GateSpec":
        """Recover (gamma, axis) from a 2x2 unitary, discarding the global phase."""
        u2 = unitary(u2)
        su2 = u2 / np.sqrt(np.linalg.det(u2))
        c = np.real(np.trace(su2)) / 2
        # su2 = cos(g/2) I - i sin(g/2) n.sigma
        v = np.array([np.real(1j * np.trace(su2 @ p)) / 2 for p in PAULIS])
        s = np.linalg.norm(v)
        if s < ATOL:
            return cls(0.0, (1.0, 0.0, 0.0))
        gamma = 2 * np.arctan2(s, c)
        return cls(float(gamma), tuple(v / s))


def gate_unitary(spec: GateSpec) -> np.ndarray:
    """The 2x2 unitary ``exp(-i gamma n.sigma / 2)`` of a gate spec."""
    if abs(np.linalg.norm(spec.axis) - 1) > ATOL:
        raise ValueError("axis must be a unit vector")
    return rotation(spec.gamma, spec.axis)


def phase_invariant_distance(u, v) -> float:
    """``sqrt(1 - |Tr(U^dag V)| / d)``; zero exactly when U and V differ by a global phase."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    d = u.shape[0]
    # For unitaries 1 - |Tr(U^dag V)|/d == ||U - e^{i phi} V||_F^2 / (2d) at the optimal
    # phase; the norm form keeps full precision near zero where the sqrt form stalls at ~1e-8.
    return float(np.linalg.norm(u - align_phase(v, u)) / np.sqrt(2 * d))


def align_phase(u, target) -> np.ndarray:
    """Multiply ``u`` by the global phase that best matches ``target``."""
    u = np.asarray(u, dtype=complex)
    ov = np.trace(np.asarray(target).conj().T @ u)
    if abs(ov) == 0:
        return u
    return u * (abs(ov) / ov)


def propagator(h: np.ndarray, dt: float) -> np.ndarray:
    return expm(-1j * h * dt)
