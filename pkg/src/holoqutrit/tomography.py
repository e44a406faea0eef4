"""Three-level state and process tomography.

Inputs are prepared by a pulse on the 0-e transition followed by one on the
e-1 transition, each drawn from {I, X/2, Y/2, X}. The same 16 unitaries,
inverted, serve as QST analysis rotations before a population readout.
States are reconstructed by linear inversion followed by projection onto the
closest unit-trace PSD matrix; the process matrix is solved by least squares
over all input/output pairs.
"""
from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import E, G, ONE, SIGMA_X, SIGMA_Y, SIGMA_Z, ID2, check_density_matrix, projector
from .dynamics import (DEFAULT_STEPS, NoiseModel, apply_map, holonomic_unitary,
                       lindblad_map, propagate_unitary)
from .pulses import DEFAULT_TAU, DriveSchedule, synthesize

PREP_PULSES = ("I", "X/2", "Y/2", "X")
_PULSE_ROT = {"I": (0.0, 0.0), "X/2": (np.pi / 2, 0.0), "Y/2": (np.pi / 2, np.pi / 2),
              "X": (np.pi, 0.0)}


class TomographyError(RuntimeError):
    """Rank-deficient design or inconsistent tomography data."""


def transition_rotation(pulse: str, lower: int, upper: int) -> np.ndarray:
    """Resonant rotation ``exp(-i angle (cos p X + sin p Y)/2)`` on one ladder transition."""
    angle, ph = _PULSE_ROT[pulse]
    u = np.eye(3, dtype=complex)
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    u[lower, lower] = c
    u[upper, upper] = c
    u[lower, upper] = -1j * s * np.exp(-1j * ph)
    u[upper, lower] = -1j * s * np.exp(1j * ph)
    return u


@dataclass(frozen=True)
class PreparationSequence:
    op_0e: str
    op_e1: str

    @property
    def unitary(self) -> np.ndarray:
        return transition_rotation(self.op_e1, E, ONE) @ transition_rotation(self.op_0e, G, E)

    @property
    def state(self) -> np.ndarray:
        u = self.unitary
        return u @ projector(G) @ u.conj().T


def preparation_sequences() -> list:
    return [PreparationSequence(a, b) for a, b in itertools.product(PREP_PULSES, PREP_PULSES)]


def enumerate_preparations() -> list:
    """The 16 ideal input density matrices."""
    return [p.state for p in preparation_sequences()]


def gram_rank(states: Sequence[np.ndarray], tol: float = 1e-10) -> int:
    vecs = np.array([np.asarray(s).ravel() for s in states])
    return int(np.linalg.matrix_rank(vecs, tol=tol))


# -- readout -----------------------------------------------------------------

@dataclass(frozen=True)
class ReadoutModel:
    """Assignment fidelities of |0>, |e>, |1>; misassignment is split evenly between the others."""

    f0: float = 0.995
    fe: float = 0.923
    f1: float = 0.895

    def __post_init__(self):
        for f in (self.f0, self.fe, self.f1):
            if not 0 < f <= 1:
                raise ValueError("assignment fidelities must lie in (0, 1]")

    @property
    def confusion(self) -> np.ndarray:
        """Column-stochastic ``C[assigned, true]`` in ladder order (0, e, 1)."""
        fid = np.array([self.f0, self.fe, self.f1])
        c = np.tile((1 - fid) / 2, (3, 1))
        np.fill_diagonal(c, fid)
        return c

    def apply(self, populations) -> np.ndarray:
        return np.asarray(populations) @ self.confusion.T


# -- state tomography --------------------------------------------------------

def _hermitian_basis(d: int) -> list:
    """Orthonormal Hermitian basis of d x d matrices."""
    out = []
    for i in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[i, i] = 1
        out.append(m)
    for i, j in itertools.combinations(range(d), 2):
        m = np.zeros((d, d), dtype=complex)
        m[i, j] = m[j, i] = 1 / np.sqrt(2)
        out.append(m)
        m = np.zeros((d, d), dtype=complex)
        m[i, j], m[j, i] = -1j / np.sqrt(2), 1j / np.sqrt(2)
        out.append(m)
    return out


_HBASIS = _hermitian_basis(3)


def analysis_rotations() -> list:
    """Rotations applied before readout: inverses of the preparation unitaries."""
    return [p.unitary.conj().T for p in preparation_sequences()]


def measurement_operators(rotations=None) -> np.ndarray:
    """POVM elements ``V^dag |j><j| V``, shape (settings, 3, 3, 3)."""
    rotations = analysis_rotations() if rotations is None else rotations
    return np.array([[v.conj().T @ projector(j) @ v for j in range(3)] for v in rotations])


def measurement_probabilities(rho, rotations=None, readout: Optional[ReadoutModel] = None):
    """Level populations after each analysis rotation, shape (settings, 3)."""
    ops = measurement_operators(rotations)
    p = np.einsum("kjab,ba->kj", ops, np.asarray(rho)).real
    return readout.apply(p) if readout is not None else p


def project_to_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Closest unit-trace PSD matrix in Frobenius norm (eigenvalue simplex projection)."""
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    # Euclidean projection of the spectrum onto the probability simplex.
    u = np.sort(w)[::-1]
    css = np.cumsum(u) - 1
    k = np.arange(1, len(u) + 1)
    r = k[u - css / k > 0][-1]
    shift = css[r - 1] / r
    w_new = np.clip(w - shift, 0, None)
    return (v * w_new) @ v.conj().T


@dataclass
class QSTResult:
    rho: np.ndarray
    residual: float
    raw: np.ndarray = field(repr=False, default=None)


def qst_reconstruct(data, rotations=None, readout: Optional[ReadoutModel] = None,
                    rank_tol: float = 1e-10) -> QSTResult:
    """Density matrix from per-setting population records.

    ``data`` has shape (settings, 3). When ``readout`` is given the data are
    treated as assigned outcomes and the confusion matrix is inverted inside
    the least-squares model.
    """
    data = np.asarray(data, dtype=float)
    ops = measurement_operators(rotations)
    if readout is not None:
        ops = np.einsum("ij,kjab->kiab", readout.confusion, ops)
    if data.shape != ops.shape[:2]:
        raise ValueError(f"data shape {data.shape} does not match {ops.shape[:2]} settings")
    design = np.array([[np.trace(m @ b).real for b in _HBASIS] for m in ops.reshape(-1, 3, 3)])
    sv = np.linalg.svd(design, compute_uv=False)
    if sv[-1] < rank_tol * sv[0]:
        raise TomographyError("analysis set is not tomographically complete")
    coef, *_ = np.linalg.lstsq(design, data.ravel(), rcond=None)
    raw = sum(c * b for c, b in zip(coef, _HBASIS))
    rho = project_to_density_matrix(raw)
    model = np.array([np.trace(m @ rho).real for m in ops.reshape(-1, 3, 3)])
    return QSTResult(rho=rho, residual=float(np.linalg.norm(model - data.ravel())), raw=raw)


def state_fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    w, v = np.linalg.eigh(rho)
    sq = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    ev = np.linalg.eigvalsh(sq @ sigma @ sq)
    return float(np.sum(np.sqrt(np.clip(ev, 0, None))) ** 2)


# -- process tomography ------------------------------------------------------

def _qutrit_ops():
    def op(entries):
        m = np.zeros((3, 3), dtype=complex)
        for (i, j), z in entries.items():
            m[i, j] = z
        return m

    return {
        "I01": op({(G, G): 1, (ONE, ONE): 1}),
        "X01": op({(G, ONE): 1, (ONE, G): 1}),
        "Y01": op({(G, ONE): -1j, (ONE, G): 1j}),
        "Z01": op({(G, G): 1, (ONE, ONE): -1}),
        "X0e": op({(G, E): 1, (E, G): 1}),
        "Y0e": op({(G, E): -1j, (E, G): 1j}),
        "Xe1": op({(E, ONE): 1, (ONE, E): 1}),
        "Ye1": op({(E, ONE): -1j, (ONE, E): 1j}),
        "Ie": op({(E, E): 1}),
    }


QUTRIT_BASIS = tuple(_qutrit_ops().items())
QUBIT_BASIS = (("I", ID2), ("X", SIGMA_X), ("Y", SIGMA_Y), ("Z", SIGMA_Z))


@dataclass
class ChiMatrix:
    """Process matrix in an orthonormalized operator basis, scaled so a trace-preserving map has trace 1."""

    entries: np.ndarray
    basis: tuple
    residual: float = 0.0

    @property
    def names(self) -> list:
        return [n for n, _ in self.basis]

    @property
    def operators(self) -> list:
        return [m / np.linalg.norm(m) for _, m in self.basis]

    @property
    def dim(self) -> int:
        return self.basis[0][1].shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def apply(self, rho) -> np.ndarray:
        ops = self.operators
        out = sum(self.entries[m, n] * ops[m] @ rho @ ops[n].conj().T
                  for m in range(len(ops)) for n in range(len(ops)))
        return self.dim * out

    def to_json(self) -> dict:
        return {
            "basis": self.names,
            "basis_order": "0,e,1" if self.dim == 3 else "0,1",
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data) -> "ChiMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        table = dict(QUTRIT_BASIS + QUBIT_BASIS)
        basis = tuple((n, table[n]) for n in data["basis"])
        entries = np.array([[complex(re, im) for re, im in row] for row in data["entries"]])
        return cls(entries, basis)

    def write_abs_csv(self, path) -> None:
        names = self.names
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row", "col", "abs", "re", "im"])
            for m, n in itertools.product(range(len(names)), repeat=2):
                z = self.entries[m, n]
                w.writerow([names[m], names[n], repr(float(abs(z))), repr(float(z.real)),
                            repr(float(z.imag))])


def chi_from_kraus(kraus, basis=QUTRIT_BASIS) -> ChiMatrix:
    ops = [m / np.linalg.norm(m) for _, m in basis]
    d = ops[0].shape[0]
    coeffs = np.array([[np.trace(b.conj().T @ k) for b in ops] for k in kraus])
    return ChiMatrix(coeffs.T @ coeffs.conj() / d, basis)


def ideal_chi(u) -> ChiMatrix:
    """Process matrix of a unitary; 3x3 uses the qutrit basis, 2x2 the Pauli basis."""
    u = np.asarray(u)
    return chi_from_kraus([u], QUTRIT_BASIS if u.shape[0] == 3 else QUBIT_BASIS)


def _nearest_psd(m: np.ndarray) -> np.ndarray:
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    return (v * np.clip(w, 0, None)) @ v.conj().T


def _solve_chi(inputs, outputs, basis, max_residual, rank_tol=1e-10) -> ChiMatrix:
    ops = [m / np.linalg.norm(m) for _, m in basis]
    d = ops[0].shape[0]
    if len(inputs) != len(outputs):
        raise ValueError("inputs and outputs differ in length")
    if gram_rank(inputs) < d * d:
        raise TomographyError(f"inputs span rank {gram_rank(inputs)} < {d * d}")
    nb = len(ops)
    rows = []
    for rho in inputs:
        cols = [(d * ops[m] @ rho @ ops[n].conj().T).ravel()
                for m in range(nb) for n in range(nb)]
        rows.append(np.array(cols).T)
    design = np.vstack(rows)
    target = np.concatenate([np.asarray(r, dtype=complex).ravel() for r in outputs])
    sol, *_ = np.linalg.lstsq(design, target, rcond=None)
    residual = float(np.linalg.norm(design @ sol - target))
    if max_residual is not None and residual > max_residual:
        raise TomographyError(f"process fit residual {residual:.3e} exceeds {max_residual:.3e}")
    chi = _nearest_psd(sol.reshape(nb, nb))
    return ChiMatrix(chi, basis, residual)


def qpt_chi(inputs, outputs, max_residual: Optional[float] = None) -> ChiMatrix:
    """9x9 process matrix from input/output density matrix pairs."""
    return _solve_chi(inputs, outputs, QUTRIT_BASIS, max_residual)


def process_fidelity(chi_exp: ChiMatrix, chi_th: ChiMatrix) -> float:
    """Normalized Hilbert-Schmidt overlap of two process matrices."""
    if chi_exp.names != chi_th.names:
        raise ValueError("process matrices are expressed in different bases")
    a, b = chi_exp.entries, chi_th.entries
    num = abs(np.trace(a @ b.conj().T))
    den = np.sqrt(np.trace(a @ a.conj().T).real * np.trace(b @ b.conj().T).real)
    return float(num / den)


def overlap_fidelity(chi_exp: ChiMatrix, chi_th: ChiMatrix) -> float:
    """Unnormalized overlap ``|Tr(chi_exp chi_th^dag)|`` of unit-trace process matrices.

    Unlike :func:`process_fidelity` this is first-order sensitive to
    incoherent error; for a unitary target it is the entanglement fidelity.
    """
    if chi_exp.names != chi_th.names:
        raise ValueError("process matrices are expressed in different bases")
    return float(abs(np.trace(chi_exp.entries @ chi_th.entries.conj().T)))


def _in_subspace(rho, tol=1e-9) -> bool:
    rho = np.asarray(rho)
    return np.abs(rho[E, :]).max() < tol and np.abs(rho[:, E]).max() < tol


def reduced_chi(inputs, outputs) -> ChiMatrix:
    """Qubit-level process matrix from the inputs confined to span{|0>, |1>}.

    Outputs are projected onto the subspace without renormalization, so any
    population lost to |e> lowers the trace below one.
    """
    idx = [G, ONE]
    pairs = [(np.asarray(i)[np.ix_(idx, idx)], np.asarray(o)[np.ix_(idx, idx)])
             for i, o in zip(inputs, outputs) if _in_subspace(i)]
    if not pairs or gram_rank([p[0] for p in pairs]) < 4:
        raise TomographyError("computational-subspace inputs do not span the qubit operator space")
    ins, outs = zip(*pairs)
    return _solve_chi(ins, outs, QUBIT_BASIS, None)


def leakage_trace(inputs, outputs) -> float:
    """Trace of the reduced process matrix; 1 means no population left the qubit."""
    return reduced_chi(inputs, outputs).trace()


# -- end-to-end pipeline -----------------------------------------------------

@dataclass
class QPTResult:
    chi: ChiMatrix
    chi_ideal: ChiMatrix
    fidelity: float
    leakage: float
    inputs: list = field(repr=False, default_factory=list)
    outputs: list = field(repr=False, default_factory=list)

    def summary(self) -> dict:
        return {"fidelity": self.fidelity, "trace_reduced_chi": self.leakage,
                "overlap_fidelity": overlap_fidelity(self.chi, self.chi_ideal),
                "trace_chi": self.chi.trace(), "chi_residual": self.chi.residual}


def gate_outputs(schedule: DriveSchedule, inputs, noise: Optional[NoiseModel] = None,
                 steps: int = DEFAULT_STEPS) -> list:
    """Exact output density matrices of the simulated gate for each input."""
    if noise is None or not noise.enabled:
        u = propagate_unitary(schedule, steps).final_unitary
        return [u @ r @ u.conj().T for r in inputs]
    superop = lindblad_map(schedule, noise, steps).final_map
    return [apply_map(superop, r) for r in inputs]


def run_qpt(gate, noise: Optional[NoiseModel] = None, tau: float = DEFAULT_TAU,
            steps: int = DEFAULT_STEPS, readout: Optional[ReadoutModel] = None,
            correct_readout: bool = True, shots: Optional[int] = None,
            rng: Optional[np.random.Generator] = None) -> QPTResult:
    """Simulate the full QPT experiment for a gate spec or schedule.

    Each output state is measured through the analysis rotations (optionally
    with readout error and finite shots) and reconstructed by QST before the
    process fit. The reference is the ideal loop-closing qutrit unitary.
    """
    schedule = gate if isinstance(gate, DriveSchedule) else synthesize(gate, tau)
    inputs = enumerate_preparations()
    exact = gate_outputs(schedule, inputs, noise, steps)
    outputs = []
    for rho in exact:
        probs = measurement_probabilities(rho, readout=readout)
        if shots:
            rng = rng if rng is not None else np.random.default_rng()
            probs = np.array([rng.multinomial(shots, p / p.sum()) / shots for p in probs])
        outputs.append(qst_reconstruct(probs, readout=readout if correct_readout else None).rho)
    chi = qpt_chi(inputs, outputs)
    chi_th = ideal_chi(holonomic_unitary(schedule))
    return QPTResult(chi=chi, chi_ideal=chi_th, fidelity=process_fidelity(chi, chi_th),
                     leakage=leakage_trace(inputs, outputs), inputs=inputs, outputs=outputs)
