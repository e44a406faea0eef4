"""Reference and interleaved Clifford randomized benchmarking at pulse level.

Every Clifford is synthesized as a single-shot drive and propagated once into
a 9x9 dynamical map; sequences are then products of cached maps acting on
``|0><0|``. Sequence randomness comes from a Philox counter-based generator so
a seed fixes every sequence on every platform.
"""
from __future__ import annotations

import csv
import json
import warnings
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .clifford import IDENTITY, NUM_CLIFFORDS, clifford_compose, clifford_inverse, clifford_lookup
from .core import G, projector
from .dynamics import DEFAULT_STEPS, NoiseModel, lindblad_map, propagate_unitary
from .pulses import DEFAULT_TAU, synthesize
from .tomography import ReadoutModel

DEFAULT_M_VALUES = (1, 3, 5, 8, 12, 18, 26, 38, 55, 80)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class RBConfig:
    m_values: tuple = DEFAULT_M_VALUES
    k: int = 50
    seed: int = 0
    interleaved_gate: Optional[int] = None
    noise: NoiseModel = field(default_factory=NoiseModel)
    readout: Optional[ReadoutModel] = None
    tau: float = DEFAULT_TAU
    steps: int = DEFAULT_STEPS
    shots: Optional[int] = None
    # Toy per-gate qubit depolarizing strength applied after every gate (oracle tests).
    depolarizing: float = 0.0

    def __post_init__(self):
        m = tuple(int(x) for x in self.m_values)
        if not m or any(x < 1 for x in m) or any(b <= a for a, b in zip(m, m[1:])):
            raise ValueError("m_values must be nonempty, strictly increasing and >= 1")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.interleaved_gate is not None and not 0 <= self.interleaved_gate < NUM_CLIFFORDS:
            raise ValueError("interleaved_gate must be a Clifford index")
        if not 0 <= self.depolarizing <= 1:
            raise ValueError("depolarizing strength must lie in [0, 1]")
        object.__setattr__(self, "m_values", m)

    def to_json(self) -> dict:
        d = asdict(self)
        d["m_values"] = list(self.m_values)
        return d


@dataclass
class RBRecord:
    m: int
    survival: list

    @property
    def mean(self) -> float:
        return float(np.mean(self.survival))

    @property
    def stddev(self) -> float:
        return float(np.std(self.survival))

    def to_json(self) -> dict:
        return {"m": self.m, "mean": self.mean, "stddev": self.stddev,
                "survival": [float(s) for s in self.survival]}


@dataclass
class DecayFit:
    A: float
    B: float
    p: float
    covariance: np.ndarray
    residual: float
    degenerate: bool = False

    @property
    def p_err(self) -> float:
        return float(np.sqrt(max(self.covariance[2, 2], 0.0)))

    @property
    def r(self) -> float:
        return average_error(self.p)

    def to_json(self) -> dict:
        return {"A": self.A, "B": self.B, "p": self.p, "p_err": self.p_err,
                "residual": self.residual, "degenerate": self.degenerate}


class FitError(RuntimeError):
    pass


def average_error(p: float) -> float:
    if not 0 <= p <= 1:
        raise ValueError(f"p={p} outside [0, 1]")
    return (1 - p) / 2


def interleaved_fidelity(p_gate: float, p_ref: float) -> float:
    if p_ref == 0:
        raise ValueError("reference decay p_ref must be nonzero")
    if not 0 < p_ref <= 1 or not 0 <= p_gate <= 1:
        raise ValueError("decay parameters must lie in [0, 1]")
    f = 1 - (1 - p_gate / p_ref) / 2
    if p_gate > p_ref:
        warnings.warn("p_gate exceeds p_ref; clipping gate fidelity to 1", RuntimeWarning)
    return float(np.clip(f, 0.0, 1.0))


def generate_sequence(m: int, rng: np.random.Generator, interleaved: Optional[int] = None):
    """Random Clifford indices plus the recovery gate.

    With ``interleaved`` set the applied gates alternate ``c1, g, c2, g, ...``
    and the recovery inverts that whole product. Returns ``(applied, recovery)``.
    """
    if m < 1:
        raise ValueError("sequence length must be at least 1")
    draws = rng.integers(0, NUM_CLIFFORDS, size=m)
    applied = []
    for c in draws:
        applied.append(int(c))
        if interleaved is not None:
            applied.append(int(interleaved))
    return applied, recovery_gate(applied)


def recovery_gate(applied: Sequence[int]) -> int:
    total = IDENTITY
    for c in applied:
        total = clifford_compose(c, total)
    return clifford_inverse(total)


def _superop_from_unitary(u):
    return np.kron(u, u.conj())


@lru_cache(maxsize=512)
def _gate_map(index: int, noise: NoiseModel, tau: float, steps: int) -> np.ndarray:
    schedule = synthesize(clifford_lookup(index), tau)
    if not noise.enabled:
        return _superop_from_unitary(propagate_unitary(schedule, steps).final_unitary)
    return lindblad_map(schedule, noise, steps).final_map


def _depolarizer(lam: float) -> np.ndarray:
    """Qubit depolarizing on span{|0>,|1>}: rho -> (1-lam) rho + lam Tr_q(rho) I_q / 2."""
    idx = [0, 2]
    out = (1 - lam) * np.eye(9, dtype=complex)
    target = np.zeros(9, dtype=complex)
    for i in idx:
        target[i * 3 + i] = 0.5
    trace_row = np.zeros(9, dtype=complex)
    for i in idx:
        trace_row[i * 3 + i] = 1
    out[:, :] += lam * np.outer(target, trace_row)
    # Coherences between |e> and the qubit are left untouched by the toy channel.
    for i in range(3):
        for j in range(3):
            if 1 in (i, j):
                out[i * 3 + j, i * 3 + j] = 1
    return out


def gate_maps(config: RBConfig) -> list:
    maps = [_gate_map(i, config.noise, config.tau, config.steps) for i in range(NUM_CLIFFORDS)]
    if config.depolarizing:
        dep = _depolarizer(config.depolarizing)
        maps = [dep @ m for m in maps]
    return maps


def sequence_survival(applied, recovery, maps) -> float:
    """Exact ``<0|rho_f|0>`` after the sequence and recovery, starting from ``|0><0|``."""
    vec = projector(G).ravel()
    for c in list(applied) + [recovery]:
        vec = maps[c] @ vec
    return vec.reshape(3, 3).diagonal().real


def run_rb(config: RBConfig):
    """Simulate every (m, sequence) pair and fit the mean survival.

    Returns ``(records, fit)``. ``fit`` is ``None`` if the fit fails; the raw
    records are returned regardless.
    """
    rng = make_rng(config.seed)
    maps = gate_maps(config)
    records = []
    for m in config.m_values:
        survival = []
        for _ in range(config.k):
            applied, rec = generate_sequence(m, rng, config.interleaved_gate)
            pops = np.clip(sequence_survival(applied, rec, maps), 0, None)
            if config.readout is not None:
                pops = config.readout.apply(pops)
            s = float(np.clip(pops[G], 0, 1))
            if config.shots:
                s = rng.binomial(config.shots, s) / config.shots
            survival.append(s)
        records.append(RBRecord(m, survival))
    try:
        fit = fit_decay(records)
    except FitError as exc:
        warnings.warn(str(exc), RuntimeWarning)
        fit = None
    return records, fit


def _model(m, a, b, p):
    return a * p ** m + b


def fit_decay(records: Sequence[RBRecord], sigma: Optional[Sequence[float]] = None) -> DecayFit:
    """Least-squares fit of ``A p^m + B`` to the mean survival.

    If all means coincide the decay is unidentifiable; the fit is flagged as
    degenerate and reported as the flat curve ``p = 1, A = 0``.
    """
    ms = np.array([r.m for r in records], dtype=float)
    ys = np.array([r.mean for r in records])
    if len(set(ms)) < 3:
        raise FitError("need at least three distinct sequence lengths")
    if np.ptp(ys) < 1e-9:
        return DecayFit(0.0, float(ys.mean()), 1.0, np.zeros((3, 3)), 0.0, degenerate=True)
    p0 = [ys[0] - ys[-1], ys[-1], 0.99]
    try:
        popt, pcov = curve_fit(_model, ms, ys, p0=p0, sigma=sigma,
                               absolute_sigma=sigma is not None,
                               bounds=([-np.inf, -np.inf, 0.0], [np.inf, np.inf, 1.0]),
                               method="trf", ftol=1e-15, xtol=1e-15, gtol=1e-15, max_nfev=10000)
    except (RuntimeError, ValueError) as exc:
        raise FitError(f"decay fit did not converge: {exc}") from exc
    a, b, p = popt
    resid = float(np.linalg.norm(_model(ms, *popt) - ys))
    return DecayFit(float(a), float(b), float(np.clip(p, 0, 1)), pcov, resid)


def rb_to_json(config: RBConfig, records, fit: Optional[DecayFit], derived: Optional[dict] = None):
    return {
        "config": config.to_json(),
        "records": [r.to_json() for r in records],
        "fit": fit.to_json() if fit is not None else None,
        "derived": derived or {},
    }


def write_rb_csv(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "mean", "stddev"])
        for r in records:
            w.writerow([r.m, repr(r.mean), repr(r.stddev)])


def records_from_json(data) -> list:
    if isinstance(data, str):
        data = json.loads(data)
    return [RBRecord(r["m"], list(r["survival"])) for r in data["records"]]
