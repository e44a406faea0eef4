"""Rotating-frame dynamics of the driven ladder, closed and open.

Unitary evolution is a time-ordered product of midpoint exponentials.
Dissipative evolution integrates the vectorized Lindblad equation for the
full 9x9 dynamical map with classical RK4, so a single integration serves
every initial state.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .core import E, G, ID3, ONE, QutritState, check_density_matrix, projector, transition
from .pulses import SHAPES, DriveSchedule, drive_amplitudes

DEFAULT_STEPS = 2000
MIN_STEPS = 100


class IntegrationError(RuntimeError):
    """Raised when a propagated density matrix leaves the physical set."""


@dataclass(frozen=True)
class NoiseModel:
    """Relaxation and Ramsey dephasing times of the two ladder transitions (seconds)."""

    t1_e0: float = 25.3e-6
    t1_1e: float = 12.8e-6
    tphi_e0: float = 28.1e-6
    tphi_1e: float = 13.4e-6
    enabled: bool = True

    def __post_init__(self):
        if self.enabled:
            for name in ("t1_e0", "t1_1e", "tphi_e0", "tphi_1e"):
                if not getattr(self, name) > 0:
                    raise ValueError(f"{name} must be positive")

    @classmethod
    def off(cls) -> "NoiseModel":
        return cls(enabled=False)

    def scaled(self, rate_factor: float) -> "NoiseModel":
        """All rates multiplied by ``rate_factor`` (times divided by it)."""
        if rate_factor == 0:
            return replace(self, enabled=False)
        return replace(self, t1_e0=self.t1_e0 / rate_factor, t1_1e=self.t1_1e / rate_factor,
                       tphi_e0=self.tphi_e0 / rate_factor, tphi_1e=self.tphi_1e / rate_factor)

    def collapse_operators(self) -> list:
        if not self.enabled:
            return []
        # Pure-dephasing projectors carry sqrt(2/Tphi) so each two-level
        # coherence decays as exp(-t/Tphi) from dephasing alone.
        return [
            np.sqrt(1 / self.t1_e0) * transition(G, E),
            np.sqrt(1 / self.t1_1e) * transition(E, ONE),
            np.sqrt(2 / self.tphi_e0) * projector(E),
            np.sqrt(2 / self.tphi_1e) * projector(ONE),
        ]


@dataclass
class PropagationResult:
    step_count: int
    final_unitary: Optional[np.ndarray] = None
    final_map: Optional[np.ndarray] = None
    final_rho: Optional[np.ndarray] = None
    times: list = field(default_factory=list)
    trajectory: list = field(default_factory=list)


def hamiltonian_at(t, schedule: DriveSchedule) -> np.ndarray:
    """Rotating-frame Hamiltonian (rad/s) at time ``t``."""
    dp, op, os_ = drive_amplitudes(t, schedule)
    h = np.zeros((3, 3), dtype=complex)
    h[E, E] = dp
    h[E, G] = op / 2
    h[E, ONE] = os_ / 2
    h[G, E] = np.conj(op) / 2
    h[ONE, E] = np.conj(os_) / 2
    return h


def bright_dark(theta: float, phi: float):
    """Bright and dark states of the drive.

    The dark state carries ``exp(-i phi)`` on ``|0>`` so that it is orthogonal
    to ``|b> = cos(theta/2)|0> + sin(theta/2) exp(i phi)|1>``.
    """
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    b = np.zeros(3, dtype=complex)
    d = np.zeros(3, dtype=complex)
    b[G], b[ONE] = c, s * np.exp(1j * phi)
    d[G], d[ONE] = s * np.exp(-1j * phi), -c
    return QutritState(b), QutritState(d)


def _expm_hermitian(h: np.ndarray, x: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * x)) @ v.conj().T


def propagate_unitary(schedule: DriveSchedule, steps: int = DEFAULT_STEPS,
                      record_every: Optional[int] = None) -> PropagationResult:
    """Time-ordered product of midpoint step propagators over ``[0, tau]``."""
    if steps < MIN_STEPS:
        raise ValueError(f"need at least {MIN_STEPS} steps, got {steps}")
    res = PropagationResult(step_count=steps)
    u = ID3.copy()
    if record_every:
        res.times.append(0.0)
        res.trajectory.append(u.copy())
    if schedule.is_idle:
        if record_every:
            for k in range(record_every, steps + 1, record_every):
                res.times.append(k * schedule.tau / steps)
                res.trajectory.append(u.copy())
        res.final_unitary = u
        return res
    dt = schedule.tau / steps
    mids = (np.arange(steps) + 0.5) * dt
    for k, tm in enumerate(mids, start=1):
        u = _expm_hermitian(hamiltonian_at(tm, schedule), dt) @ u
        if record_every and k % record_every == 0:
            res.times.append(k * dt)
            res.trajectory.append(u.copy())
    res.final_unitary = u
    return res


def _envelope_area(schedule: DriveSchedule, t: float) -> float:
    if schedule.is_idle:
        return 0.0
    tau = schedule.tau
    if schedule.shape == "sin2":
        return schedule.omega0 * (t / 2 - tau * np.sin(2 * np.pi * t / tau) / (4 * np.pi))
    f = SHAPES[schedule.shape]
    val, _ = quad(f, 0.0, t / tau, epsabs=0.0, epsrel=1e-12, limit=200)
    return schedule.omega0 * tau * val


def exact_unitary(schedule: DriveSchedule, t: Optional[float] = None) -> np.ndarray:
    """``exp(-i H0 int_0^t Omega)``; exact because ``H(t) = Omega(t) H0`` commutes with itself."""
    t = schedule.tau if t is None else t
    if schedule.is_idle:
        return ID3.copy()
    peak = schedule.omega0
    h0 = hamiltonian_at(schedule.tau / 2, schedule) / (peak * SHAPES[schedule.shape](0.5))
    return _expm_hermitian(h0, _envelope_area(schedule, t))


def holonomic_unitary(schedule: DriveSchedule) -> np.ndarray:
    """``|d><d| + exp(-i gamma)(|b><b| + |e><e|)``, the loop-closing propagator."""
    if schedule.is_idle:
        return ID3.copy()
    b, d = bright_dark(schedule.theta, schedule.phi)
    ph = np.exp(-1j * schedule.gamma)
    return (d.density_matrix() + ph * (b.density_matrix() + projector(E)))


def parallel_transport_residual(schedule: DriveSchedule, grid: int = 200,
                                steps: int = DEFAULT_STEPS) -> float:
    """Largest ``|<i|U^dag(t) H(t) U(t)|j>| / Omega0`` for i, j in the qubit subspace."""
    if grid < 10:
        raise ValueError("grid must have at least 10 points")
    if schedule.is_idle:
        return 0.0
    intervals = grid - 1
    per = max(1, -(-steps // intervals))
    res = propagate_unitary(schedule, steps=per * intervals, record_every=per)
    idx = [G, ONE]
    worst = 0.0
    for t, u in zip(res.times, res.trajectory):
        h = hamiltonian_at(min(t, schedule.tau), schedule)
        m = (u.conj().T @ h @ u)[np.ix_(idx, idx)]
        worst = max(worst, float(np.abs(m).max()))
    return worst / schedule.omega0


def cyclicity_residual(schedule: DriveSchedule, steps: int = DEFAULT_STEPS) -> float:
    """Amplitude left on ``|e>`` after the gate, starting from the qubit subspace."""
    u = propagate_unitary(schedule, steps).final_unitary
    return float(max(abs(u[E, G]), abs(u[E, ONE])))


# -- open-system evolution -------------------------------------------------

def _spre(a):
    return np.kron(a, ID3)


def _spost(a):
    return np.kron(ID3, a.T)


def dissipator(noise: NoiseModel) -> np.ndarray:
    """Vectorized (row-major) Lindblad dissipator."""
    out = np.zeros((9, 9), dtype=complex)
    for c in noise.collapse_operators():
        cdc = c.conj().T @ c
        out += np.kron(c, c.conj()) - 0.5 * _spre(cdc) - 0.5 * _spost(cdc)
    return out


def liouvillian(t, schedule: DriveSchedule, noise: NoiseModel) -> np.ndarray:
    h = hamiltonian_at(t, schedule)
    return -1j * (_spre(h) - _spost(h)) + dissipator(noise)


def lindblad_map(schedule: DriveSchedule, noise: NoiseModel, steps: int = DEFAULT_STEPS,
                 record_every: Optional[int] = None) -> PropagationResult:
    """Integrate the 9x9 dynamical map with RK4 on a uniform grid."""
    if steps < MIN_STEPS:
        raise ValueError(f"need at least {MIN_STEPS} steps, got {steps}")
    dt = schedule.tau / steps
    diss = dissipator(noise)

    def gen(t):
        if schedule.is_idle:
            return diss
        h = hamiltonian_at(min(t, schedule.tau), schedule)
        return -1j * (_spre(h) - _spost(h)) + diss

    res = PropagationResult(step_count=steps)
    s = np.eye(9, dtype=complex)
    if record_every:
        res.times.append(0.0)
        res.trajectory.append(s.copy())
    l0 = gen(0.0)
    for k in range(steps):
        t = k * dt
        lm = gen(t + dt / 2)
        l1 = gen(t + dt)
        k1 = l0 @ s
        k2 = lm @ (s + 0.5 * dt * k1)
        k3 = lm @ (s + 0.5 * dt * k2)
        k4 = l1 @ (s + dt * k3)
        s = s + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        l0 = l1
        if record_every and (k + 1) % record_every == 0:
            res.times.append((k + 1) * dt)
            res.trajectory.append(s.copy())
    res.final_map = s
    return res


def apply_map(superop: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return (superop @ np.asarray(rho, dtype=complex).reshape(9)).reshape(3, 3)


def physical(rho: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Symmetrize and clip round-off negativity; larger violations are an integration failure."""
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr - 1) > tol:
        raise IntegrationError(f"trace drifted to {tr}")
    w, v = np.linalg.eigh(rho)
    if w.min() < -tol:
        raise IntegrationError(f"negative eigenvalue {w.min():.3e}")
    if w.min() < 0:
        w = np.clip(w, 0, None)
        w /= w.sum()
        rho = (v * w) @ v.conj().T
    return rho


def propagate_lindblad(schedule: DriveSchedule, noise: NoiseModel, rho0,
                       steps: int = DEFAULT_STEPS, record_every: Optional[int] = None
                       ) -> PropagationResult:
    rho0 = check_density_matrix(rho0)
    res = lindblad_map(schedule, noise, steps, record_every)
    res.final_rho = physical(apply_map(res.final_map, rho0))
    res.trajectory = [apply_map(s, rho0) for s in res.trajectory]
    return res


def write_trajectory_csv(path, times, rhos) -> None:
    """One row per time: t followed by re/im of the nine density-matrix entries, row-major."""
    header = ["t"]
    for i in "0e1":
        for j in "0e1":
            header += [f"re_{i}{j}", f"im_{i}{j}"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for t, rho in zip(times, rhos):
            row = [repr(float(t))]
            for z in np.asarray(rho).ravel():
                row += [repr(float(z.real)), repr(float(z.imag))]
            w.writerow(row)
