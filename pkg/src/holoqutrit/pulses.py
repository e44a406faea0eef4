"""Single-shot drive synthesis.

A target rotation ``exp(-i gamma n.sigma/2)`` maps onto three constants:
``alpha`` sets the angle through ``gamma = pi (1 + sin alpha)`` and
``(theta, phi)`` are the polar angles of ``n``. The pump detuning and both
Rabi envelopes share one envelope ``Omega(t)`` whose half-area is pi.
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from typing import Callable, Dict

import numpy as np
from scipy.integrate import quad

from .core import GateSpec

DEFAULT_TAU = 100e-9


def _sin2(s):
    return np.sin(np.pi * s) ** 2


# Unit-peak envelope shapes as functions of reduced time s = t / tau in [0, 1].
SHAPES: Dict[str, Callable] = {"sin2": _sin2}


def register_shape(name: str, func: Callable) -> None:
    """Add an envelope shape; ``func`` maps reduced time in [0, 1] to a unit-peak profile."""
    SHAPES[name] = func


def _shape_integral(shape: str) -> float:
    """Integral of the unit-peak shape over reduced time."""
    if shape == "sin2":
        return 0.5
    try:
        func = SHAPES[shape]
    except KeyError:
        raise ValueError(f"unknown envelope shape {shape!r}") from None
    val, _ = quad(func, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def peak_for_area(tau: float, shape: str = "sin2") -> float:
    """Peak amplitude giving half-area pi, i.e. ``4 pi / tau`` for sin^2."""
    return 2 * np.pi / (tau * _shape_integral(shape))


@dataclass(frozen=True)
class DriveSchedule:
    alpha: float
    theta: float
    phi: float
    omega0: float
    tau: float
    shape: str = "sin2"
    is_idle: bool = False

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("gate duration must be positive")
        if not -np.pi / 2 - 1e-15 <= self.alpha <= np.pi / 2 + 1e-15:
            raise ValueError(f"alpha={self.alpha} outside [-pi/2, pi/2]")
        if not -1e-15 <= self.theta <= np.pi + 1e-15:
            raise ValueError(f"theta={self.theta} outside [0, pi]")
        if self.shape not in SHAPES:
            raise ValueError(f"unknown envelope shape {self.shape!r}")

    @classmethod
    def idle(cls, tau: float = DEFAULT_TAU) -> "DriveSchedule":
        return cls(alpha=0.0, theta=0.0, phi=0.0, omega0=0.0, tau=tau, is_idle=True)

    def scaled(self, factor: float) -> "DriveSchedule":
        """Copy with the peak amplitude multiplied by ``factor`` (breaks the area condition)."""
        return DriveSchedule(self.alpha, self.theta, self.phi, self.omega0 * factor,
                             self.tau, self.shape, self.is_idle)

    @property
    def gamma(self) -> float:
        return 0.0 if self.is_idle else gamma_from_alpha(self.alpha)

    @property
    def axis(self) -> np.ndarray:
        return np.array([np.sin(self.theta) * np.cos(self.phi),
                         np.sin(self.theta) * np.sin(self.phi),
                         np.cos(self.theta)])

    def envelope(self, t):
        return envelope(t, self)

    def half_area(self) -> float:
        """Numerical quadrature of ``Omega(t)/2`` over the gate."""
        if self.is_idle:
            return 0.0
        f = SHAPES[self.shape]
        val, _ = quad(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
        return 0.5 * self.omega0 * self.tau * val

    def to_json(self) -> dict:
        return {k: (bool(v) if k == "is_idle" else v) for k, v in asdict(self).items()}

    @classmethod
    def from_json(cls, data) -> "DriveSchedule":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(**data)


@dataclass(frozen=True)
class DriveSample:
    t: float
    delta_p: float
    omega_p: complex
    omega_s: complex


def gamma_from_alpha(alpha: float) -> float:
    if not -np.pi / 2 - 1e-15 <= alpha <= np.pi / 2 + 1e-15:
        raise ValueError(f"alpha={alpha} outside [-pi/2, pi/2]")
    return float(np.pi * (1 + np.sin(alpha)))


def alpha_from_gamma(gamma: float) -> float:
    if not 0 < gamma <= 2 * np.pi + 1e-12:
        raise ValueError(f"rotation angle {gamma} outside (0, 2pi]")
    return float(np.arcsin(np.clip(gamma / np.pi - 1, -1.0, 1.0)))


def synthesize(spec: GateSpec, tau: float = DEFAULT_TAU, shape: str = "sin2") -> DriveSchedule:
    """Drive constants realizing ``spec`` in one shot of duration ``tau``.

    The identity (``gamma == 0``) becomes an idle wait of the same duration.
    ``gamma == 2 pi`` maps to ``alpha = pi/2``, where both Rabi drives vanish;
    such a rotation has to be split by the caller.
    """
    if tau <= 0:
        raise ValueError("gate duration must be positive")
    if spec.is_identity:
        return DriveSchedule.idle(tau)
    nx, ny, nz = spec.axis
    # Same as arccos(nz), but well conditioned near the poles.
    theta = float(np.arctan2(np.hypot(nx, ny), nz))
    phi = 0.0 if np.sin(theta) < 1e-12 else float(np.arctan2(ny, nx))
    return DriveSchedule(
        alpha=alpha_from_gamma(spec.gamma),
        theta=theta,
        phi=phi,
        omega0=peak_for_area(tau, shape),
        tau=tau,
        shape=shape,
    )


def _check_time(t, tau):
    t = np.asarray(t, dtype=float)
    if np.any(t < -1e-12 * tau) or np.any(t > tau * (1 + 1e-12)):
        raise ValueError(f"time outside [0, {tau}]")
    return t


def envelope(t, schedule: DriveSchedule):
    """``Omega(t)`` in rad/s; vectorized over ``t``."""
    t = _check_time(t, schedule.tau)
    if schedule.is_idle:
        return np.zeros_like(t) if t.ndim else 0.0
    out = schedule.omega0 * SHAPES[schedule.shape](np.clip(t / schedule.tau, 0.0, 1.0))
    return out if out.ndim else float(out)


def drive_amplitudes(t, schedule: DriveSchedule):
    """``(delta_p, omega_p, omega_s)`` at time(s) ``t``."""
    om = np.asarray(envelope(t, schedule))
    a, th, ph = schedule.alpha, schedule.theta, schedule.phi
    delta_p = om * np.sin(a)
    omega_p = om * np.cos(a) * np.cos(th / 2) + 0j
    omega_s = om * np.cos(a) * np.sin(th / 2) * np.exp(-1j * ph)
    return delta_p, omega_p, omega_s


def sample_drives(schedule: DriveSchedule, n_samples: int) -> list:
    if n_samples < 2:
        raise ValueError("need at least two samples")
    ts = np.linspace(0.0, schedule.tau, n_samples)
    dp, op, os_ = drive_amplitudes(ts, schedule)
    return [DriveSample(float(t), float(d), complex(p), complex(s))
            for t, d, p, s in zip(ts, dp, op, os_)]


def write_waveform_csv(path, samples) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "delta_p", "omega_p_re", "omega_p_im", "omega_s_re", "omega_s_im"])
        for s in samples:
            w.writerow([repr(s.t), repr(s.delta_p), repr(s.omega_p.real), repr(s.omega_p.imag),
                        repr(s.omega_s.real), repr(s.omega_s.imag)])
