"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` and read the "acceptance criteria"
section of the terminal summary.
"""
import time

import numpy as np
import pytest

from holoqutrit.benchmarking import (DEFAULT_M_VALUES, RBConfig, RBRecord, fit_decay,
                                     interleaved_fidelity, run_rb)
from holoqutrit.clifford import NAMES, clifford_lookup, table
from holoqutrit.core import E, G, ONE, align_phase, computational_block, ket, projector
from holoqutrit.core import phase_invariant_distance
from holoqutrit.dynamics import (NoiseModel, bright_dark, cyclicity_residual,
                                 parallel_transport_residual, propagate_lindblad,
                                 propagate_unitary)
from holoqutrit.pulses import DriveSchedule, synthesize
from holoqutrit.tomography import chi_from_kraus, enumerate_preparations, qpt_chi, run_qpt

TAU = 100e-9
STEPS = 2000
NOISY_GATES = {"H": NAMES["H"], "X/2": NAMES["X/2"], "C8": 8}
INTERLEAVED = {"X": NAMES["X"], "H": NAMES["H"], "X/2": NAMES["X/2"], "Z/2": NAMES["Z/2"],
               "C8": 8, "C4": 4}


@pytest.fixture(scope="module")
def reference_rb():
    start = time.perf_counter()
    records, fit = run_rb(RBConfig(m_values=DEFAULT_M_VALUES, k=50, seed=1, noise=NoiseModel(),
                                   tau=TAU, steps=STEPS))
    return records, fit, time.perf_counter() - start


def test_criterion_1_gate_synthesis(criterion):
    start = time.perf_counter()
    worst = 0.0
    for e in table():
        u = propagate_unitary(synthesize(e.spec, TAU), STEPS).final_unitary
        worst = max(worst, phase_invariant_distance(computational_block(u), e.unitary))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-6 and elapsed < 5.0
    criterion(1, "gate synthesis", ok, f"max distance {worst:.2e} (<1e-6), {elapsed:.2f} s (<5 s)")
    assert ok


def test_criterion_2_holonomy_conditions(criterion):
    cyc = pt = 0.0
    dark = 1.0
    bright = 0.0
    for e in table():
        s = synthesize(e.spec, TAU)
        cyc = max(cyc, cyclicity_residual(s, STEPS))
        pt = max(pt, parallel_transport_residual(s, 200, STEPS))
        if s.is_idle:
            continue
        u = propagate_unitary(s, STEPS).final_unitary
        b, d = bright_dark(s.theta, s.phi)
        dark = min(dark, abs(np.vdot(d.amplitudes, u @ d.amplitudes)) ** 2)
        phase = np.exp(-1j * np.pi * (1 + np.sin(s.alpha)))
        bright = max(bright, abs(np.vdot(b.amplitudes, u @ b.amplitudes) - phase))
    ok = cyc < 1e-8 and pt < 1e-8 and dark > 1 - 1e-10 and bright < 1e-8
    criterion(2, "holonomy conditions", ok,
              f"cyclicity {cyc:.1e}, transport {pt:.1e}, dark 1-{1 - dark:.1e}, bright {bright:.1e}")
    assert ok


def test_criterion_3_c8_matrix(criterion):
    u = computational_block(propagate_unitary(synthesize(clifford_lookup(8), TAU), STEPS)
                            .final_unitary)
    target = 0.5 * np.array([[1 - 1j, -1 - 1j], [1 - 1j, 1 + 1j]])
    err = float(np.abs(align_phase(u, target) - target).max())
    ok = err < 1e-6
    criterion(3, "C8 matrix", ok, f"max entry error {err:.2e} (<1e-6)")
    assert ok


def _random_kraus(rng, n=9):
    z = rng.normal(size=(3 * n, 3)) + 1j * rng.normal(size=(3 * n, 3))
    q, _ = np.linalg.qr(z)
    return [q[3 * i:3 * i + 3] for i in range(n)]


def test_criterion_4_qpt_pipeline(criterion):
    worst_f = worst_l = 1.0
    slowest = 0.0
    for e in table():
        start = time.perf_counter()
        res = run_qpt(e.spec, tau=TAU, steps=STEPS)
        slowest = max(slowest, time.perf_counter() - start)
        worst_f, worst_l = min(worst_f, res.fidelity), min(worst_l, res.leakage)
    rng = np.random.default_rng(20240)
    inputs = enumerate_preparations()
    round_trip = 0.0
    for _ in range(20):
        kraus = _random_kraus(rng)
        outputs = [sum(k @ r @ k.conj().T for k in kraus) for r in inputs]
        chi = qpt_chi(inputs, outputs)
        round_trip = max(round_trip, np.linalg.norm(chi.entries - chi_from_kraus(kraus).entries))
    ok = worst_f > 0.999999 and worst_l > 0.999999 and round_trip < 1e-8 and slowest < 10
    criterion(4, "QPT pipeline", ok,
              f"min F {worst_f:.9f}, min Tr chi~ {worst_l:.9f}, round trip {round_trip:.1e}, "
              f"slowest gate {slowest:.2f} s")
    assert ok


def test_criterion_5_noisy_fidelity(criterion):
    start = time.perf_counter()
    fids = {name: run_qpt(clifford_lookup(i), NoiseModel(), tau=TAU, steps=STEPS)
            for name, i in NOISY_GATES.items()}
    elapsed = time.perf_counter() - start
    ok = all(0.985 <= r.fidelity <= 0.999 for r in fids.values()) and elapsed < 60
    detail = ", ".join(f"{n} {r.fidelity:.5f}" for n, r in fids.items())
    overlap = ", ".join(f"{n} {r.summary()['overlap_fidelity']:.4f}" for n, r in fids.items())
    criterion(5, "noisy QPT fidelity band [0.985, 0.999]", ok,
              f"{detail}; {elapsed:.1f} s; unnormalized overlap (diagnostic) {overlap}")
    assert ok


def test_criterion_6_reference_rb(criterion, reference_rb):
    _, fit, elapsed = reference_rb
    _, fit0 = run_rb(RBConfig(m_values=DEFAULT_M_VALUES, k=50, seed=1, noise=NoiseModel.off(),
                              tau=TAU, steps=STEPS))
    ok = 0.976 <= fit.p <= 0.992 and abs(fit0.p - 1) < 1e-4 and elapsed < 600
    criterion(6, "reference RB", ok,
              f"p_ref {fit.p:.5f} in [0.976, 0.992], noiseless p {fit0.p:.6f}, {elapsed:.1f} s")
    assert ok


def test_criterion_7_interleaved_rb(criterion, reference_rb):
    _, ref, _ = reference_rb
    implied = (1 + ref.p) / 2

    def f_gate(index):
        _, fit = run_rb(RBConfig(m_values=DEFAULT_M_VALUES, k=50, seed=2, noise=NoiseModel(),
                                 interleaved_gate=index, tau=TAU, steps=STEPS))
        return interleaved_fidelity(fit.p, ref.p)

    f_id = f_gate(0)
    gates = {name: f_gate(i) for name, i in INTERLEAVED.items()}
    lam = 0.01
    _, dep = run_rb(RBConfig(m_values=DEFAULT_M_VALUES, k=50, seed=3, noise=NoiseModel.off(),
                             depolarizing=lam, tau=TAU, steps=STEPS))
    dep_ok = abs(dep.p - (1 - lam)) <= max(2 * dep.p_err, 1e-9)
    ok = (abs(f_id - implied) <= 0.003 and all(0.985 <= f <= 0.999 for f in gates.values())
          and dep_ok)
    detail = ", ".join(f"{n} {f:.4f}" for n, f in gates.items())
    criterion(7, "interleaved RB", ok,
              f"identity {f_id:.4f} vs implied {implied:.4f}; {detail}; "
              f"depolarizing p {dep.p:.6f} vs {1 - lam}")
    assert ok


def test_criterion_8_fit_robustness(criterion):
    ms = np.array(DEFAULT_M_VALUES, dtype=float)
    exact = fit_decay([RBRecord(int(m), [0.5 * 0.99 ** m + 0.5]) for m in ms])
    exact_err = max(abs(exact.A - 0.5), abs(exact.B - 0.5), abs(exact.p - 0.99))
    rng = np.random.default_rng(8)
    hits = {"A": 0, "B": 0, "p": 0}
    for _ in range(100):
        ys = 0.5 * 0.99 ** ms + 0.5 + rng.normal(0, 0.005, ms.size)
        fit = fit_decay([RBRecord(int(m), [y]) for m, y in zip(ms, ys)], sigma=[0.005] * ms.size)
        errs = np.sqrt(np.clip(np.diag(fit.covariance), 0, None))
        for key, est, true, s in zip("ABp", (fit.A, fit.B, fit.p), (0.5, 0.5, 0.99), errs):
            hits[key] += abs(est - true) <= 2 * s
    # Nominal 2-sigma coverage is 95 %; 90 of 100 is the Monte-Carlo acceptance floor.
    ok = exact_err < 1e-9 and min(hits.values()) >= 90
    criterion(8, "fit robustness", ok,
              f"exact error {exact_err:.1e}; 2-sigma coverage A {hits['A']}, B {hits['B']}, "
              f"p {hits['p']} of 100")
    assert ok


def test_criterion_9_lindblad_oracles(criterion):
    noise = NoiseModel()
    idle = DriveSchedule.idle(TAU)

    def final(rho):
        return propagate_lindblad(idle, noise, rho, STEPS).final_rho

    def coh(a, b):
        v = (ket(a) + ket(b)) / np.sqrt(2)
        return abs(final(np.outer(v, v.conj()))[a, b])

    checks = {
        "e->0 relaxation": (final(projector(E))[E, E].real, np.exp(-TAU / noise.t1_e0)),
        "1->e relaxation": (final(projector(ONE))[ONE, ONE].real, np.exp(-TAU / noise.t1_1e)),
        "0-e coherence": (coh(G, E),
                          0.5 * np.exp(-TAU / (2 * noise.t1_e0) - TAU / noise.tphi_e0)),
        "e-1 coherence": (coh(E, ONE),
                          0.5 * np.exp(-TAU * (1 / (2 * noise.t1_e0) + 1 / (2 * noise.t1_1e)
                                               + 1 / noise.tphi_e0 + 1 / noise.tphi_1e))),
    }
    rel = {k: abs(got - want) / want for k, (got, want) in checks.items()}
    ok = max(rel.values()) < 1e-6
    criterion(9, "Lindblad oracles", ok, ", ".join(f"{k} rel {v:.1e}" for k, v in rel.items()))
    assert ok
