import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from holoqutrit.clifford import clifford_lookup, table
from holoqutrit.core import GateSpec, gate_unitary, phase_invariant_distance, rotation
from holoqutrit.pulses import (DriveSchedule, alpha_from_gamma, envelope, gamma_from_alpha,
                               peak_for_area, register_shape, sample_drives, synthesize,
                               write_waveform_csv)

TAU = 100e-9


@pytest.mark.parametrize("alpha,gamma", [
    (0.0, np.pi),
    (-np.pi / 6, np.pi / 2),
    (-np.arcsin(1 / 3), 2 * np.pi / 3),
])
def test_gamma_alpha_pairs(alpha, gamma):
    assert gamma_from_alpha(alpha) == pytest.approx(gamma, abs=1e-14)
    assert alpha_from_gamma(gamma) == pytest.approx(alpha, abs=1e-14)


def test_alpha_for_two_thirds_turn():
    assert alpha_from_gamma(2 * np.pi / 3) == pytest.approx(-0.3398, abs=1e-4)


def test_angle_range_errors():
    with pytest.raises(ValueError):
        gamma_from_alpha(2.0)
    with pytest.raises(ValueError):
        alpha_from_gamma(0.0)
    with pytest.raises(ValueError):
        alpha_from_gamma(7.0)


@given(st.floats(1e-6, 2 * np.pi))
def test_alpha_gamma_roundtrip(gamma):
    assert gamma_from_alpha(alpha_from_gamma(gamma)) == pytest.approx(gamma, abs=1e-12)


def test_synthesize_hadamard():
    s = synthesize(clifford_lookup(19), TAU)
    assert (s.alpha, s.phi) == (0.0, 0.0)
    assert s.theta == pytest.approx(np.pi / 4, abs=1e-15)
    assert s.omega0 * s.tau == pytest.approx(4 * np.pi, rel=1e-12)


def test_synthesize_x_half():
    s = synthesize(clifford_lookup(12), TAU)
    assert s.alpha == pytest.approx(-np.pi / 6, abs=1e-15)
    assert s.theta == pytest.approx(np.pi / 2, abs=1e-15)
    assert s.phi == 0.0


def test_synthesize_c8_uses_axis_polar_angle():
    s = synthesize(clifford_lookup(8), TAU)
    assert s.alpha == pytest.approx(-np.arcsin(1 / 3), abs=1e-15)
    assert s.theta == pytest.approx(np.arccos(1 / np.sqrt(3)), abs=1e-15)
    assert s.phi == pytest.approx(np.pi / 4, abs=1e-15)


def test_identity_is_idle():
    s = synthesize(clifford_lookup(0), TAU)
    assert s.is_idle and s.tau == TAU


def test_z_axis_phi_convention():
    for idx in (3, 16, 17):
        assert synthesize(clifford_lookup(idx)).phi == 0.0


def test_synthesis_round_trip_all_cliffords():
    for e in table()[1:]:
        s = synthesize(e.spec, TAU)
        rebuilt = rotation(gamma_from_alpha(s.alpha), s.axis)
        assert phase_invariant_distance(rebuilt, gate_unitary(e.spec)) < 1e-12


@settings(max_examples=50)
@given(gamma=st.floats(0.05, 2 * np.pi - 0.05), theta=st.floats(0, np.pi), phi=st.floats(-np.pi, np.pi))
def test_synthesis_round_trip_random(gamma, theta, phi):
    axis = (np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))
    spec = GateSpec(gamma, axis)
    s = synthesize(spec, TAU)
    assert phase_invariant_distance(rotation(s.gamma, s.axis), gate_unitary(spec)) < 1e-11


def test_envelope_values():
    s = synthesize(clifford_lookup(19), TAU)
    assert envelope(0.0, s) == 0.0
    assert envelope(TAU, s) == pytest.approx(0.0, abs=1e-6 * s.omega0)
    assert envelope(TAU / 2, s) == pytest.approx(s.omega0, rel=1e-15)
    with pytest.raises(ValueError):
        envelope(1.1 * TAU, s)


def test_area_condition_by_quadrature():
    for e in table()[1:]:
        s = synthesize(e.spec, TAU)
        half_area, _ = quad(lambda t: envelope(t, s) / 2, 0, TAU, epsabs=0, epsrel=1e-13)
        assert half_area == pytest.approx(np.pi, rel=1e-9)
        assert s.half_area() == pytest.approx(np.pi, rel=1e-9)


def test_area_normalization_other_shape():
    register_shape("triangle", lambda s: 1 - np.abs(2 * np.asarray(s) - 1))
    s = synthesize(clifford_lookup(1), TAU, shape="triangle")
    assert s.omega0 == pytest.approx(peak_for_area(TAU, "triangle"))
    assert s.half_area() == pytest.approx(np.pi, rel=1e-9)


def test_sample_drives_idle_zero():
    samples = sample_drives(DriveSchedule.idle(TAU), 11)
    assert all(x.delta_p == 0 and x.omega_p == 0 and x.omega_s == 0 for x in samples)
    with pytest.raises(ValueError):
        sample_drives(DriveSchedule.idle(TAU), 1)


def test_sample_drives_hadamard_midpoint():
    s = synthesize(clifford_lookup(19), TAU)
    mid = sample_drives(s, 101)[50]
    assert mid.t == pytest.approx(TAU / 2)
    assert mid.delta_p == 0
    assert abs(mid.omega_p) == pytest.approx(s.omega0 * np.cos(np.pi / 8), rel=1e-14)
    assert abs(mid.omega_s) == pytest.approx(s.omega0 * np.sin(np.pi / 8), rel=1e-14)


def test_sample_drives_x_half_detuning():
    s = synthesize(clifford_lookup(12), TAU)
    mid = sample_drives(s, 101)[50]
    assert mid.delta_p == pytest.approx(-s.omega0 / 2, rel=1e-14)


def test_sample_invariants_and_continuity():
    s = synthesize(clifford_lookup(5), TAU)
    n = 401
    samples = sample_drives(s, n)
    for x in samples:
        om = envelope(x.t, s)
        assert x.delta_p == pytest.approx(om * np.sin(s.alpha), abs=1e-6)
        assert abs(x.omega_p) == pytest.approx(om * np.cos(s.alpha) * np.cos(s.theta / 2), abs=1e-6)
        assert abs(x.omega_s) == pytest.approx(om * np.cos(s.alpha) * np.sin(s.theta / 2), abs=1e-6)
        if abs(x.omega_s) > 1:
            assert np.angle(x.omega_s) == pytest.approx(-s.phi, abs=1e-12)
    om = np.array([abs(x.omega_p) for x in samples])
    # sin^2 has slope at most pi * omega0 / tau.
    assert np.abs(np.diff(om)).max() <= np.pi * s.omega0 / (n - 1) * 1.0001


def test_schedule_json_roundtrip(tmp_path):
    s = synthesize(clifford_lookup(8), TAU)
    data = json.loads(json.dumps(s.to_json()))
    assert set(data) == {"alpha", "theta", "phi", "omega0", "tau", "shape", "is_idle"}
    assert DriveSchedule.from_json(data) == s
    path = tmp_path / "w.csv"
    write_waveform_csv(path, sample_drives(s, 5))
    lines = path.read_text().splitlines()
    assert lines[0] == "t,delta_p,omega_p_re,omega_p_im,omega_s_re,omega_s_im"
    assert len(lines) == 6
