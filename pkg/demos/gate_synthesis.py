"""Synthesize every Clifford as a single-shot drive and check the result.

Each of the 24 single-qubit Cliffords is turned into drive constants
(alpha, theta, phi), propagated at pulse level and compared with its target.
The auxiliary level returns to itself at the end of every gate.
"""
import numpy as np

from holoqutrit import clifford, core, dynamics, pulses

TAU = 100e-9

print(f"{'idx':>3} {'name':>5} {'alpha':>8} {'theta':>8} {'phi':>8} {'distance':>10} {'|e> left':>9}")
for entry in clifford.table():
    sched = pulses.synthesize(entry.spec, TAU)
    u = dynamics.propagate_unitary(sched).final_unitary
    dist = core.phase_invariant_distance(core.computational_block(u), entry.unitary)
    left = dynamics.cyclicity_residual(sched)
    print(f"{entry.index:>3} {entry.name:>5} {sched.alpha:8.4f} {sched.theta:8.4f} "
          f"{sched.phi:8.4f} {dist:10.2e} {left:9.1e}")

# The C8 gate in the computational basis, aligned to the textbook global phase.
sched = pulses.synthesize(clifford.clifford_lookup(8), TAU)
u = core.computational_block(dynamics.propagate_unitary(sched).final_unitary)
target = 0.5 * np.array([[1 - 1j, -1 - 1j], [1 - 1j, 1 + 1j]])
print("\nC8 after phase alignment:\n", np.round(core.align_phase(u, target), 6))
