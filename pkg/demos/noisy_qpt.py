"""Process tomography of H, X/2 and C8 with and without decoherence.

The 16 preparations and analysis rotations are ideal; only the gate itself
is simulated with the Lindblad model. Two fidelity figures are printed: the
normalized Hilbert-Schmidt fidelity and the unnormalized overlap
|Tr(chi chi_ideal^dag)|, which is first order in incoherent error.
"""
from holoqutrit import clifford, dynamics, tomography

GATES = {"H": 19, "X/2": 12, "C8": 8}

for label, noise in (("noiseless", dynamics.NoiseModel.off()), ("noisy", dynamics.NoiseModel())):
    print(f"-- {label}")
    for name, idx in GATES.items():
        res = tomography.run_qpt(clifford.clifford_lookup(idx), noise)
        s = res.summary()
        print(f"{name:>4}: F={s['fidelity']:.6f}  overlap={s['overlap_fidelity']:.4f}  "
              f"Tr chi~={s['trace_reduced_chi']:.5f}")

# Readout errors with and without correction for the Hadamard.
ro = tomography.ReadoutModel()
for corrected in (False, True):
    res = tomography.run_qpt(clifford.clifford_lookup(19), dynamics.NoiseModel(), readout=ro,
                             correct_readout=corrected)
    print(f"readout corrected={corrected}: F={res.fidelity:.5f}")
