"""Reference and interleaved Clifford randomized benchmarking.

Every Clifford is a single-shot pulse propagated through the Lindblad model
once; random sequences reuse those maps. The decay A p^m + B gives the
average error r = (1 - p)/2, and interleaving a gate gives its fidelity.
"""
from holoqutrit import benchmarking as rb
from holoqutrit.dynamics import NoiseModel

records, ref = rb.run_rb(rb.RBConfig(k=50, seed=1, noise=NoiseModel()))
for r in records:
    print(f"m={r.m:3d}  survival={r.mean:.4f} +- {r.stddev:.4f}")
print(f"reference: p={ref.p:.5f} +- {ref.p_err:.5f}, r={ref.r:.5f}")

for name, idx in (("I", 0), ("X", 1), ("H", 19), ("X/2", 12), ("Z/2", 16)):
    _, fit = rb.run_rb(rb.RBConfig(k=50, seed=2, noise=NoiseModel(), interleaved_gate=idx))
    print(f"interleaved {name:>3}: p={fit.p:.5f}  F_gate={rb.interleaved_fidelity(fit.p, ref.p):.4f}")
