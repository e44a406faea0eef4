"""Single-shot nonadiabatic holonomic gates on a three-level ladder.

Pulse synthesis, rotating-frame dynamics (closed and Lindblad), three-level
process tomography and Clifford randomized benchmarking. Level ordering is
``(|0>, |e>, |1>)`` throughout.
"""
__version__ = "0.1.0"

from .core import GateSpec, QutritState, gate_unitary, phase_invariant_distance
from .clifford import (clifford_compose, clifford_inverse, clifford_lookup, clifford_unitary,
                       table)
from .pulses import (DriveSchedule, alpha_from_gamma, envelope, gamma_from_alpha,
                     sample_drives, synthesize)
from .dynamics import (NoiseModel, bright_dark, cyclicity_residual, hamiltonian_at,
                       parallel_transport_residual, propagate_lindblad, propagate_unitary)
from .tomography import (ChiMatrix, ReadoutModel, enumerate_preparations, leakage_trace,
                         process_fidelity, qpt_chi, qst_reconstruct, run_qpt)
from .benchmarking import (RBConfig, average_error, fit_decay, generate_sequence,
                           interleaved_fidelity, run_rb)
