"""Numerical laboratory for the strength/duration/accuracy trade-off of
measurements on a two-level system."""
from .linalg import fidelity, kron, operator_norm, partial_trace_system, psd_sqrt, unitary_exp
from .process import (
    BoundReport,
    MeasurementProcess,
    PointerOutcome,
    Pvm,
    apparatus_states,
    bound_report,
    optimal_pointer,
    pointer_statistics,
    total_hamiltonian,
)

__version__ = "0.1.0"
