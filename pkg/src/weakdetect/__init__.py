"""Two-copy weak-value entanglement detection for two-qubit states."""

from .states import (
    PureAmplitudes,
    TwoQubitState,
    Verdict,
    bell_phi_plus,
    det_ptb,
    det_ptb_expansion,
    entanglement_estimate,
    negativity,
    ppt_oracle,
    random_mixed,
    random_pure,
    trace_distance,
    validate,
    werner,
)
from .protocol import (
    DetectionReport,
    WeakValueSet,
    build_hamiltonian,
    build_local_hamiltonian,
    detect,
    detect_pure_local,
    diagonals_from_postselection,
    exact_weak_value,
    reconstruct,
    weak_values_all,
)

__version__ = "0.1.0"

__all__ = [
    "PureAmplitudes",
    "TwoQubitState",
    "Verdict",
    "bell_phi_plus",
    "det_ptb",
    "det_ptb_expansion",
    "entanglement_estimate",
    "negativity",
    "ppt_oracle",
    "random_mixed",
    "random_pure",
    "trace_distance",
    "validate",
    "werner",
    "DetectionReport",
    "WeakValueSet",
    "build_hamiltonian",
    "build_local_hamiltonian",
    "detect",
    "detect_pure_local",
    "diagonals_from_postselection",
    "exact_weak_value",
    "reconstruct",
    "weak_values_all",
    "__version__",
]
