"""Spectra, singularities and stationary transport of a gain/loss ring.

A tight-binding ring with unit hoppings carries two complex onsite defects
a +/- i*eta acting as a source and a drain.  This package solves the model
both by brute-force diagonalization and through its closed-form quasi-
momentum equation, tracks the spectrum against the gain/loss strength,
locates exceptional/diabolical/reverse-exceptional points, predicts the
gain/loss-independent (singular) levels and computes the stationary bond
currents of the symmetric phase.
"""

from .config import ConfigError, NumericalError, RingConfig, Tolerances, DEFAULT_TOLS
from .ring import (
    BoundaryMatrix,
    DegenerateThetaError,
    EigenPair,
    boundary_matrix,
    build_hamiltonian,
    canonical_theta,
    char_fn,
    char_scale,
    eigvec_from_theta,
    energy_of,
    theta_of,
)
from .oracle import OracleResult, dense_eig, match_multisets, multiset_distance, solve_spectrum
from .asymptotics import (
    LargeEtaClass,
    LargeEtaKind,
    classify_large_eta,
    delta_theta_a,
    delta_theta_eta,
    localized_pair_energy,
)
from .sweep import (
    EventKind,
    SingularityEvent,
    SpectrumBranch,
    SweepResult,
    count_real,
    detect_events,
    pt_threshold,
    sweep_spectrum,
)
from .transport import (
    BranchWeights,
    Directionality,
    FluxProfile,
    TransportClass,
    branch_flux_closed_form,
    branch_weights,
    classify_directionality,
    decoupled_branch_energies,
    local_flux,
)
from .singular import (
    SingularKind,
    SingularPrediction,
    accidental_singular,
    circle_law_check,
    is_opaque,
    structural_singular,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryMatrix",
    "BranchWeights",
    "ConfigError",
    "DEFAULT_TOLS",
    "DegenerateThetaError",
    "Directionality",
    "EigenPair",
    "EventKind",
    "FluxProfile",
    "LargeEtaClass",
    "LargeEtaKind",
    "NumericalError",
    "OracleResult",
    "RingConfig",
    "SingularKind",
    "SingularPrediction",
    "SingularityEvent",
    "SpectrumBranch",
    "SweepResult",
    "Tolerances",
    "TransportClass",
    "accidental_singular",
    "boundary_matrix",
    "branch_flux_closed_form",
    "branch_weights",
    "build_hamiltonian",
    "canonical_theta",
    "char_fn",
    "char_scale",
    "circle_law_check",
    "classify_directionality",
    "classify_large_eta",
    "count_real",
    "decoupled_branch_energies",
    "delta_theta_a",
    "delta_theta_eta",
    "dense_eig",
    "detect_events",
    "eigvec_from_theta",
    "energy_of",
    "is_opaque",
    "local_flux",
    "localized_pair_energy",
    "match_multisets",
    "multiset_distance",
    "pt_threshold",
    "solve_spectrum",
    "structural_singular",
    "sweep_spectrum",
    "theta_of",
]
