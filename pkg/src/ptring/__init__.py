"""Simulation tools for a PT-symmetric tight-binding ring with gain/loss impurities."""

from ptring.errors import (
    ConfigParseError,
    ConfigurationError,
    DomainError,
    NoTransitionError,
    NumericalError,
    PTRingError,
)
from ptring.hamiltonian import (
    HamiltonianMatrix,
    ParityMap,
    RingConfig,
    build_hamiltonian,
    build_parity,
    check_pt_symmetry,
    mirror_config,
    mirror_site,
)
from ptring.spectrum import (
    BetheRoot,
    Phase,
    SpectralReport,
    SpectralResult,
    asymptotic_condition,
    bethe_residual,
    bethe_roots,
    diagonalize,
    find_gamma_pt,
    match_eigenvalues,
    spectral_checks,
)
from ptring.dynamics import (
    Propagator,
    Trajectory,
    WaveState,
    evolve,
    make_propagator,
    momentum_matrix_element,
    reciprocal_intensity,
    steady_state_momentum,
)
from ptring.sweeps import SweepGrid, SweepRecord, chirality_curve, phase_diagram

__version__ = "0.1.0"

__all__ = [
    "BetheRoot",
    "ConfigParseError",
    "ConfigurationError",
    "DomainError",
    "HamiltonianMatrix",
    "NoTransitionError",
    "NumericalError",
    "PTRingError",
    "ParityMap",
    "Phase",
    "Propagator",
    "RingConfig",
    "SpectralReport",
    "SpectralResult",
    "SweepGrid",
    "SweepRecord",
    "Trajectory",
    "WaveState",
    "asymptotic_condition",
    "bethe_residual",
    "bethe_roots",
    "build_hamiltonian",
    "build_parity",
    "check_pt_symmetry",
    "chirality_curve",
    "diagonalize",
    "evolve",
    "find_gamma_pt",
    "make_propagator",
    "match_eigenvalues",
    "mirror_config",
    "mirror_site",
    "momentum_matrix_element",
    "phase_diagram",
    "reciprocal_intensity",
    "spectral_checks",
    "steady_state_momentum",
]
