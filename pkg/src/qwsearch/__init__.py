"""Spatial search, state transfer and Bell-pair generation by
continuous-time quantum walk on random graphs."""

from .dynamics import (
    EvolutionTrace,
    Hamiltonian,
    evolve,
    evolve_ode,
    state_basis,
    state_uniform,
    state_uniform_excluding,
    trace_probability,
)
from .graphs import Graph, complete, erdos_renyi, is_connected, random_regular
from .protocols import (
    ProtocolResult,
    ProtocolSpec,
    build_bell_hamiltonian,
    build_transfer_hamiltonian,
    effective_3level,
    run_bell,
    run_transfer,
)
from .search import (
    PerturbationPrediction,
    SearchInstance,
    build_search_hamiltonian,
    check_optimality_condition,
    choose_gamma,
    delta_estimate,
    lemma1_bound,
    lemma1_rescaling,
    perturbation_prediction,
    run_search,
)
from .spectra import (
    Spectrum,
    SpectralReport,
    eigendecompose,
    empirical_bulk_density,
    normalized_laplacian,
    semicircle_density,
    spectral_report,
)

__version__ = "0.1.0"

__all__ = [
    "EvolutionTrace",
    "Graph",
    "Hamiltonian",
    "PerturbationPrediction",
    "ProtocolResult",
    "ProtocolSpec",
    "SearchInstance",
    "SpectralReport",
    "Spectrum",
    "build_bell_hamiltonian",
    "build_search_hamiltonian",
    "build_transfer_hamiltonian",
    "check_optimality_condition",
    "choose_gamma",
    "complete",
    "delta_estimate",
    "effective_3level",
    "eigendecompose",
    "empirical_bulk_density",
    "erdos_renyi",
    "evolve",
    "evolve_ode",
    "is_connected",
    "lemma1_bound",
    "lemma1_rescaling",
    "normalized_laplacian",
    "perturbation_prediction",
    "random_regular",
    "run_bell",
    "run_search",
    "run_transfer",
    "semicircle_density",
    "spectral_report",
    "state_basis",
    "state_uniform",
    "state_uniform_excluding",
    "trace_probability",
]
