"""Entanglement-to-coherence conversion for single-qubit ensembles.

A Schmidt-form two-qubit state and a POVM on Alice's side define an ensemble
on Bob's side. This package computes that ensemble, its basis-free coherence,
Holevo quantity and accessible information, and sweeps these over entanglement
for a family of rotation-symmetric POVMs.
"""

from .coherence import CoherenceResult, basis_free_coherence, ensemble_coherence_in_basis, relative_entropy_coherence
from .entangle import (
    Ensemble,
    Povm,
    SchmidtState,
    alpha_for_entanglement,
    dual_map,
    entanglement,
    measurement_entropy,
    povm_uncertainty,
)
from .infotheory import AccessibleInfoResult, accessible_information, coherence_lower_bound, holevo, mutual_information
from .qubit import DomainError, InvariantError, MeasurementBasis, binary_entropy, von_neumann_entropy
from .sweeps import SweepConfig, run_sweep
from .sympovm import SweepRecord, SymPovmSpec, build_sym_povm, gamma_optimized_coherence, sym_ensemble

__version__ = "0.1.0"

__all__ = [
    "AccessibleInfoResult",
    "CoherenceResult",
    "DomainError",
    "Ensemble",
    "InvariantError",
    "MeasurementBasis",
    "Povm",
    "SchmidtState",
    "SweepConfig",
    "SweepRecord",
    "SymPovmSpec",
    "accessible_information",
    "alpha_for_entanglement",
    "basis_free_coherence",
    "binary_entropy",
    "build_sym_povm",
    "coherence_lower_bound",
    "dual_map",
    "ensemble_coherence_in_basis",
    "entanglement",
    "gamma_optimized_coherence",
    "holevo",
    "measurement_entropy",
    "mutual_information",
    "povm_uncertainty",
    "relative_entropy_coherence",
    "run_sweep",
    "sym_ensemble",
    "von_neumann_entropy",
]
