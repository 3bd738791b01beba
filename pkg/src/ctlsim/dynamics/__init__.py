"""Closed-form, symplectic and Fock-space evolution."""

from .bogoliubov import BogoliubovTransform, evolve_hopping, evolve_raman, evolve_squeeze
from .fock import (
    FockEvolution,
    FockState,
    fock_hamiltonian,
    fock_propagate,
    hom_output_state,
    number_conserving_output,
    squeeze_output_state,
)
from .gaussian import GaussianState
from .symplectic import (
    bogoliubov_to_symplectic,
    propagate_transform,
    static_propagator,
    symplectic_defect,
    symplectic_form,
    symplectic_propagate,
    symplectic_to_bogoliubov,
)

__all__ = [
    "BogoliubovTransform",
    "FockEvolution",
    "FockState",
    "GaussianState",
    "bogoliubov_to_symplectic",
    "evolve_hopping",
    "evolve_raman",
    "evolve_squeeze",
    "fock_hamiltonian",
    "fock_propagate",
    "hom_output_state",
    "number_conserving_output",
    "propagate_transform",
    "squeeze_output_state",
    "static_propagator",
    "symplectic_defect",
    "symplectic_form",
    "symplectic_propagate",
    "symplectic_to_bogoliubov",
]
