"""Simulation of a left-handed and a right-handed transmission line coupled
through a driven SQUID: dispersion, phase matching, quadratic dynamics,
correlations and a two-mode amplifier."""

__version__ = "0.1.0"

from .circuit import CircuitParams, DriveSpec, Line, ModeIndex, Tone, L, R, reference_params
from .hamiltonian import QuadraticHamiltonian
from .matching import ResonanceKind, ResonanceSpec, classify_resonances, solve_cr_for_degeneracy

__all__ = [
    "CircuitParams",
    "DriveSpec",
    "L",
    "Line",
    "ModeIndex",
    "QuadraticHamiltonian",
    "R",
    "ResonanceKind",
    "ResonanceSpec",
    "Tone",
    "classify_resonances",
    "reference_params",
    "solve_cr_for_degeneracy",
]
