"""Thermal preparation and the drive-mediated two-mode amplifier.

The baths only set the initial thermal occupations; the evolution itself is
closed.  Power is counted positive when the drive extracts work from the
circuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from .circuit import CircuitParams, DriveSpec, ModeIndex, mode_frequency
from .constants import HBAR, K_B
from .dynamics.gaussian import GaussianState
from .dynamics.symplectic import static_propagator
from .errors import UnsupportedResonance
from .hamiltonian import rwa_effective_hamiltonian
from .matching import ResonanceKind, classify_resonances


@dataclass(frozen=True)
class BathSpec:
    temperature: float  # kelvin
    attached_mode: ModeIndex

    def __post_init__(self):
        if not (self.temperature >= 0 and math.isfinite(self.temperature)):
            raise ValueError(f"temperature must be finite and >= 0, got {self.temperature!r}")


def thermal_occupation(temperature: float, freq: float) -> float:
    """Bose-Einstein occupation ``1 / (exp(hbar w / k_B T) - 1)``."""
    if not freq > 0:
        raise ValueError("frequency must be positive")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0:
        return 0.0
    x = HBAR * freq / (K_B * temperature)
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


def drive_power_in(t, ab_dag, xi: float, drive_freq: float):
    """``<dH/dt> = i hbar W xi (e^{iWt} <a b^dag> - c.c.)``: power delivered to the circuit.

    ``ab_dag`` is the lab-frame moment ``<a b^dag>`` at ``t``.
    """
    z = np.exp(1j * drive_freq * np.asarray(t)) * np.asarray(ab_dag, complex)
    val = 1j * HBAR * drive_freq * xi * (z - np.conj(z))
    scale = np.maximum(np.abs(val), 1e-300)
    if np.any(np.abs(val.imag) > 1e-12 * scale):
        raise ValueError("power has an imaginary part")
    out = val.real
    return float(out) if np.ndim(out) == 0 else out


def amplifier_power(t, ab_dag, xi: float, drive_freq: float):
    """Output power [W] extracted by the drive, ``-<dH/dt>``.

    Equals ``2 hbar W xi Im(e^{iWt} <a b^dag>)``.
    """
    return -drive_power_in(t, ab_dag, xi, drive_freq)


@dataclass(frozen=True)
class AmplifierTrace:
    t: np.ndarray
    power: np.ndarray
    n_hot: np.ndarray
    n_cold: np.ndarray
    xi: float
    drive_freq: float
    occupations0: tuple = field(default=(0.0, 0.0))

    @property
    def mean_power(self) -> float:
        """Time average over the grid (trapezoid rule)."""
        if self.t.size < 2:
            return float(self.power[0]) if self.power.size else 0.0
        return float(trapezoid(self.power, self.t) / (self.t[-1] - self.t[0]))

    def flow_power(self) -> np.ndarray:
        """``hbar W (-dn_hot/dt)`` by finite differences, for bookkeeping."""
        return HBAR * self.drive_freq * -np.gradient(self.n_hot, self.t)


def simulate_amplifier(
    hot: BathSpec,
    cold: BathSpec,
    drive: DriveSpec,
    params: CircuitParams,
    t_grid: Sequence[float],
    tol: Optional[float] = None,
) -> AmplifierTrace:
    """Power trace of the Raman-coupled pair prepared in a thermal product state.

    ``hot`` must be attached to the higher-frequency mode of the pair (its
    temperature may still be the lower one).  Each grid time is propagated
    exactly from ``t = 0`` with the interaction-picture Raman Hamiltonian.
    """
    w_hot = mode_frequency(hot.attached_mode, params)
    w_cold = mode_frequency(cold.attached_mode, params)
    if not w_hot > w_cold:
        raise ValueError("the hot bath must attach to the higher-frequency mode")
    if hot.attached_mode.line is cold.attached_mode.line:
        raise ValueError("the two baths must attach to modes on different lines")
    specs = classify_resonances(drive, params, [hot.attached_mode, cold.attached_mode], tol)
    raman = [s for s in specs if s.kind in (ResonanceKind.RamanLtoR, ResonanceKind.RamanRtoL)]
    if not raman:
        raise UnsupportedResonance("drive does not activate a Raman resonance on this pair")
    spec = raman[0]
    h = rwa_effective_hamiltonian(spec, drive, params, tol)
    xi = float(np.real(h.hopping[0, 1])) / HBAR
    big = w_hot - w_cold
    # mode order inside h is (left, right)
    hot_idx = h.index(hot.attached_mode)
    cold_idx = 1 - hot_idx
    n0 = [0.0, 0.0]
    n0[hot_idx] = thermal_occupation(hot.temperature, w_hot)
    n0[cold_idx] = thermal_occupation(cold.temperature, w_cold)
    state0 = GaussianState.thermal(n0)

    t = np.asarray(t_grid, float)
    eye = np.eye(4)
    row_a = eye[hot_idx]  # hot annihilator in (a_1, a_2, a_1^dag, a_2^dag)
    row_bd = eye[2 + cold_idx]
    power = np.empty_like(t)
    n_hot = np.empty_like(t)
    n_cold = np.empty_like(t)
    for k, tk in enumerate(t):
        st = state0.evolve(static_propagator(h, tk))
        # lab frame: <a b^dag> = exp(-i W t) <a_I b_I^dag>
        z = np.exp(-1j * big * tk) * st.moment(row_a, row_bd)
        power[k] = amplifier_power(tk, z, xi, big)
        occ = st.occupations()
        n_hot[k], n_cold[k] = occ[hot_idx], occ[cold_idx]
    return AmplifierTrace(t, power, n_hot, n_cold, xi, big, (n0[hot_idx], n0[cold_idx]))
