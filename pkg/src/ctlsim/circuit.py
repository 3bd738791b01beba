"""Circuit parameters, dispersion relations and the Josephson drive.

All quantities are SI: farad, henry, joule, rad/s, second.  Mode numbers ``j``
are signed integers with ``1 <= |j| <= N/2``; the sign only fixes the
propagation direction, so every frequency and energy is even in ``j``.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, replace
from typing import Sequence, Tuple, Union

import numpy as np

from .constants import FLUX_FACTOR, HBAR, PHI_0
from .errors import ModeDomainError

IntLike = Union[int, np.integer, Sequence[int], np.ndarray]

#: E_0 = I_c * phi_0 / (2 pi) = hbar I_c / 2e, the usual Josephson energy.
REDUCED = "reduced"
#: E_0 = I_c * phi_0 taken literally.
LITERAL = "literal"


class Line(enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    @classmethod
    def parse(cls, value) -> "Line":
        if isinstance(value, Line):
            return value
        key = str(value).strip().upper()
        if key in ("L", "LEFT", "LHTL"):
            return cls.LEFT
        if key in ("R", "RIGHT", "RHTL"):
            return cls.RIGHT
        raise ValueError(f"unknown line {value!r}")


@functools.total_ordering
@dataclass(frozen=True)
class ModeIndex:
    """A single mode: signed mode number on one of the two lines."""

    j: int
    line: Line

    def __post_init__(self):
        if int(self.j) != self.j or self.j == 0:
            raise ModeDomainError(f"mode number must be a nonzero integer, got {self.j!r}")
        object.__setattr__(self, "j", int(self.j))
        object.__setattr__(self, "line", Line.parse(self.line))

    def __lt__(self, other):  # order: line, then j
        return (self.line.value, self.j) < (other.line.value, other.j)

    def __str__(self):
        return f"{self.line.value}:{self.j}"

    @classmethod
    def parse(cls, text: str) -> "ModeIndex":
        line, _, j = str(text).partition(":")
        return cls(int(j), Line.parse(line))


def L(j: int) -> ModeIndex:
    return ModeIndex(j, Line.LEFT)


def R(j: int) -> ModeIndex:
    return ModeIndex(j, Line.RIGHT)


@dataclass(frozen=True)
class CircuitParams:
    """Constants of the left-handed and right-handed lines and the SQUID.

    Attributes
    ----------
    c_left, l_left : float
        Capacitance [F] and inductance [H] of a left-handed unit cell.
    c_right, l_right : float
        Capacitance [F] and inductance [H] of a right-handed unit cell.
    n_cells : int
        Cells per line ``N`` (even, >= 2).
    i_crit : float
        SQUID critical current [A].
    dx : float
        Unit-cell length.  Only the product ``k_j dx = 2 pi j / N`` enters
        any formula, so the default of 1 is harmless.
    e0_convention : {"reduced", "literal"}
        How the mean Josephson energy is derived from ``i_crit``.
        ``"reduced"`` (default) uses ``I_c phi_0 / 2 pi``, the usual
        Josephson energy ``hbar I_c / 2e``; ``"literal"`` uses ``I_c phi_0``.
    """

    c_left: float
    l_left: float
    c_right: float
    l_right: float
    n_cells: int
    i_crit: float
    dx: float = 1.0
    e0_convention: str = REDUCED

    def __post_init__(self):
        for name in ("c_left", "l_left", "c_right", "l_right", "dx"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if int(self.n_cells) != self.n_cells or self.n_cells < 2 or self.n_cells % 2:
            raise ValueError(f"n_cells must be an even integer >= 2, got {self.n_cells!r}")
        object.__setattr__(self, "n_cells", int(self.n_cells))
        if not (np.isfinite(self.i_crit) and self.i_crit >= 0):
            raise ValueError(f"i_crit must be non-negative, got {self.i_crit!r}")
        if self.e0_convention not in (REDUCED, LITERAL):
            raise ValueError(f"unknown e0_convention {self.e0_convention!r}")

    @property
    def e0(self) -> float:
        """Mean Josephson energy E_0 [J]."""
        e0 = self.i_crit * PHI_0
        if self.e0_convention == REDUCED:
            e0 /= 2.0 * math.pi
        return e0

    @property
    def half(self) -> int:
        return self.n_cells // 2

    def with_(self, **changes) -> "CircuitParams":
        return replace(self, **changes)

    def modes(self, line: Line, signed: bool = False) -> list:
        """All modes of one line, ``j = 1..N/2`` (and negatives if ``signed``)."""
        js = list(range(1, self.half + 1))
        if signed:
            js = [-j for j in reversed(js)] + js
        return [ModeIndex(j, line) for j in js]

    def to_dict(self) -> dict:
        return {
            "c_left": self.c_left,
            "l_left": self.l_left,
            "c_right": self.c_right,
            "l_right": self.l_right,
            "n_cells": self.n_cells,
            "i_crit": self.i_crit,
            "dx": self.dx,
            "e0_convention": self.e0_convention,
            "e0": self.e0,
        }


def reference_params(c_right: float = 1.60e-12, **changes) -> CircuitParams:
    """Reference device: C_l = 0.4 pF, L_l = L_r = 60 pH, I_c = 1.25 uA, N = 200."""
    base = CircuitParams(
        c_left=0.4e-12, l_left=60e-12, c_right=c_right, l_right=60e-12,
        n_cells=200, i_crit=1.25e-6,
    )
    return base.with_(**changes) if changes else base


# ---------------------------------------------------------------------------
# dispersion


def _check_j(j, params: CircuitParams) -> np.ndarray:
    arr = np.asarray(j)
    if arr.dtype.kind not in "iu":
        if not np.all(np.mod(arr, 1) == 0):
            raise ModeDomainError(f"mode numbers must be integers, got {j!r}")
        arr = arr.astype(int)
    bad = (arr == 0) | (np.abs(arr) > params.half)
    if np.any(bad):
        raise ModeDomainError(
            f"mode number(s) {arr[bad] if arr.ndim else int(arr)} outside 1 <= |j| <= {params.half}"
        )
    return arr


def _out(value, j):
    return float(value) if np.ndim(j) == 0 else value


def half_phase(j: IntLike, params: CircuitParams):
    """``k_j dx / 2 = pi j / N``."""
    arr = _check_j(j, params)
    return _out(np.pi * arr / params.n_cells, j)


def sin_half(j: IntLike, params: CircuitParams):
    """``|sin(k_j dx / 2)|``."""
    return _out(np.abs(np.sin(np.asarray(half_phase(j, params)))), j)


def wave_vector(j: IntLike, params: CircuitParams):
    """``w_j = 2 pi j / (N dx)`` [rad/m]; identical for both lines."""
    arr = _check_j(j, params)
    return _out(2.0 * np.pi * arr / (params.n_cells * params.dx), j)


def omega_bare(j: IntLike, params: CircuitParams):
    """Left-handed dispersion ``1 / (2 sqrt(C_l L_l) |sin(k dx/2)|)``."""
    s = np.asarray(sin_half(j, params))
    return _out(1.0 / (2.0 * math.sqrt(params.c_left * params.l_left) * s), j)


def upsilon_bare(j: IntLike, params: CircuitParams):
    """Right-handed dispersion ``2 |sin(p dx/2)| / sqrt(C_r L_r)``."""
    s = np.asarray(sin_half(j, params))
    return _out(2.0 * s / math.sqrt(params.c_right * params.l_right), j)


def epsilon_bare(j: IntLike, params: CircuitParams):
    """Bare left-handed eigenenergy ``4 hbar omega_j sin^2`` [J]."""
    s = np.asarray(sin_half(j, params))
    return _out(2.0 * HBAR * s / math.sqrt(params.c_left * params.l_left), j)


def omega_shift(j: IntLike, params: CircuitParams):
    """SQUID-induced additive correction to ``omega_j`` [rad/s]."""
    s = np.asarray(sin_half(j, params))
    w = np.asarray(omega_bare(j, params))
    num = params.e0 * FLUX_FACTOR
    return _out(num / (4.0 * params.n_cells * params.c_left * w * s**2), j)


def upsilon_shift(j: IntLike, params: CircuitParams):
    """SQUID-induced additive correction to ``upsilon_j`` [rad/s]."""
    u = np.asarray(upsilon_bare(j, params))
    return _out(params.e0 * FLUX_FACTOR / (params.n_cells * params.c_right * u), j)


def omega_corrected(j: IntLike, params: CircuitParams):
    return _out(np.asarray(omega_bare(j, params)) + np.asarray(omega_shift(j, params)), j)


def upsilon_corrected(j: IntLike, params: CircuitParams):
    return _out(np.asarray(upsilon_bare(j, params)) + np.asarray(upsilon_shift(j, params)), j)


def epsilon_corrected(j: IntLike, params: CircuitParams):
    """Shifted left-handed eigenenergy [J]."""
    w = np.asarray(omega_bare(j, params))
    shift = HBAR * params.e0 * FLUX_FACTOR / (params.n_cells * params.c_left * w)
    return _out(np.asarray(epsilon_bare(j, params)) + shift, j)


def mode_frequency(mode: ModeIndex, params: CircuitParams, corrected: bool = True) -> float:
    """Frequency of ``mode`` on its own line."""
    if mode.line is Line.LEFT:
        return omega_corrected(mode.j, params) if corrected else omega_bare(mode.j, params)
    return upsilon_corrected(mode.j, params) if corrected else upsilon_bare(mode.j, params)


def commutator(mode: ModeIndex, params: CircuitParams) -> float:
    """``[a, a^dagger]`` for the line's native ladder operator.

    Left-handed amplitudes are normalized to ``1 / (4 sin^2(k dx / 2))``;
    right-handed ones are canonical.
    """
    if mode.line is Line.LEFT:
        return 1.0 / (4.0 * sin_half(mode.j, params) ** 2)
    return 1.0


# ---------------------------------------------------------------------------
# drive


@dataclass(frozen=True)
class Tone:
    eps: float  # sine amplitude
    kappa: float  # cosine amplitude
    omega: float  # rad/s

    @property
    def amplitude(self) -> float:
        return math.hypot(self.eps, self.kappa)


@dataclass(frozen=True)
class DriveSpec:
    """``E(t) = e0 [1 + sum_m (eps_m sin(W_m t) + kappa_m cos(W_m t))]``."""

    e0: float
    tones: Tuple[Tone, ...] = ()

    def __post_init__(self):
        tones = tuple(t if isinstance(t, Tone) else Tone(*t) for t in self.tones)
        object.__setattr__(self, "tones", tones)

    @classmethod
    def single(cls, e0: float, epsilon: float, omega: float) -> "DriveSpec":
        """The single-tone form ``E_0 [1 + epsilon cos(omega t)]``."""
        return cls(e0, (Tone(0.0, epsilon, omega),))

    @classmethod
    def static(cls, e0: float) -> "DriveSpec":
        return cls(e0, ())


def drive_energy(t, drive: DriveSpec):
    """Josephson energy E(t) [J]; vectorized over ``t``."""
    t = np.asarray(t, dtype=float)
    mod = np.ones_like(t)
    for tone in drive.tones:
        mod = mod + tone.eps * np.sin(tone.omega * t) + tone.kappa * np.cos(tone.omega * t)
    out = drive.e0 * mod
    return float(out) if out.ndim == 0 else out


def chi(t, drive: DriveSpec, params: CircuitParams):
    """Interaction prefactor ``hbar E(t) / (2N) (2 pi / phi_0)^2``."""
    return HBAR * drive_energy(t, drive) / (2 * params.n_cells) * FLUX_FACTOR
