"""Quadratic Hamiltonians of the composed line.

Conventions
-----------
A :class:`QuadraticHamiltonian` over modes ``c_1 .. c_n`` stands for::

    H = sum_ij h_ij c_i^dag c_j
        + 1/2 sum_ij (P_ij c_i^dag c_j^dag + h.c.)
        + sum_i d_i c_i^dag c_i

with ``h`` Hermitian (``hopping``), ``P`` symmetric (``pairing``) and ``d``
real (``diagonal_shift``), all in joule.  With the 1/2 in front of the
pairing sum, a two-mode squeezer ``hbar xi (a^dag b^dag + a b)`` has
``P_ab = P_ba = hbar xi`` and a single-mode squeezer
``hbar xi ((a^dag)^2 + a^2)`` has ``P_aa = 2 hbar xi``.

``commutators[i]`` records ``[c_i, c_i^dag]``.  The term constructors work
with the native line amplitudes, whose left-handed commutator is
``1 / (4 sin^2(k dx / 2))``; :meth:`QuadraticHamiltonian.canonical` rescales
to ``[c, c^dag] = 1``, which is what every propagator expects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .circuit import (
    CircuitParams,
    DriveSpec,
    L,
    Line,
    ModeIndex,
    commutator,
    epsilon_bare,
    mode_frequency,
    omega_bare,
    omega_corrected,
    R,
    upsilon_bare,
    upsilon_corrected,
    wave_vector,
)
from .constants import FLUX_FACTOR, HBAR
from .errors import DetuningTooLarge, UnsupportedResonance
from .matching import ResonanceKind, ResonanceSpec, default_tolerance

TimeTag = Optional[Tuple[str, float]]  # None (static), ("cos", W) or ("sin", W)

_HERMITIAN_RTOL = 1e-14


@dataclass(frozen=True)
class QuadraticHamiltonian:
    modes: Tuple[ModeIndex, ...]
    hopping: np.ndarray
    pairing: np.ndarray
    diagonal_shift: np.ndarray
    commutators: np.ndarray = None
    time_tag: TimeTag = None

    def __post_init__(self):
        n = len(self.modes)
        object.__setattr__(self, "modes", tuple(self.modes))
        if len(set(self.modes)) != n:
            raise ValueError("duplicate modes")
        h = np.array(self.hopping, dtype=complex).reshape(n, n)
        p = np.array(self.pairing, dtype=complex).reshape(n, n)
        d = np.array(self.diagonal_shift, dtype=float).reshape(n)
        c = np.ones(n) if self.commutators is None else np.array(self.commutators, float).reshape(n)
        scale = max(np.max(np.abs(h), initial=0.0), np.max(np.abs(p), initial=0.0))
        if np.max(np.abs(h - h.conj().T), initial=0.0) > _HERMITIAN_RTOL * scale:
            raise ValueError("hopping matrix is not Hermitian")
        if np.max(np.abs(p - p.T), initial=0.0) > _HERMITIAN_RTOL * scale:
            raise ValueError("pairing matrix is not symmetric")
        if self.time_tag is not None and self.time_tag[0] not in ("cos", "sin"):
            raise ValueError(f"unknown time tag {self.time_tag!r}")
        for name, value in (("hopping", h), ("pairing", p), ("diagonal_shift", d), ("commutators", c)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    # -- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, modes: Sequence[ModeIndex], commutators=None, time_tag: TimeTag = None):
        n = len(modes)
        return cls(tuple(modes), np.zeros((n, n)), np.zeros((n, n)), np.zeros(n), commutators, time_tag)

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    def index(self, mode: ModeIndex) -> int:
        return self.modes.index(mode)

    def full_hopping(self) -> np.ndarray:
        """``h + diag(d)``."""
        return self.hopping + np.diag(self.diagonal_shift)

    def scaled(self, factor: float) -> "QuadraticHamiltonian":
        return replace(
            self,
            hopping=self.hopping * factor,
            pairing=self.pairing * factor,
            diagonal_shift=self.diagonal_shift * factor,
        )

    def with_tag(self, tag: TimeTag) -> "QuadraticHamiltonian":
        return replace(self, time_tag=tag)

    def __add__(self, other: "QuadraticHamiltonian") -> "QuadraticHamiltonian":
        if other.modes != self.modes:
            union = self.modes + tuple(m for m in other.modes if m not in self.modes)
            return self.embed(union) + other.embed(union)
        if other.time_tag != self.time_tag:
            raise ValueError("cannot add Hamiltonians with different time tags")
        if not np.allclose(other.commutators, self.commutators, rtol=1e-14, atol=0):
            raise ValueError("cannot add Hamiltonians with different operator normalization")
        return replace(
            self,
            hopping=self.hopping + other.hopping,
            pairing=self.pairing + other.pairing,
            diagonal_shift=self.diagonal_shift + other.diagonal_shift,
        )

    def embed(self, modes: Sequence[ModeIndex]) -> "QuadraticHamiltonian":
        """Re-express on a (super)set of modes, padding with zeros."""
        modes = tuple(modes)
        idx = [modes.index(m) for m in self.modes]
        n = len(modes)
        h = np.zeros((n, n), complex)
        p = np.zeros((n, n), complex)
        d = np.zeros(n)
        c = np.ones(n)
        h[np.ix_(idx, idx)] = self.hopping
        p[np.ix_(idx, idx)] = self.pairing
        d[idx] = self.diagonal_shift
        c[idx] = self.commutators
        return QuadraticHamiltonian(modes, h, p, d, c, self.time_tag)

    def canonical(self) -> "QuadraticHamiltonian":
        """Rewrite in operators with unit commutator (``c = sqrt(comm) c~``)."""
        s = np.sqrt(self.commutators)
        outer = np.outer(s, s)
        return QuadraticHamiltonian(
            self.modes,
            self.hopping * outer,
            self.pairing * outer,
            self.diagonal_shift * s**2,
            np.ones(self.n_modes),
            self.time_tag,
        )

    def is_canonical(self) -> bool:
        return bool(np.all(self.commutators == 1.0))

    def is_zero(self) -> bool:
        return not (np.any(self.hopping) or np.any(self.pairing) or np.any(self.diagonal_shift))

    def conserves_number(self) -> bool:
        return not np.any(self.pairing)


def combine(terms: Iterable[QuadraticHamiltonian]) -> QuadraticHamiltonian:
    terms = list(terms)
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


def time_factor(tag: TimeTag, t):
    if tag is None:
        return 1.0
    kind, omega = tag
    return np.cos(omega * t) if kind == "cos" else np.sin(omega * t)


# ---------------------------------------------------------------------------
# full interaction, term by term


def _mode_data(params: CircuitParams, modes: Sequence[ModeIndex], corrected: bool):
    """Signed amplitude and SQUID phase of every mode.

    The linearized SQUID energy is ``chi X^2`` with
    ``X = sum_i sigma_i (u_i^* c_i^dag + u_i c_i)``, ``u_i = exp(i k_i dx)``,
    ``sigma = +1/sqrt(C_l omega)`` on the left line and ``-1/sqrt(C_r upsilon)``
    on the right line (the flux difference across the SQUID).
    """
    sigma = np.empty(len(modes))
    phase = np.empty(len(modes), complex)
    comm = np.empty(len(modes))
    is_left = np.empty(len(modes), bool)
    for i, m in enumerate(modes):
        freq = mode_frequency(m, params, corrected=corrected)
        if m.line is Line.LEFT:
            sigma[i] = 1.0 / math.sqrt(params.c_left * freq)
        else:
            sigma[i] = -1.0 / math.sqrt(params.c_right * freq)
        phase[i] = np.exp(1j * wave_vector(m.j, params) * params.dx)
        comm[i] = commutator(m, params)
        is_left[i] = m.line is Line.LEFT
    return sigma, phase, comm, is_left


def _expanded_square(params, modes, energy, corrected):
    modes = tuple(modes)
    energy = params.e0 if energy is None else energy
    chi = HBAR * energy / (2 * params.n_cells) * FLUX_FACTOR
    sigma, u, comm, is_left = _mode_data(params, modes, corrected)
    ss = np.outer(sigma, sigma)
    h = 2.0 * chi * ss * np.outer(u.conj(), u)  # c_i^dag c_j
    p = 2.0 * chi * ss * np.outer(u.conj(), u.conj())  # 1/2 c_i^dag c_j^dag
    # exact Hermiticity/symmetry despite round-off in the phase products
    h = 0.5 * (h + h.conj().T)
    p = 0.5 * (p + p.T)
    same = np.equal.outer(is_left, is_left)
    return modes, h, p, comm, same


def _term(params, modes, energy, corrected, which):
    modes, h, p, comm, same = _expanded_square(params, modes, energy, corrected)
    n = len(modes)
    eye = np.eye(n, dtype=bool)
    zeros = np.zeros((n, n), complex)
    d = np.zeros(n)
    if which == "ES":
        d = np.real(np.diag(h)).copy()
        h = zeros
        p = zeros
    elif which == "RM":
        h = np.where(same & ~eye, h, 0)
        p = zeros
    elif which == "HP":
        h = np.where(~same, h, 0)
        p = zeros
    elif which == "1S":
        p = np.where(eye, p, 0)
        h = zeros
    elif which == "2S":
        p = np.where(same & ~eye, p, 0)
        h = zeros
    elif which == "IS":
        p = np.where(~same, p, 0)
        h = zeros
    else:  # pragma: no cover
        raise ValueError(which)
    return QuadraticHamiltonian(modes, h, p, d, comm)


def energy_shift_term(params, mode_set, energy=None, corrected=False) -> QuadraticHamiltonian:
    """Number-operator shifts ``hbar E (2pi/phi_0)^2 / (N C omega)``."""
    return _term(params, mode_set, energy, corrected, "ES")


def raman_internal_term(params, mode_set, energy=None, corrected=False) -> QuadraticHamiltonian:
    """Conversion between two different modes of the same line."""
    return _term(params, mode_set, energy, corrected, "RM")


def hopping_term(params, mode_set, energy=None, corrected=False) -> QuadraticHamiltonian:
    """Excitation exchange across the SQUID.

    The ``b_j^dag a_i`` entry is ``g_ij exp(i (k_i - p_j) dx)`` with
    ``g_ij = -hbar E (2pi/phi_0)^2 / (N sqrt(C_l C_r omega_i upsilon_j))``.
    ``mode_set`` may also be a list of ``(left, right)`` pairs.
    """
    modes = _flatten(mode_set)
    return _term(params, modes, energy, corrected, "HP")


def single_mode_squeeze_term(params, mode_set, energy=None, corrected=False) -> QuadraticHamiltonian:
    return _term(params, mode_set, energy, corrected, "1S")


def two_mode_squeeze_internal_term(params, mode_set, energy=None, corrected=False) -> QuadraticHamiltonian:
    return _term(params, mode_set, energy, corrected, "2S")


def interline_squeeze_term(params, mode_set, energy=None, corrected=False) -> QuadraticHamiltonian:
    """Pair creation with one photon on each line."""
    return _term(params, _flatten(mode_set), energy, corrected, "IS")


TERMS = {
    "ES": energy_shift_term,
    "HP": hopping_term,
    "RM": raman_internal_term,
    "1S": single_mode_squeeze_term,
    "2S": two_mode_squeeze_internal_term,
    "IS": interline_squeeze_term,
}


def _flatten(mode_set) -> Tuple[ModeIndex, ...]:
    out = []
    for item in mode_set:
        items = item if isinstance(item, tuple) and not isinstance(item, ModeIndex) else (item,)
        for m in items:
            if m not in out:
                out.append(m)
    return tuple(out)


def interaction_hamiltonian(
    params: CircuitParams,
    mode_set: Sequence[ModeIndex],
    energy: Optional[float] = None,
    corrected: bool = False,
) -> QuadraticHamiltonian:
    """Sum of all six SQUID terms at Josephson energy ``energy`` (default E_0)."""
    modes = _flatten(mode_set)
    return combine(f(params, modes, energy, corrected) for f in TERMS.values())


def bare_hamiltonian(params: CircuitParams, mode_set: Sequence[ModeIndex]) -> QuadraticHamiltonian:
    """Uncoupled lines in native amplitudes: ``eps_j a^dag a`` and ``hbar upsilon_j b^dag b``."""
    modes = _flatten(mode_set)
    d = np.array(
        [
            epsilon_bare(m.j, params) if m.line is Line.LEFT else HBAR * upsilon_bare(m.j, params)
            for m in modes
        ]
    )
    comm = [commutator(m, params) for m in modes]
    n = len(modes)
    return QuadraticHamiltonian(modes, np.zeros((n, n)), np.zeros((n, n)), d, comm)


def full_hamiltonian(
    params: CircuitParams, drive: DriveSpec, mode_set: Sequence[ModeIndex]
) -> List[QuadraticHamiltonian]:
    """Lab-frame Hamiltonian as time-tagged canonical pieces.

    ``H(t) = H_static + sum_m [eps_m sin(W_m t) + kappa_m cos(W_m t)] H_I(E_0)``
    where ``H_static`` holds the bare lines plus the interaction at ``E_0``.
    """
    modes = _flatten(mode_set)
    hi = interaction_hamiltonian(params, modes, drive.e0).canonical()
    static = bare_hamiltonian(params, modes).canonical() + hi
    pieces = [static]
    for tone in drive.tones:
        if tone.kappa:
            pieces.append(hi.scaled(tone.kappa).with_tag(("cos", tone.omega)))
        if tone.eps:
            pieces.append(hi.scaled(tone.eps).with_tag(("sin", tone.omega)))
    return pieces


def rwa_filter(
    pieces: Sequence[QuadraticHamiltonian],
    frame_freqs: Sequence[float],
    tol: float,
) -> QuadraticHamiltonian:
    """Static part of ``pieces`` in the frame rotating at ``frame_freqs``.

    Each matrix element picks up ``exp(i (w_i - w_j) t)`` (hopping) or
    ``exp(i (w_i + w_j) t)`` (pairing); tones contribute ``exp(+-i W t)``.
    A component is kept, at full weight, iff its net frequency is within
    ``tol``; everything else is dropped.  The frame energies themselves are
    removed from the diagonal.
    """
    if not pieces:
        raise ValueError("no Hamiltonian pieces")
    modes = pieces[0].modes
    w = np.asarray(frame_freqs, float)
    n = len(modes)
    h_out = np.zeros((n, n), complex)
    p_out = np.zeros((n, n), complex)
    hop_freq = np.subtract.outer(w, w)
    pair_freq = np.add.outer(w, w)
    for piece in pieces:
        piece = piece.embed(modes) if piece.modes != modes else piece
        if not piece.is_canonical():
            piece = piece.canonical()
        h = piece.full_hopping()
        p = piece.pairing
        if piece.time_tag is None:
            components = [(0.0, 1.0)]
        else:
            kind, big = piece.time_tag
            if kind == "cos":
                components = [(big, 0.5), (-big, 0.5)]
            else:
                components = [(big, 0.5 / 1j), (-big, -0.5 / 1j)]
        for freq, weight in components:
            h_out += np.where(np.abs(hop_freq + freq) <= tol, weight * h, 0)
            # pairing carries c^dag c^dag; its h.c. part is implied
            p_out += np.where(np.abs(pair_freq + freq) <= tol, weight * p, 0)
    h_out -= np.diag(HBAR * w)
    # restore exact Hermiticity/symmetry lost to the 0.5/1j weights
    h_out = 0.5 * (h_out + h_out.conj().T)
    p_out = 0.5 * (p_out + p_out.T)
    return QuadraticHamiltonian(modes, h_out, p_out, np.zeros(n))


# ---------------------------------------------------------------------------
# effective couplings


@dataclass(frozen=True)
class CouplingConstants:
    """Effective coupling constants [rad/s] of one left-right pair."""

    xi_hp: float
    xi_rm: float
    xi_sq: float
    xi_sl: float
    xi_sr: float
    g_ij: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "xi_hp": self.xi_hp,
            "xi_rm": self.xi_rm,
            "xi_sq": self.xi_sq,
            "xi_sl": self.xi_sl,
            "xi_sr": self.xi_sr,
            "g_ij": np.asarray(self.g_ij).tolist(),
        }


def modulation_depth(drive: DriveSpec, tone: Optional[int] = None) -> float:
    """Amplitude of one tone (the first one by default; 0 for a static drive)."""
    if not drive.tones:
        return 0.0
    return drive.tones[0 if tone is None else tone].amplitude


def effective_couplings(
    pair: Tuple[ModeIndex, ModeIndex],
    drive: DriveSpec,
    params: CircuitParams,
    tone: Optional[int] = None,
    corrected: bool = True,
) -> CouplingConstants:
    """Closed-form couplings of a left/right pair under ``drive``.

    The modulated couplings scale with the modulation depth of ``tone``.
    ``corrected`` selects shifted (default) or bare frequencies in the
    denominators.
    """
    left, right = pair
    if left.line is not Line.LEFT or right.line is not Line.RIGHT:
        raise ValueError("pair must be (left mode, right mode)")
    if corrected:
        w, u = omega_corrected(left.j, params), upsilon_corrected(right.j, params)
    else:
        w, u = omega_bare(left.j, params), upsilon_bare(right.j, params)
    eps = modulation_depth(drive, tone)
    scale = params.e0 * FLUX_FACTOR / params.n_cells
    cl, cr = params.c_left, params.c_right
    xi_hp = -2.0 * scale / (w * math.sqrt(cr * cl))
    xi_rm = -eps * scale / math.sqrt(cr * cl * w * u)
    xi_sl = -eps * scale / (cl * w)
    xi_sr = -eps * scale / (cr * w)
    g = -scale / math.sqrt(cl * cr * w * u)
    return CouplingConstants(xi_hp, xi_rm, xi_rm, xi_sl, xi_sr, np.array([[g]]))


def _two_mode(modes, hop=0.0, pair=0.0, single=(0.0, 0.0)) -> QuadraticHamiltonian:
    h = np.array([[0, hop], [hop, 0]], complex) * HBAR
    p = np.array([[2 * single[0], pair], [pair, 2 * single[1]]], complex) * HBAR
    return QuadraticHamiltonian(tuple(modes), h, p, np.zeros(2))


def rwa_effective_hamiltonian(
    resonance: ResonanceSpec,
    drive: DriveSpec,
    params: CircuitParams,
    tol: Optional[float] = None,
    corrected: bool = True,
) -> QuadraticHamiltonian:
    """Static interaction-picture Hamiltonian for one activated resonance.

    Returned in canonical operators, with the SQUID phases absorbed into the
    mode operators.
    """
    kind = resonance.kind
    if not isinstance(kind, ResonanceKind):
        raise UnsupportedResonance(f"unsupported resonance kind {kind!r}")
    a, b = resonance.mode_left, resonance.mode_right
    freqs = [mode_frequency(m, params) for m in resonance.modes]
    tau = tol if tol is not None else default_tolerance(*freqs)
    for det in (resonance.detuning, resonance.second_detuning):
        if abs(det) > tau:
            raise DetuningTooLarge(f"|detuning| = {abs(det):.3g} rad/s exceeds {tau:.3g} rad/s")

    if kind is ResonanceKind.SingleModeSqueezeL or kind is ResonanceKind.SingleModeSqueezeR:
        mode = a if kind is ResonanceKind.SingleModeSqueezeL else b
        partner = R(abs(mode.j)) if mode.line is Line.LEFT else L(abs(mode.j))
        pair = (mode, partner) if mode.line is Line.LEFT else (partner, mode)
        c = effective_couplings(pair, drive, params, resonance.drive_tone_index, corrected)
        xi = c.xi_sl if mode.line is Line.LEFT else c.xi_sr
        return QuadraticHamiltonian((mode,), [[0]], [[2 * HBAR * xi]], [0.0])

    c = effective_couplings((a, b), drive, params, resonance.drive_tone_index, corrected)
    if kind is ResonanceKind.DegenerateHopping:
        return _two_mode((a, b), hop=c.xi_hp)
    if kind in (ResonanceKind.RamanLtoR, ResonanceKind.RamanRtoL):
        return _two_mode((a, b), hop=c.xi_rm)
    if kind is ResonanceKind.TwoModeSqueeze:
        return _two_mode((a, b), pair=c.xi_sq)
    if kind is ResonanceKind.GeneralLinearDegenerate:
        return _two_mode((a, b), hop=c.xi_hp, pair=c.xi_sq, single=(c.xi_sl, c.xi_sr))
    if kind is ResonanceKind.PositionPositionNondegenerate:
        c2 = effective_couplings((a, b), drive, params, resonance.second_tone_index, corrected)
        return _two_mode((a, b), hop=c.xi_rm, pair=c2.xi_sq)
    raise UnsupportedResonance(f"unsupported resonance kind {kind!r}")  # pragma: no cover


def position_coupling_hamiltonian(
    modes: Sequence[ModeIndex], couplings: Sequence[Tuple[int, int, float]]
) -> QuadraticHamiltonian:
    """``hbar sum xi_ij (c_i + c_i^dag)(c_j + c_j^dag)`` over the listed pairs.

    With three modes and couplings ``[(0, 1, xi1), (0, 2, xi2), (1, 2, xi3)]``
    this is the general three-mode Hamiltonian.
    """
    n = len(modes)
    h = np.zeros((n, n), complex)
    p = np.zeros((n, n), complex)
    for i, j, xi in couplings:
        if i == j:
            raise ValueError("self-coupling is not a position-position term")
        h[i, j] += HBAR * xi
        h[j, i] += HBAR * xi
        p[i, j] += HBAR * xi
        p[j, i] += HBAR * xi
    return QuadraticHamiltonian(tuple(modes), h, p, np.zeros(n))


def three_mode_hamiltonian(modes: Sequence[ModeIndex], xi1: float, xi2: float, xi3: float):
    if len(modes) != 3:
        raise ValueError("three modes required")
    return position_coupling_hamiltonian(modes, [(0, 1, xi1), (0, 2, xi2), (1, 2, xi3)])
