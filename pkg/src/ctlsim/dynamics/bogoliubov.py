"""Bogoliubov transforms and the closed-form two-mode solutions.

A transform maps the initial ladder operators to the Heisenberg-picture
ones, ``c(t) = A c + B c^dag``.  The closed forms below solve the rotating
frame Hamiltonians ``hbar xi (a^dag b + a b^dag)`` and
``hbar xi (a^dag b^dag + a b)`` and then restore the lab-frame phases
``exp(-i w t)`` of each mode, which are kept in ``frame_phases``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class BogoliubovTransform:
    a_coeffs: np.ndarray
    b_coeffs: np.ndarray
    frame_phases: np.ndarray = field(default=None)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a_coeffs, complex))
        b = np.atleast_2d(np.asarray(self.b_coeffs, complex))
        if a.shape != b.shape or a.shape[0] != a.shape[1]:
            raise ValueError("a_coeffs and b_coeffs must be square and of equal shape")
        ph = np.ones(a.shape[0], complex) if self.frame_phases is None else np.asarray(self.frame_phases, complex)
        object.__setattr__(self, "a_coeffs", a)
        object.__setattr__(self, "b_coeffs", b)
        object.__setattr__(self, "frame_phases", ph)

    @property
    def n_modes(self) -> int:
        return self.a_coeffs.shape[0]

    @classmethod
    def identity(cls, n: int) -> "BogoliubovTransform":
        return cls(np.eye(n), np.zeros((n, n)))

    def matrix(self) -> np.ndarray:
        """``[[A, B], [B*, A*]]`` acting on ``(c, c^dag)``."""
        a, b = self.a_coeffs, self.b_coeffs
        return np.block([[a, b], [b.conj(), a.conj()]])

    @classmethod
    def from_matrix(cls, m: np.ndarray, frame_phases=None) -> "BogoliubovTransform":
        n = m.shape[0] // 2
        return cls(m[:n, :n], m[:n, n:], frame_phases)

    def then(self, later: "BogoliubovTransform") -> "BogoliubovTransform":
        """Evolve by ``self`` and afterwards by ``later`` (static Hamiltonians)."""
        return BogoliubovTransform.from_matrix(self.matrix() @ later.matrix())

    def canonical_defect(self) -> float:
        """Largest violation of ``A A^dag - B B^dag = 1`` and ``A B^T = B A^T``."""
        a, b = self.a_coeffs, self.b_coeffs
        d1 = a @ a.conj().T - b @ b.conj().T - np.eye(self.n_modes)
        d2 = a @ b.T - b @ a.T
        return float(max(np.max(np.abs(d1)), np.max(np.abs(d2))))

    def rotating_frame(self) -> "BogoliubovTransform":
        """Remove the stored lab-frame phases."""
        undo = np.diag(self.frame_phases.conj())
        return BogoliubovTransform(undo @ self.a_coeffs, undo @ self.b_coeffs)

    def symplectic(self) -> np.ndarray:
        from .symplectic import bogoliubov_to_symplectic

        return bogoliubov_to_symplectic(self)


def _phases(t, *freqs):
    return np.exp(-1j * np.asarray(freqs, float) * t)


def evolve_hopping(xi: float, omega: float, t: float) -> BogoliubovTransform:
    """Degenerate beam splitter: ``a(t) = e^{-i w t} (a cos xi t - i b sin xi t)``."""
    c, s = np.cos(xi * t), np.sin(xi * t)
    ph = _phases(t, omega, omega)
    mix = np.array([[c, -1j * s], [-1j * s, c]])
    return BogoliubovTransform(np.diag(ph) @ mix, np.zeros((2, 2)), ph)


def evolve_raman(xi: float, omega_l: float, upsilon_r: float, t: float) -> BogoliubovTransform:
    """Beam splitter between modes of different frequency (drive-assisted)."""
    c, s = np.cos(xi * t), np.sin(xi * t)
    ph = _phases(t, omega_l, upsilon_r)
    mix = np.array([[c, -1j * s], [-1j * s, c]])
    return BogoliubovTransform(np.diag(ph) @ mix, np.zeros((2, 2)), ph)


def evolve_squeeze(xi: float, omega_l: float, upsilon_r: float, t: float) -> BogoliubovTransform:
    """Two-mode squeezer: ``a(t) = e^{-i w t} (a cosh xi t - i b^dag sinh xi t)``."""
    ch, sh = np.cosh(xi * t), np.sinh(xi * t)
    ph = _phases(t, omega_l, upsilon_r)
    a = np.diag(ph) * ch
    b = np.diag(ph) @ np.array([[0, -1j * sh], [-1j * sh, 0]])
    return BogoliubovTransform(a, b, ph)
