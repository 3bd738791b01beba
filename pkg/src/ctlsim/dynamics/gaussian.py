"""Gaussian states in the quadrature picture (vacuum variance 1/2)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bogoliubov import BogoliubovTransform
from .symplectic import bogoliubov_to_symplectic, quadrature_map, symplectic_form

PSD_TOL = 1e-9


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mean, float).ravel()
        c = np.asarray(self.covariance, float)
        if c.shape != (m.size, m.size) or m.size % 2:
            raise ValueError("mean must have 2n entries and covariance shape (2n, 2n)")
        if np.max(np.abs(c - c.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(c))):
            raise ValueError("covariance must be symmetric")
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "covariance", 0.5 * (c + c.T))

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    @classmethod
    def vacuum(cls, n: int) -> "GaussianState":
        return cls(np.zeros(2 * n), 0.5 * np.eye(2 * n))

    @classmethod
    def thermal(cls, occupations: Sequence[float]) -> "GaussianState":
        nbar = np.asarray(occupations, float)
        if np.any(nbar < 0):
            raise ValueError("occupations must be non-negative")
        return cls(np.zeros(2 * nbar.size), np.diag(np.repeat(nbar + 0.5, 2)))

    def uncertainty_defect(self) -> float:
        """Most negative eigenvalue of ``cov + i Omega / 2`` (0 if physical)."""
        m = self.covariance + 0.5j * symplectic_form(self.n_modes)
        return float(max(0.0, -np.min(np.linalg.eigvalsh(m))))

    def is_physical(self, tol: float = PSD_TOL) -> bool:
        return self.uncertainty_defect() <= tol

    def evolve(self, s) -> "GaussianState":
        """Apply a symplectic matrix or a :class:`BogoliubovTransform`."""
        if isinstance(s, BogoliubovTransform):
            s = bogoliubov_to_symplectic(s)
        return GaussianState(s @ self.mean, s @ self.covariance @ s.T)

    def reduced(self, modes: Sequence[int]) -> "GaussianState":
        idx = np.ravel([[2 * k, 2 * k + 1] for k in modes])
        return GaussianState(self.mean[idx], self.covariance[np.ix_(idx, idx)])

    def symplectic_eigenvalues(self) -> np.ndarray:
        ev = np.linalg.eigvals(1j * symplectic_form(self.n_modes) @ self.covariance)
        return np.sort(np.abs(ev.real))[::2]

    # -- ladder-operator moments -------------------------------------------

    def ladder_means(self) -> np.ndarray:
        """``<c>`` for ``c = (a_1..a_n, a_1^dag..a_n^dag)``."""
        return quadrature_map(self.n_modes) @ self.mean

    def ladder_second_moments(self) -> np.ndarray:
        """``M_ij = <dc_i dc_j>`` (operator order kept, fluctuations only)."""
        u = quadrature_map(self.n_modes)
        sigma = self.covariance + 0.5j * symplectic_form(self.n_modes)
        return u @ sigma @ u.T

    def occupations(self) -> np.ndarray:
        n = self.n_modes
        mu = self.ladder_means()
        m = self.ladder_second_moments()
        return np.real(np.array([m[n + k, k] + abs(mu[k]) ** 2 for k in range(n)]))

    def moment(self, *rows: np.ndarray) -> complex:
        """``<(r_1.c)(r_2.c)...>`` for two or four linear forms, by Wick's theorem."""
        mu = self.ladder_means()
        m = self.ladder_second_moments()
        means = [r @ mu for r in rows]

        def pair(i, j):
            return rows[i] @ m @ rows[j]

        if len(rows) == 2:
            return pair(0, 1) + means[0] * means[1]
        if len(rows) != 4:
            raise ValueError("only second and fourth moments are supported")
        total = means[0] * means[1] * means[2] * means[3]
        for i, j in ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)):
            k, l = (x for x in range(4) if x not in (i, j))
            total += pair(i, j) * means[k] * means[l]
        total += pair(0, 1) * pair(2, 3) + pair(0, 2) * pair(1, 3) + pair(0, 3) * pair(1, 2)
        return total
