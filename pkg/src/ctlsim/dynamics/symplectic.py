"""Real symplectic propagation of quadratic Hamiltonians.

Quadratures are ordered ``(x_1, p_1, x_2, p_2, ...)`` with
``x = (c + c^dag)/sqrt(2)`` and ``p = -i (c - c^dag)/sqrt(2)``, so the vacuum
covariance is ``I/2`` and ``[x, p] = i``.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from ..constants import HBAR
from ..errors import StiffnessError
from ..hamiltonian import QuadraticHamiltonian, time_factor
from .bogoliubov import BogoliubovTransform

HamiltonianLike = Union[QuadraticHamiltonian, Sequence[QuadraticHamiltonian]]


def symplectic_form(n: int) -> np.ndarray:
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def quadrature_map(n: int) -> np.ndarray:
    """``U`` with ``(c, c^dag) = U (x_1, p_1, ...)``; unitary."""
    u = np.zeros((2 * n, 2 * n), complex)
    r = 1.0 / np.sqrt(2.0)
    for k in range(n):
        u[k, 2 * k] = r
        u[k, 2 * k + 1] = 1j * r
        u[n + k, 2 * k] = r
        u[n + k, 2 * k + 1] = -1j * r
    return u


def real_hamiltonian_matrix(h: QuadraticHamiltonian) -> np.ndarray:
    """Real symmetric ``H_r`` with ``H = r^T H_r r / 2`` (+ const), in joule."""
    if not h.is_canonical():
        h = h.canonical()
    hop = h.full_hopping()
    k = np.block([[hop, h.pairing], [h.pairing.conj(), hop.conj()]])
    u = quadrature_map(h.n_modes)
    hr = u.conj().T @ k @ u
    return np.real(0.5 * (hr + hr.T))


def generator(h: QuadraticHamiltonian) -> np.ndarray:
    """``Omega H_r / hbar``: the Heisenberg equation is ``dr/dt = G r``."""
    return symplectic_form(h.n_modes) @ real_hamiltonian_matrix(h) / HBAR


def bogoliubov_to_symplectic(tr: BogoliubovTransform) -> np.ndarray:
    u = quadrature_map(tr.n_modes)
    s = u.conj().T @ tr.matrix() @ u
    return np.real(s)


def symplectic_to_bogoliubov(s: np.ndarray, frame_phases=None) -> BogoliubovTransform:
    # block form of u s u^dag; the exact halves keep the identity exact
    s = np.asarray(s, float)
    xx, xp, px, pp = s[0::2, 0::2], s[0::2, 1::2], s[1::2, 0::2], s[1::2, 1::2]
    a = 0.5 * ((xx + pp) + 1j * (px - xp))
    b = 0.5 * ((xx - pp) + 1j * (px + xp))
    return BogoliubovTransform(a, b, frame_phases)


def symplectic_defect(s: np.ndarray) -> float:
    om = symplectic_form(s.shape[0] // 2)
    return float(np.max(np.abs(s.T @ om @ s - om)))


def _pieces(h: HamiltonianLike):
    if isinstance(h, QuadraticHamiltonian):
        h = [h]
    h = list(h)
    modes = h[0].modes
    return [(p.time_tag, generator(p.embed(modes) if p.modes != modes else p)) for p in h]


_MAX_CONDITION = 1e8


def _solve(rhs, t0, t1, y0, tol, max_step):
    sol = solve_ivp(rhs, (t0, t1), y0, method="RK45", rtol=tol, atol=tol, max_step=max_step)
    if sol.status != 0:
        raise StiffnessError(f"integration failed at t={sol.t[-1]:.6g}: {sol.message}")
    return sol.y[:, -1]


def _direct(static, modulated, t0, t1, tol, max_step):
    dim = static.shape[0]

    def rhs(t, y):
        g = static + sum(time_factor(tag, t) * gen for tag, gen in modulated)
        return (g @ y.reshape(dim, dim)).ravel()

    return _solve(rhs, t0, t1, np.eye(dim).ravel(), tol, max_step).reshape(dim, dim)


def _interaction(static, modulated, t0, t1, tol, max_step):
    """Static generator exactly, tone-modulated remainder by RK45.

    With ``G_static = V diag(lam) V^-1`` and ``S = V E(t) Y(t) E(t0)^-1 V^-1``
    (``E = diag(exp(lam t))``), ``Y`` obeys
    ``Y' = [M_ij(t) exp((lam_j - lam_i) t)] Y`` where ``M = V^-1 G_mod V``.
    Returns ``None`` when ``G_static`` is too close to defective.
    """
    lam, v = np.linalg.eig(static)
    if np.linalg.cond(v) > _MAX_CONDITION:
        return None
    vinv = np.linalg.inv(v)
    mats = [(tag, vinv @ gen @ v) for tag, gen in modulated]
    dim = static.shape[0]
    gap = np.subtract.outer(lam, lam).T  # gap[i, j] = lam_j - lam_i

    def rhs(t, y):
        m = sum(time_factor(tag, t) * mk for tag, mk in mats)
        return ((m * np.exp(gap * (t - t0))) @ y.reshape(dim, dim)).ravel()

    y = _solve(rhs, t0, t1, np.eye(dim, dtype=complex).ravel(), tol, max_step).reshape(dim, dim)
    s = v @ (np.exp(lam * (t1 - t0))[:, None] * y) @ vinv
    return np.real(s)


def symplectic_propagate(
    h: HamiltonianLike,
    t0: float,
    t1: float,
    tol: float = 1e-10,
    max_step: float = np.inf,
    method: str = "auto",
) -> np.ndarray:
    """Lab-frame propagator ``S`` with ``r(t1) = S r(t0)``.

    Untagged pieces form the static generator, which is exponentiated
    exactly; the tone-modulated pieces are integrated with an adaptive
    Dormand-Prince 5(4) pair in the frame of the static evolution
    (``method="auto"``), using ``tol`` as both relative and absolute local
    error target.  ``method="direct"`` integrates the whole generator in the
    lab frame instead.
    """
    if t1 < t0:
        raise ValueError("t1 must be >= t0")
    if method not in ("auto", "direct"):
        raise ValueError(f"unknown method {method!r}")
    pieces = _pieces(h)
    dim = pieces[0][1].shape[0]
    if t1 == t0:
        return np.eye(dim)
    static = sum((gen for tag, gen in pieces if tag is None), np.zeros((dim, dim)))
    modulated = [(tag, gen) for tag, gen in pieces if tag is not None and np.any(gen)]
    if not modulated:
        return expm(static * (t1 - t0))
    if method == "auto":
        s = _interaction(static, modulated, t0, t1, tol, max_step)
        if s is not None:
            return s
    return _direct(static, modulated, t0, t1, tol, max_step)


def static_propagator(h: QuadraticHamiltonian, t: float) -> np.ndarray:
    """Exact propagator of a static Hamiltonian via the matrix exponential."""
    return expm(generator(h) * t)


def propagate_transform(h: HamiltonianLike, t0: float, t1: float, tol: float = 1e-10) -> BogoliubovTransform:
    return symplectic_to_bogoliubov(symplectic_propagate(h, t0, t1, tol))
