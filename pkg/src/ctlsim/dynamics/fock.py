"""Truncated Fock-space evolution, used as a brute-force oracle.

States live on the product basis ``|n_1, ..., n_k>`` with ``0 <= n_i < cutoff_i``,
flattened in C order.  Hamiltonians must be canonical and static.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from ..constants import HBAR
from ..errors import LeakageExceeded
from ..hamiltonian import QuadraticHamiltonian
from .bogoliubov import BogoliubovTransform

MAX_LEAKAGE = 1e-8
NORM_TOL = 1e-10


@dataclass(frozen=True)
class FockState:
    cutoffs: Tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        cut = tuple(int(c) for c in self.cutoffs)
        if any(c < 1 for c in cut):
            raise ValueError("cutoffs must be >= 1")
        amp = np.asarray(self.amplitudes, complex).ravel()
        if amp.size != math.prod(cut):
            raise ValueError(f"expected {math.prod(cut)} amplitudes, got {amp.size}")
        object.__setattr__(self, "cutoffs", cut)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def basis(cls, occupations: Sequence[int], cutoffs: Sequence[int]) -> "FockState":
        occupations = tuple(int(n) for n in occupations)
        if len(occupations) != len(cutoffs) or any(
            n < 0 or n >= c for n, c in zip(occupations, cutoffs)
        ):
            raise ValueError(f"occupation {occupations} outside cutoffs {tuple(cutoffs)}")
        amp = np.zeros(math.prod(cutoffs), complex)
        amp[np.ravel_multi_index(occupations, tuple(cutoffs))] = 1.0
        return cls(tuple(cutoffs), amp)

    @classmethod
    def vacuum(cls, cutoffs: Sequence[int]) -> "FockState":
        return cls.basis([0] * len(cutoffs), cutoffs)

    @property
    def n_modes(self) -> int:
        return len(self.cutoffs)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.cutoffs)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def leakage(self) -> float:
        """Probability carried by basis states with any mode at its top level."""
        p = np.abs(self.tensor()) ** 2
        inside = p[tuple(slice(0, c - 1) for c in self.cutoffs)]
        return float(max(0.0, p.sum() - inside.sum()))

    @property
    def valid(self) -> bool:
        return self.leakage <= MAX_LEAKAGE

    def amplitude(self, occupations: Sequence[int]) -> complex:
        return complex(self.tensor()[tuple(occupations)])

    def probability(self, occupations: Sequence[int]) -> float:
        return abs(self.amplitude(occupations)) ** 2

    def mean_number(self, mode: int) -> float:
        p = np.abs(self.tensor()) ** 2
        other = tuple(k for k in range(self.n_modes) if k != mode)
        marginal = p.sum(axis=other) if other else p
        return float(np.arange(self.cutoffs[mode]) @ marginal)

    def expect(self, op) -> complex:
        return complex(np.vdot(self.amplitudes, op @ self.amplitudes))

    def resized(self, cutoffs: Sequence[int]) -> "FockState":
        """Embed into (or crop to) new cutoffs."""
        cutoffs = tuple(int(c) for c in cutoffs)
        out = np.zeros(cutoffs, complex)
        sl = tuple(slice(0, min(a, b)) for a, b in zip(cutoffs, self.cutoffs))
        out[sl] = self.tensor()[sl]
        return FockState(cutoffs, out)


@lru_cache(maxsize=32)
def annihilators(cutoffs: Tuple[int, ...]) -> Tuple[sp.csr_matrix, ...]:
    """Sparse annihilation operators on the truncated product space."""
    ops = []
    for k, c in enumerate(cutoffs):
        a = sp.diags(np.sqrt(np.arange(1, c, dtype=float)), 1, format="csr")
        left = sp.identity(math.prod(cutoffs[:k]), format="csr")
        right = sp.identity(math.prod(cutoffs[k + 1 :]), format="csr")
        ops.append(sp.kron(sp.kron(left, a), right, format="csr"))
    return tuple(ops)


def fock_hamiltonian(h: QuadraticHamiltonian, cutoffs: Sequence[int]) -> sp.csr_matrix:
    """Sparse matrix of ``h`` on the truncated space, in joule."""
    if not h.is_canonical():
        h = h.canonical()
    cutoffs = tuple(int(c) for c in cutoffs)
    if len(cutoffs) != h.n_modes:
        raise ValueError("one cutoff per mode required")
    a = annihilators(cutoffs)
    ad = [x.conj().T.tocsr() for x in a]
    dim = math.prod(cutoffs)
    out = sp.csr_matrix((dim, dim), dtype=complex)
    hop = h.full_hopping()
    pair = h.pairing
    n = h.n_modes
    for i in range(n):
        for j in range(n):
            if hop[i, j]:
                out = out + hop[i, j] * (ad[i] @ a[j])
            if pair[i, j]:
                out = out + 0.5 * pair[i, j] * (ad[i] @ ad[j])
                out = out + 0.5 * np.conj(pair[i, j]) * (a[j] @ a[i])
    return out.tocsr()


def _propagate_once(h, psi0: FockState, t: float) -> FockState:
    if t == 0 or h.is_zero():
        return FockState(psi0.cutoffs, psi0.amplitudes.copy())
    gen = (-1j * t / HBAR) * fock_hamiltonian(h, psi0.cutoffs)
    amp = expm_multiply(gen.tocsc(), psi0.amplitudes)
    return FockState(psi0.cutoffs, amp)


def fock_propagate(
    h: QuadraticHamiltonian,
    psi0: FockState,
    t: float,
    max_leakage: float = MAX_LEAKAGE,
    grow: bool = True,
) -> FockState:
    """``exp(-i h t / hbar) psi0`` on the truncated space.

    If the evolved state leaks more than ``max_leakage`` into the top layer,
    the cutoffs are doubled once and the run repeated; a second failure
    raises :class:`LeakageExceeded`.
    """
    if psi0.leakage > 0:
        raise ValueError("initial state already occupies the top Fock layer")
    out = _propagate_once(h, psi0, t)
    if out.leakage > max_leakage and grow:
        bigger = psi0.resized([2 * c for c in psi0.cutoffs])
        out = _propagate_once(h, bigger, t)
    if out.leakage > max_leakage:
        raise LeakageExceeded(f"leakage {out.leakage:.3g} > {max_leakage:.3g} at cutoffs {out.cutoffs}")
    if abs(out.norm - psi0.norm) > NORM_TOL:
        raise LeakageExceeded(f"norm drifted by {abs(out.norm - psi0.norm):.3g}")
    return out


class FockEvolution:
    """Repeated propagation with a fixed Hamiltonian and cutoff (no regrowth).

    Used for Heisenberg-picture operator products, where the intermediate
    vectors are not normalized states.
    """

    def __init__(self, h: QuadraticHamiltonian, cutoffs: Sequence[int]):
        self.cutoffs = tuple(int(c) for c in cutoffs)
        self.matrix = fock_hamiltonian(h, self.cutoffs).tocsc()
        self.ops = annihilators(self.cutoffs)

    def step(self, vec: np.ndarray, t: float) -> np.ndarray:
        if t == 0:
            return vec
        return expm_multiply((-1j * t / HBAR) * self.matrix, vec)

    def heisenberg_apply(self, mode: int, dagger: bool, t: float, vec: np.ndarray) -> np.ndarray:
        """``U(t)^dag c U(t) vec`` for ``c = a_mode`` (or its adjoint)."""
        op = self.ops[mode]
        if dagger:
            op = op.conj().T
        return self.step(op @ self.step(vec, t), -t)


def hom_output_state(xi: float, t: float, cutoff: int = 4) -> FockState:
    """Beam-splitter output for input ``|1, 1>`` (rotating frame).

    ``cos(2 xi t) |1,1> - i sin(2 xi t) (|2,0> + |0,2>) / sqrt(2)``
    """
    if cutoff < 4:
        raise ValueError("cutoff must be >= 4 so the two-photon layer is not the top one")
    amp = np.zeros((cutoff, cutoff), complex)
    c, s = math.cos(2 * xi * t), math.sin(2 * xi * t)
    amp[1, 1] = c
    amp[2, 0] = amp[0, 2] = -1j * s / math.sqrt(2.0)
    return FockState((cutoff, cutoff), amp)


def number_conserving_output(
    transform: BogoliubovTransform, occupations: Sequence[int], cutoffs: Sequence[int]
) -> FockState:
    """Schrodinger-picture image of a Fock state under a passive transform.

    Uses ``U c_i^dag U^dag = sum_j A_ji c_j^dag`` and ``U |0> = |0>``.
    """
    if np.max(np.abs(transform.b_coeffs), initial=0.0) > 0:
        raise ValueError("transform mixes creation and annihilation operators")
    cutoffs = tuple(int(c) for c in cutoffs)
    a = annihilators(cutoffs)
    vec = FockState.vacuum(cutoffs).amplitudes
    amat = transform.a_coeffs
    for i, n in enumerate(occupations):
        create = sum(amat[j, i] * a[j].conj().T for j in range(len(cutoffs)) if amat[j, i])
        for _ in range(int(n)):
            vec = create @ vec
        vec = vec / math.sqrt(math.factorial(int(n)))
    return FockState(cutoffs, vec)


def squeeze_output_state(
    xi: float, t: float, occupations: Sequence[int], cutoffs: Sequence[int]
) -> FockState:
    """Two-mode squeezer ``exp(-i xi t (a^dag b^dag + a b))`` on ``|s_L, s_R>``.

    Evaluated through the SU(1,1) disentangled form
    ``exp(-i tau a^dag b^dag) cosh(r)^-(n_a + n_b + 1) exp(-i tau a b)``
    with ``r = xi t`` and ``tau = tanh r``, so no matrix exponential is taken.
    """
    cutoffs = tuple(int(c) for c in cutoffs)
    if len(cutoffs) != 2:
        raise ValueError("two modes required")
    r = xi * t
    tau = math.tanh(r)
    a, b = annihilators(cutoffs)
    vec = FockState.basis(occupations, cutoffs).amplitudes

    def series(op, vec):
        out = vec.copy()
        term = vec
        k = 1
        while True:
            term = (-1j * tau / k) * (op @ term)
            if not np.any(np.abs(term) > 0):
                return out
            out = out + term
            k += 1

    vec = series(a @ b, vec)
    na, nb = np.meshgrid(np.arange(cutoffs[0]), np.arange(cutoffs[1]), indexing="ij")
    vec = vec * np.cosh(r) ** (-(na + nb + 1)).ravel().astype(float)
    vec = series(a.conj().T @ b.conj().T, vec)
    return FockState(cutoffs, vec)
