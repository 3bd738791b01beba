"""Acceptance criteria, one test each.

Each test is tagged with ``criterion(n, title)``; the terminal summary prints
one PASS/FAIL line per criterion with its wall time.  Runtime limits are
asserted inside the tests.
"""

import math
import time

import numpy as np
import pytest

from ctlsim.circuit import (
    CircuitParams,
    DriveSpec,
    L,
    R,
    epsilon_bare,
    epsilon_corrected,
    mode_frequency,
    omega_bare,
    omega_corrected,
    reference_params,
    upsilon_bare,
    upsilon_corrected,
)
from ctlsim.constants import HBAR
from ctlsim.correlations import (
    fock_moment,
    g2_generic,
    g2_hopping_raman_fock,
    g2_squeeze_fock,
    hom_dip,
    tan_bracket_g2,
    tanh_bracket_g2,
)
from ctlsim.dynamics.bogoliubov import BogoliubovTransform, evolve_hopping, evolve_raman, evolve_squeeze
from ctlsim.dynamics.fock import FockState, fock_propagate, hom_output_state
from ctlsim.dynamics.gaussian import GaussianState
from ctlsim.dynamics.symplectic import (
    static_propagator,
    symplectic_defect,
    symplectic_propagate,
    symplectic_to_bogoliubov,
)
from ctlsim.hamiltonian import QuadraticHamiltonian, effective_couplings, full_hamiltonian, rwa_filter
from ctlsim.matching import solve_cr_for_degeneracy
from ctlsim.thermo import BathSpec, simulate_amplifier, thermal_occupation

from oracles import PAIR, SectorOracle, hopping_h, squeeze_h
from randoms import random_static, random_tagged

E = np.eye(4)  # rows picking a, b, a^dag, b^dag


def equal_time_g2(psi):
    num = fock_moment(psi, E[2], E[3], E[0], E[1]).real
    return num / (fock_moment(psi, E[2], E[0]).real * fock_moment(psi, E[3], E[1]).real)


@pytest.mark.criterion(1, "C_r degeneracy regression at j = 30, 50, 100")
def test_criterion_1_degeneracy_regression():
    start = time.perf_counter()
    p = reference_params()
    got = {j: solve_cr_for_degeneracy(j, p) * 1e12 for j in (30, 50, 100)}
    elapsed = time.perf_counter() - start
    for j, printed in [(30, 0.27), (50, 1.60), (100, 6.39)]:
        assert abs(round(got[j], 2) - printed) <= 0.005, (j, got[j])
    assert elapsed < 1.0


@pytest.mark.criterion(2, "two-photon interference dip and NOON output")
def test_criterion_2_hom_dip():
    start = time.perf_counter()
    xi = 1.0
    t_dip = hom_dip(xi)
    grid = np.union1d(np.linspace(0.0, math.pi, 64), [t_dip])
    h = hopping_h(xi)
    worst = 0.0
    for t in grid:
        closed = g2_hopping_raman_fock(1, 1, xi, t, t).normalized()
        assert closed == pytest.approx(math.cos(2 * xi * t) ** 2, abs=1e-14)
        psi = fock_propagate(h, FockState.basis((1, 1), (10, 10)), t)
        worst = max(worst, abs(equal_time_g2(psi) - closed))
    assert worst <= 1e-8
    assert g2_hopping_raman_fock(1, 1, xi, t_dip, t_dip).normalized() <= 1e-10
    psi = fock_propagate(h, FockState.basis((1, 1), (10, 10)), t_dip)
    closed = hom_output_state(xi, t_dip, 10)
    for state in (psi, closed):
        assert abs(state.probability((2, 0)) - 0.5) <= 1e-8
        assert abs(state.probability((0, 2)) - 0.5) <= 1e-8
        assert state.probability((1, 1)) <= 1e-10
    assert time.perf_counter() - start < 1.0


@pytest.mark.criterion(3, "squeezed-vacuum g2 against Wick and Fock paths")
def test_criterion_3_squeezed_vacuum():
    start = time.perf_counter()
    xi = 1.0
    vac = GaussianState.vacuum(2)
    worst_wick = worst_fock = 0.0
    for x in np.linspace(0.05, 1.0, 20):
        closed = g2_squeeze_fock(0, 0, xi, x, x).normalized()
        assert closed == pytest.approx(1 + 1 / math.tanh(x) ** 2, rel=1e-13)
        tr = evolve_squeeze(xi, 0.0, 0.0, x)
        worst_wick = max(worst_wick, abs(g2_generic(vac, tr, tr).normalized() - closed))
        psi = fock_propagate(squeeze_h(xi), FockState.vacuum((40, 40)), x)
        worst_fock = max(worst_fock, abs(equal_time_g2(psi) - closed))
    far = g2_squeeze_fock(0, 0, xi, 10.0, 10.0).normalized()
    elapsed = time.perf_counter() - start
    assert abs(far - 2.0) <= 1e-3
    assert worst_wick <= 1e-8
    assert worst_fock <= 1e-8, f"cutoff-40 Fock path deviates by {worst_fock:.3g}"
    assert elapsed < 5.0


@pytest.mark.criterion(4, "lab-frame pair growth follows the RWA squeezer")
def test_criterion_4_rwa_validity():
    start = time.perf_counter()
    base = reference_params()
    p = base.with_(c_right=solve_cr_for_degeneracy(30, base))
    a, b = L(50), R(-50)
    w, u = mode_frequency(a, p), mode_frequency(b, p)
    drive = DriveSpec.single(p.e0, 0.5, w + u)
    pieces = full_hamiltonian(p, drive, (a, b))
    xi = abs(rwa_filter(pieces, [w, u], 1e-6 * (w + u)).pairing[0, 1]) / HBAR
    assert xi / w <= 1e-3
    s, prev, worst, at = np.eye(4), 0.0, 0.0, None
    for x in np.linspace(0.01, 0.5, 50):
        s = symplectic_propagate(pieces, prev, x / xi, 1e-10) @ s
        prev = x / xi
        n = np.sum(np.abs(symplectic_to_bogoliubov(s).b_coeffs) ** 2, axis=1)
        err = max(abs(n[0] / math.sinh(x) ** 2 - 1), abs(n[1] / math.sinh(x) ** 2 - 1))
        if err > worst:
            worst, at = err, x
    elapsed = time.perf_counter() - start
    assert symplectic_defect(s) <= 1e-8
    assert worst <= 1e-2, f"relative deviation {worst:.4f} at xi t = {at:.2f}"
    assert elapsed < 30.0


@pytest.mark.criterion(5, "canonical structure of transforms and propagators")
def test_criterion_5_canonical_structure():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    # 1000 transforms: closed forms and random static propagators
    worst = 0.0
    for k in range(1000):
        if k % 2:
            xi, w, u = rng.uniform(-2, 2), rng.uniform(0, 10), rng.uniform(0, 10)
            t = rng.uniform(0, 1)
            tr = (evolve_hopping(xi, w, t), evolve_raman(xi, w, u, t), evolve_squeeze(xi, w, u, t))[k % 3]
        else:
            h = random_static(rng, int(rng.integers(1, 6)))
            tr = symplectic_to_bogoliubov(static_propagator(h, rng.uniform(0, 1)))
        assert isinstance(tr, BogoliubovTransform)
        worst = max(worst, tr.canonical_defect())
    assert worst <= 1e-10

    # 100 time-dependent multimode propagations
    tol = 1e-10
    worst = 0.0
    for _ in range(100):
        pieces = random_tagged(rng, int(rng.integers(4, 9)))
        s = symplectic_propagate(pieces, 0.0, float(rng.uniform(0.2, 1.0)), tol)
        worst = max(worst, symplectic_defect(s))
    assert worst <= 10 * tol

    # conserved charges in the Fock oracle
    raman = QuadraticHamiltonian(PAIR, HBAR * np.array([[1.0, 0.7], [0.7, 3.0]]), np.zeros((2, 2)), [0, 0])
    cases = [(hopping_h(0.9, 2.0), 1), (raman, 1), (squeeze_h(0.3, 1.0, 2.0), -1)]
    for h, sign in cases:
        for occ in [(1, 0), (2, 1), (1, 1)]:
            psi = fock_propagate(h, FockState.basis(occ, (8, 8)), 0.8)
            n_a, n_b = np.meshgrid(*(np.arange(c) for c in psi.cutoffs), indexing="ij")
            charge, target = n_a + sign * n_b, occ[0] + sign * occ[1]
            prob = np.abs(psi.tensor()) ** 2
            assert abs(float(np.sum(prob * charge)) - target) <= 1e-10
            assert float(np.sum(prob[charge != target])) <= 1e-10
    assert time.perf_counter() - start < 30.0


@pytest.mark.criterion(6, "Fock-input G2 closed forms against generic and brute-force paths")
def test_criterion_6_closed_form_pinning():
    start = time.perf_counter()
    rng = np.random.default_rng(6)
    xi = 0.9
    for kind, span, cutoff in (("hopping", math.pi, 8), ("squeeze", 1.0, 80)):
        oracle = SectorOracle(kind, xi, cutoff)
        points = rng.uniform(0, span / xi, size=(20, 2))
        for sl in range(3):
            for sr in range(3):
                state = FockState.basis((sl, sr), (sl + 1, sr + 1))
                for t1, t2 in points:
                    if kind == "hopping":
                        printed = tan_bracket_g2(sl, sr, xi, t1, t2)
                        tr1, tr2 = evolve_hopping(xi, 0.0, t1), evolve_hopping(xi, 0.0, t2)
                    else:
                        printed = tanh_bracket_g2(sl, sr, xi, t1, t2)
                        tr1, tr2 = evolve_squeeze(xi, 0.0, 0.0, t1), evolve_squeeze(xi, 0.0, 0.0, t2)
                    generic = g2_generic(state, tr1, tr2).g2_unnormalized
                    brute = oracle.moments((sl, sr), t1, t2)[0]
                    scale = max(1.0, abs(brute))
                    assert abs(printed - generic) <= 1e-8 * scale, (kind, sl, sr, t1, t2)
                    assert abs(printed - brute) <= 1e-8 * scale, (kind, sl, sr, t1, t2)
    assert time.perf_counter() - start < 10.0


@pytest.mark.criterion(7, "amplifier power sign and zero-bias checks")
def test_criterion_7_amplifier():
    start = time.perf_counter()
    base = reference_params()
    p = base.with_(c_right=solve_cr_for_degeneracy(50, base))
    hot, cold = L(30), R(30)
    big = mode_frequency(hot, p) - mode_frequency(cold, p)
    drive = DriveSpec.single(p.e0, 0.05, big)
    xi = effective_couplings((hot, cold), drive, p).xi_rm
    grid = np.linspace(0, math.pi / (2 * abs(xi)), 201)

    def mean(t_hot, t_cold):
        return simulate_amplifier(BathSpec(t_hot, hot), BathSpec(t_cold, cold), drive, p, grid).mean_power

    forward, backward = mean(0.2, 0.02), mean(0.02, 0.2)
    t_eq = 0.1
    n_sum = thermal_occupation(t_eq, mode_frequency(hot, p)) + thermal_occupation(t_eq, mode_frequency(cold, p))
    scale = HBAR * big * abs(xi) * n_sum
    balanced = mean(t_eq, t_eq)
    elapsed = time.perf_counter() - start
    assert forward > 0
    assert backward < 0
    assert abs(balanced) <= 1e-10 * scale, f"mean power {balanced:.3g} W at equal temperatures (scale {scale:.3g} W)"
    assert elapsed < 10.0


@pytest.mark.criterion(8, "dispersion monotonicity and shift ordering")
def test_criterion_8_monotonicity():
    start = time.perf_counter()
    rng = np.random.default_rng(88)
    for _ in range(50):
        p = CircuitParams(
            c_left=rng.uniform(0.05, 5) * 1e-12,
            l_left=rng.uniform(5, 500) * 1e-12,
            c_right=rng.uniform(0.05, 10) * 1e-12,
            l_right=rng.uniform(5, 500) * 1e-12,
            n_cells=2 * int(rng.integers(2, 300)),
            i_crit=rng.uniform(0.1, 5) * 1e-6,
        )
        js = np.arange(1, p.half + 1)
        w, u, e = omega_bare(js, p), upsilon_bare(js, p), epsilon_bare(js, p)
        wc, uc, ec = omega_corrected(js, p), upsilon_corrected(js, p), epsilon_corrected(js, p)
        assert np.all(np.diff(w) < 0) and np.all(np.diff(u) > 0) and np.all(np.diff(e) > 0)
        assert np.all(wc >= w) and np.all(uc >= u) and np.all(ec >= e)
        assert np.all(np.diff(wc - w) < 0) and np.all(np.diff(uc - u) < 0)
    assert time.perf_counter() - start < 5.0
