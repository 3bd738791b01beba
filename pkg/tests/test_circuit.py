import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ctlsim.circuit import (
    CircuitParams,
    DriveSpec,
    L,
    Line,
    ModeIndex,
    R,
    Tone,
    chi,
    drive_energy,
    epsilon_bare,
    epsilon_corrected,
    omega_bare,
    omega_corrected,
    omega_shift,
    sin_half,
    upsilon_bare,
    upsilon_corrected,
    upsilon_shift,
    wave_vector,
)
from ctlsim.constants import FLUX_FACTOR, HBAR, PHI_0
from ctlsim.errors import ModeDomainError

# frozen from an independent mpmath evaluation (40 digits)
OMEGA_BARE_100 = 102062072615.96575
UPSILON_BARE_50_160 = 144337567297.40644
CHI_STATIC_REF = 1.00136039625e-27


def params_strategy():
    pos = st.floats(0.05, 20.0)
    return st.builds(
        lambda cl, ll, cr, lr, half, ic: CircuitParams(
            cl * 1e-12, ll * 1e-12 * 100, cr * 1e-12, lr * 1e-12 * 100, 2 * half, ic * 1e-6
        ),
        pos, pos, pos, pos, st.integers(1, 150), st.one_of(st.just(0.0), st.floats(0.01, 5.0)),
    )


# -- params and modes -------------------------------------------------------


def test_params_validation():
    good = dict(c_left=1e-12, l_left=1e-12, c_right=1e-12, l_right=1e-12, n_cells=4, i_crit=1e-6)
    CircuitParams(**good)
    for key, bad in [("c_left", 0.0), ("l_right", -1.0), ("n_cells", 3), ("n_cells", 0), ("i_crit", -1e-6)]:
        with pytest.raises(ValueError):
            CircuitParams(**{**good, key: bad})
    with pytest.raises(ValueError):
        CircuitParams(**good, dx=0.0)
    with pytest.raises(ValueError):
        CircuitParams(**good, e0_convention="other")


def test_e0_conventions(ref):
    assert PHI_0 == pytest.approx(2.0678338484619295e-15, rel=1e-15)
    assert ref.e0 == pytest.approx(1.25e-6 * PHI_0 / (2 * math.pi), rel=1e-15)
    literal = ref.with_(e0_convention="literal")
    assert literal.e0 == pytest.approx(2 * math.pi * ref.e0, rel=1e-15)


def test_mode_index_parse_and_order():
    assert ModeIndex.parse("L:50") == L(50)
    assert ModeIndex.parse("R:-3") == R(-3)
    assert str(R(-3)) == "R:-3"
    with pytest.raises(ValueError):
        ModeIndex.parse("X:1")
    with pytest.raises(ValueError):
        ModeIndex(0, Line.LEFT)
    assert sorted([R(1), L(2), L(1)])[0] == L(1)


# -- dispersion examples --------------------------------------------------


def test_wave_vector_examples(ref):
    assert wave_vector(ref.half, ref) == pytest.approx(math.pi / ref.dx, rel=1e-15)
    p = ref.with_(dx=1e-3)
    assert wave_vector(1, p) == pytest.approx(31.41592653589793, rel=1e-12)
    assert wave_vector(-5, ref) == -wave_vector(5, ref)


def test_domain_errors(ref):
    for j in (0, ref.half + 1, -(ref.half + 1)):
        with pytest.raises(ModeDomainError):
            omega_bare(j, ref)
    with pytest.raises(ModeDomainError):
        wave_vector(1.5, ref)
    with pytest.raises(ModeDomainError):
        upsilon_bare(np.array([1, 0]), ref)


def test_omega_bare_examples(ref):
    edge = 1 / (2 * math.sqrt(ref.c_left * ref.l_left))
    assert omega_bare(ref.half, ref) == pytest.approx(edge, rel=1e-15)
    assert omega_bare(100, ref) == pytest.approx(OMEGA_BARE_100, rel=1e-14)
    assert omega_bare(-37, ref) == omega_bare(37, ref)


def test_upsilon_bare_examples(ref):
    assert upsilon_bare(ref.half, ref) == pytest.approx(2 / math.sqrt(ref.c_right * ref.l_right), rel=1e-15)
    js = np.arange(1, ref.half + 1)
    lhs = upsilon_bare(js, ref) * math.sqrt(ref.c_right * ref.l_right) / 2
    assert np.allclose(lhs, np.abs(np.sin(np.pi * js / ref.n_cells)), rtol=1e-14, atol=0)
    assert upsilon_bare(50, ref.with_(c_right=1.60e-12)) == pytest.approx(UPSILON_BARE_50_160, rel=1e-14)


def test_epsilon_bare_examples(ref):
    js = np.arange(1, ref.half + 1)
    ident = 4 * HBAR * omega_bare(js, ref) * np.sin(wave_vector(js, ref) * ref.dx / 2) ** 2
    assert np.allclose(epsilon_bare(js, ref), ident, rtol=1e-12, atol=0)
    assert epsilon_bare(ref.half, ref) == pytest.approx(2 * HBAR / math.sqrt(ref.c_left * ref.l_left), rel=1e-15)
    assert np.all(np.diff(epsilon_bare(js, ref)) > 0)


def test_corrected_zero_shift_limit(ref):
    p = ref.with_(i_crit=0.0)
    js = np.arange(1, p.half + 1)
    assert np.array_equal(omega_corrected(js, p), omega_bare(js, p))
    assert np.array_equal(upsilon_corrected(js, p), upsilon_bare(js, p))
    assert np.array_equal(epsilon_corrected(js, p), epsilon_bare(js, p))


def test_corrected_degenerate_at_solved_cr(solved50):
    w, u = omega_corrected(50, solved50), upsilon_corrected(50, solved50)
    assert abs(w - u) / w <= 1e-12


def test_correction_larger_at_small_j(ref):
    assert omega_shift(1, ref) > omega_shift(ref.half, ref)
    assert upsilon_shift(1, ref) > upsilon_shift(ref.half, ref)


def test_epsilon_corrected_consistency(ref):
    js = np.arange(1, ref.half + 1)
    s2 = np.sin(np.pi * js / ref.n_cells) ** 2
    assert np.allclose(epsilon_corrected(js, ref), 4 * HBAR * omega_corrected(js, ref) * s2, rtol=1e-12, atol=0)
    assert np.all(np.diff(epsilon_corrected(js, ref)) > 0)
    assert np.all(epsilon_corrected(js, ref) > epsilon_bare(js, ref))


# -- drive ----------------------------------------------------------------


def test_drive_energy_examples():
    e0 = 3.7e-24
    assert drive_energy(12.3, DriveSpec.static(e0)) == e0
    assert drive_energy(0.0, DriveSpec.single(e0, 0.3, 5.0)) == pytest.approx(1.3 * e0, rel=1e-15)
    two = DriveSpec(e0, (Tone(0, 2, 1.0), Tone(0, 2, 7.0)))
    assert drive_energy(0.0, two) == pytest.approx(5 * e0, rel=1e-15)
    t = np.linspace(0, 3, 7)
    single = DriveSpec.single(e0, 0.25, 2.0)
    assert np.allclose(drive_energy(t, single), e0 * (1 + 0.25 * np.cos(2.0 * t)), rtol=1e-15)


def test_drive_multi_tone_sum():
    e0 = 1.0
    d = DriveSpec(e0, ((0.1, 0.2, 3.0), (0.4, 0.0, 5.0)))
    t = 0.7
    expect = 1 + 0.1 * math.sin(3 * t) + 0.2 * math.cos(3 * t) + 0.4 * math.sin(5 * t)
    assert drive_energy(t, d) == pytest.approx(expect, rel=1e-15)


def test_chi_examples(ref):
    assert chi(0.0, DriveSpec.static(0.0), ref) == 0.0
    a = chi(0.3, DriveSpec.single(ref.e0, 0.1, 2.0), ref)
    b = chi(0.3, DriveSpec.single(2 * ref.e0, 0.1, 2.0), ref)
    assert b == pytest.approx(2 * a, rel=1e-15)
    val = chi(0.0, DriveSpec.static(ref.e0), ref)
    assert val == pytest.approx(HBAR * ref.e0 / 400 * FLUX_FACTOR, rel=1e-15)
    assert val == pytest.approx(CHI_STATIC_REF, rel=1e-11)


# -- properties -------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(params_strategy())
def test_dispersion_properties(p):
    js = np.arange(1, p.half + 1)
    w, u, e = omega_bare(js, p), upsilon_bare(js, p), epsilon_bare(js, p)
    assert np.all(np.diff(w) < 0) and np.all(np.diff(u) > 0) and np.all(np.diff(e) > 0)
    assert np.array_equal(omega_bare(-js, p), w)
    assert np.array_equal(upsilon_bare(-js, p), u)
    assert np.array_equal(wave_vector(-js, p), -wave_vector(js, p))
    ident = 4 * HBAR * w * sin_half(js, p) ** 2
    assert np.allclose(e, ident, rtol=1e-12, atol=0)
    wc, uc, ec = omega_corrected(js, p), upsilon_corrected(js, p), epsilon_corrected(js, p)
    if p.e0 > 0:
        assert np.all(wc > w) and np.all(uc > u) and np.all(ec > e)
        if p.half > 1:
            assert np.all(np.diff(wc - w) < 0) and np.all(np.diff(uc - u) < 0)
    else:
        assert np.array_equal(wc, w) and np.array_equal(uc, u)
