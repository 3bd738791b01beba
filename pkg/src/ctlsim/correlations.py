"""First- and second-order correlations of the resonant mode pair.

All raw quantities are normally ordered ladder-operator moments; the
``G`` values carry the field prefactors ``hbar / (N C w)`` per mode, so the
second-order prefactor is ``hbar^2 / (N^2 C_r C_l w u)``.  Normalized values
are ratios of raw moments and do not depend on the prefactors.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .circuit import CircuitParams, Line, ModeIndex, mode_frequency
from .constants import HBAR
from .dynamics.bogoliubov import BogoliubovTransform
from .dynamics.fock import FockState, annihilators
from .dynamics.gaussian import GaussianState
from .errors import NoInteraction, NotNormalizable, PoleAtTanSingularity
from .matching import ResonanceKind

ZERO_G1 = 1e-24  # raw G1 product below which g2 is not normalizable
POLE_COS = 1e-12


# ---------------------------------------------------------------------------
# prefactors


def g1_prefactor(params: CircuitParams, mode: ModeIndex, corrected: bool = False) -> float:
    cap = params.c_left if mode.line is Line.LEFT else params.c_right
    return HBAR / (params.n_cells * cap * mode_frequency(mode, params, corrected))


def g2_prefactor(params: CircuitParams, pair: Tuple[ModeIndex, ModeIndex], corrected: bool = False) -> float:
    """``hbar^2 / (N^2 C_r C_l w u)``; bare frequencies unless ``corrected``."""
    return g1_prefactor(params, pair[0], corrected) * g1_prefactor(params, pair[1], corrected)


def _prefactors(params, pair, corrected):
    if params is None:
        return 1.0, 1.0
    if pair is None:
        raise ValueError("a mode pair is required together with params")
    return g1_prefactor(params, pair[0], corrected), g1_prefactor(params, pair[1], corrected)


# ---------------------------------------------------------------------------
# request / result


@dataclass(frozen=True)
class FockPair:
    s_left: int
    s_right: int

    def __post_init__(self):
        if int(self.s_left) != self.s_left or int(self.s_right) != self.s_right:
            raise ValueError("photon numbers must be integers")
        if self.s_left < 0 or self.s_right < 0:
            raise ValueError("photon numbers must be non-negative")


VACUUM = FockPair(0, 0)

Initial = Union[FockPair, GaussianState]


@dataclass(frozen=True)
class CorrelationRequest:
    initial: Initial
    resonance: ResonanceKind
    t1: float
    t2: float

    def __post_init__(self):
        if self.t1 < 0 or self.t2 < 0:
            raise ValueError("times must be non-negative")


@dataclass(frozen=True)
class CorrelationResult:
    """One evaluation of ``G2(t1, t2)`` with the matching ``G1`` values.

    ``g2_normalized`` is ``None`` when either ``G1`` vanishes; call
    :meth:`normalized` to get an exception instead.
    """

    g2_unnormalized: float
    g2_normalized: Optional[float]
    prefactor: float
    g1_left: float
    g1_right: float
    pole: bool = False

    def normalized(self) -> float:
        if self.g2_normalized is None:
            cls = PoleAtTanSingularity if self.pole else NotNormalizable
            raise cls("first-order correlation vanishes; g2 is not normalizable")
        return self.g2_normalized

    def to_dict(self) -> dict:
        return {
            "g2_unnormalized": self.g2_unnormalized,
            "g2_normalized": self.g2_normalized,
            "prefactor": self.prefactor,
            "g1_left": self.g1_left,
            "g1_right": self.g1_right,
        }


def _real(x: complex, scale: float = 1.0) -> float:
    x = complex(x)
    if abs(x.imag) > 1e-9 * max(abs(x.real), scale, 1e-300):
        raise ValueError(f"expected a real moment, got {x}")
    # clip round-off below zero
    return max(0.0, x.real) if x.real > -1e-12 * max(scale, 1.0) else x.real


def _result(raw_g2, raw_l, raw_r, pl, pr, pole=False) -> CorrelationResult:
    raw_g2 = _real(raw_g2, max(abs(raw_l * raw_r), 1.0))
    raw_l, raw_r = _real(raw_l), _real(raw_r)
    norm = raw_l * raw_r
    g2n = raw_g2 / norm if norm > ZERO_G1 else None
    return CorrelationResult(raw_g2 * pl * pr, g2n, pl * pr, raw_l * pl, raw_r * pr, pole and g2n is None)


# ---------------------------------------------------------------------------
# closed forms for Fock inputs


def g2_hopping_raman_fock(
    s_left: int,
    s_right: int,
    xi: float,
    t1: float,
    t2: float,
    params: Optional[CircuitParams] = None,
    pair: Optional[Tuple[ModeIndex, ModeIndex]] = None,
    corrected: bool = False,
) -> CorrelationResult:
    """Beam-splitter correlations for the input ``|s_L, s_R>``.

    Evaluated in the product form
    ``s_L s_R (C1 C2 - S1 S2)^2 + s_L (s_L - 1) C1^2 S2^2 + s_R (s_R - 1) S1^2 C2^2``,
    which equals the tangent bracket times ``C1^2 C2^2`` but stays finite at
    ``cos(xi t) = 0`` and for empty modes.
    """
    FockPair(s_left, s_right)
    c1, s1 = math.cos(xi * t1), math.sin(xi * t1)
    c2, s2 = math.cos(xi * t2), math.sin(xi * t2)
    g2 = (
        s_left * s_right * (c1 * c2 - s1 * s2) ** 2
        + s_left * (s_left - 1) * c1**2 * s2**2
        + s_right * (s_right - 1) * s1**2 * c2**2
    )
    gl = s_left * c1**2 + s_right * s1**2
    gr = s_right * c2**2 + s_left * s2**2
    pl, pr = _prefactors(params, pair, corrected)
    pole = min(abs(c1), abs(c2)) < POLE_COS
    return _result(g2, gl, gr, pl, pr, pole)


def tan_bracket_g2(s_left: int, s_right: int, xi: float, t1: float, t2: float) -> float:
    """Raw moment from the tangent-bracket form (undefined where ``cos(xi t) = 0``)."""
    c1, c2 = math.cos(xi * t1), math.cos(xi * t2)
    if min(abs(c1), abs(c2)) < POLE_COS:
        raise PoleAtTanSingularity("tan(xi t) diverges")
    t1_, t2_ = math.tan(xi * t1), math.tan(xi * t2)
    bracket = (
        s_left * s_right * (1 - t1_ * t2_) ** 2
        + s_left * (s_left - 1) * t2_**2
        + s_right * (s_right - 1) * t1_**2
    )
    return c1**2 * c2**2 * bracket


def tanh_bracket_g2(s_left: int, s_right: int, xi: float, t1: float, t2: float) -> float:
    """Raw moment of the two-mode squeezer from the hyperbolic bracket."""
    c1, c2 = math.cosh(xi * t1), math.cosh(xi * t2)
    h1, h2 = math.tanh(xi * t1), math.tanh(xi * t2)
    sl, sr = s_left, s_right
    bracket = (
        sl * sr * (1 + h1 * h2)
        + (sl + 1) * (sr + 1) * (h1**2 * h2**2 + h1 * h2)
        + sl * (sl + 1) * h2**2
        + sr * (sr + 1) * h1**2
    )
    return c1**2 * c2**2 * bracket


def g2_squeeze_fock(
    s_left: int,
    s_right: int,
    xi: float,
    t1: float,
    t2: float,
    params: Optional[CircuitParams] = None,
    pair: Optional[Tuple[ModeIndex, ModeIndex]] = None,
    corrected: bool = False,
) -> CorrelationResult:
    """Two-mode squeezer correlations for the input ``|s_L, s_R>``."""
    FockPair(s_left, s_right)
    g2 = tanh_bracket_g2(s_left, s_right, xi, t1, t2)
    c1, s1 = math.cosh(xi * t1), math.sinh(xi * t1)
    c2, s2 = math.cosh(xi * t2), math.sinh(xi * t2)
    gl = s_left * c1**2 + (s_right + 1) * s1**2
    gr = s_right * c2**2 + (s_left + 1) * s2**2
    pl, pr = _prefactors(params, pair, corrected)
    return _result(g2, gl, gr, pl, pr)


def hom_dip(xi: float) -> float:
    """Time of vanishing coincidences, ``pi / (4 |xi|)``."""
    if xi == 0 or not math.isfinite(xi):
        raise NoInteraction("no beam-splitter coupling; the dip never occurs")
    return math.pi / (4.0 * abs(xi))


# ---------------------------------------------------------------------------
# generic path: Wick's theorem or direct Fock contraction


def _rows(tr: BogoliubovTransform, mode: int):
    """Coefficient rows over ``(c, c^dag)`` for ``c_mode(t)`` and its adjoint."""
    m = tr.matrix()
    n = tr.n_modes
    return m[mode], m[n + mode]


def _fock_operator(row: np.ndarray, cutoffs):
    a = annihilators(tuple(cutoffs))
    n = len(a)
    op = None
    for i, coeff in enumerate(row):
        if coeff == 0:
            continue
        base = a[i] if i < n else a[i - n].conj().T
        op = coeff * base if op is None else op + coeff * base
    if op is None:
        op = 0 * a[0]
    return op.tocsr()


def _padded(state: FockState, extra: int) -> FockState:
    """Grow cutoffs so ``extra`` creation steps never touch the top layer."""
    p = np.abs(state.tensor()) > 0
    need = []
    for k in range(state.n_modes):
        other = tuple(x for x in range(state.n_modes) if x != k)
        occupied = np.nonzero(p.any(axis=other) if other else p)[0]
        top = int(occupied.max()) if occupied.size else 0
        need.append(max(state.cutoffs[k], top + extra + 1))
    return state.resized(need)


def fock_moment(state: FockState, *rows: np.ndarray) -> complex:
    """``<(r_1.c)(r_2.c)...>`` on a Fock state (two or four factors), exactly."""
    if len(rows) not in (2, 4):
        raise ValueError("only second and fourth moments are supported")
    state = _padded(state, len(rows) // 2 + 1)
    ops = [_fock_operator(r, state.cutoffs) for r in rows]
    half = len(rows) // 2
    right = state.amplitudes
    for op in reversed(ops[half:]):
        right = op @ right
    left = state.amplitudes
    for op in ops[:half]:
        left = op.conj().T @ left
    return complex(np.vdot(left, right))


def _moment(state, *rows):
    if isinstance(state, GaussianState):
        return state.moment(*rows)
    if isinstance(state, FockState):
        return fock_moment(state, *rows)
    raise TypeError(f"unsupported state type {type(state).__name__}")


def _check_dims(state, *transforms):
    if not isinstance(state, (GaussianState, FockState)):
        raise TypeError(f"unsupported state type {type(state).__name__}")
    n = state.n_modes
    for tr in transforms:
        if tr.n_modes != n:
            raise ValueError(f"transform acts on {tr.n_modes} modes but the state has {n}")


def g1(
    mode: int,
    state: Union[GaussianState, FockState],
    transform: BogoliubovTransform,
    prefactor: float = 1.0,
) -> float:
    """``prefactor * <c^dag(t) c(t)>`` for mode index ``mode``."""
    _check_dims(state, transform)
    c, cd = _rows(transform, mode)
    return prefactor * _real(_moment(state, cd, c))


def g2_generic(
    state: Union[GaussianState, FockState],
    transform_t1: BogoliubovTransform,
    transform_t2: BogoliubovTransform,
    params: Optional[CircuitParams] = None,
    pair: Optional[Tuple[ModeIndex, ModeIndex]] = None,
    corrected: bool = False,
    modes: Tuple[int, int] = (0, 1),
) -> CorrelationResult:
    """``<a^dag(t1) b^dag(t2) a(t1) b(t2)>`` for any state and transforms.

    ``modes`` gives the positions of ``a`` and ``b`` in the transforms.
    """
    _check_dims(state, transform_t1, transform_t2)
    ia, ib = modes
    a1, ad1 = _rows(transform_t1, ia)
    b2, bd2 = _rows(transform_t2, ib)
    raw = _moment(state, ad1, bd2, a1, b2)
    gl = _moment(state, ad1, a1)
    gr = _moment(state, bd2, b2)
    pl, pr = _prefactors(params, pair, corrected)
    return _result(raw, gl, gr, pl, pr)


def evaluate(
    request: CorrelationRequest,
    xi: float,
    params: Optional[CircuitParams] = None,
    pair: Optional[Tuple[ModeIndex, ModeIndex]] = None,
    corrected: bool = False,
) -> CorrelationResult:
    """Dispatch a request to the closed form or, for Gaussian inputs, to Wick."""
    from .dynamics.bogoliubov import evolve_hopping, evolve_squeeze

    kind = request.resonance
    squeeze = kind is ResonanceKind.TwoModeSqueeze
    if not squeeze and kind not in (
        ResonanceKind.DegenerateHopping,
        ResonanceKind.RamanLtoR,
        ResonanceKind.RamanRtoL,
    ):
        raise ValueError(f"no correlation closed form for {kind.value}")
    init = request.initial
    if isinstance(init, FockPair):
        f = g2_squeeze_fock if squeeze else g2_hopping_raman_fock
        return f(init.s_left, init.s_right, xi, request.t1, request.t2, params, pair, corrected)
    if squeeze:
        tr1, tr2 = evolve_squeeze(xi, 0, 0, request.t1), evolve_squeeze(xi, 0, 0, request.t2)
    else:
        tr1, tr2 = evolve_hopping(xi, 0, request.t1), evolve_hopping(xi, 0, request.t2)
    return g2_generic(init, tr1, tr2, params, pair, corrected)
