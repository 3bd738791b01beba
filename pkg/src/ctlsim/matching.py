"""Phase matching: the C_r degeneracy solve, drive frequencies, and
classification of which couplings survive the rotating-wave approximation."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .circuit import (
    CircuitParams,
    DriveSpec,
    Line,
    ModeIndex,
    omega_corrected,
    upsilon_corrected,
)
from .errors import ModeDomainError, NoRootInBracket

DEFAULT_BRACKET = (1e-15, 1e-9)  # 1e-3 pF .. 1e3 pF
RELATIVE_TOL = 1e-6


class ResonanceKind(enum.Enum):
    DegenerateHopping = "degenerate_hopping"
    RamanLtoR = "raman_l_to_r"
    RamanRtoL = "raman_r_to_l"
    TwoModeSqueeze = "two_mode_squeeze"
    SingleModeSqueezeL = "single_mode_squeeze_l"
    SingleModeSqueezeR = "single_mode_squeeze_r"
    GeneralLinearDegenerate = "general_linear_degenerate"
    PositionPositionNondegenerate = "position_position_nondegenerate"


@dataclass(frozen=True)
class ResonanceSpec:
    """One activated resonance.

    ``detuning`` is the signed residual of the resonance condition in rad/s
    (it is never zeroed).  ``second_tone_index`` is only used by the
    position-position kind, which needs a Raman tone and a squeeze tone.
    """

    kind: ResonanceKind
    mode_left: Optional[ModeIndex]
    mode_right: Optional[ModeIndex]
    drive_tone_index: Optional[int]
    detuning: float
    second_tone_index: Optional[int] = None
    second_detuning: float = 0.0
    momentum_matched: bool = True

    @property
    def modes(self) -> Tuple[ModeIndex, ...]:
        return tuple(m for m in (self.mode_left, self.mode_right) if m is not None)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "mode_left": None if self.mode_left is None else str(self.mode_left),
            "mode_right": None if self.mode_right is None else str(self.mode_right),
            "drive_tone_index": self.drive_tone_index,
            "second_tone_index": self.second_tone_index,
            "detuning": self.detuning,
            "second_detuning": self.second_detuning,
            "momentum_matched": self.momentum_matched,
        }


# ---------------------------------------------------------------------------
# degeneracy solve


@dataclass(frozen=True)
class DegeneracySolution:
    j: int
    c_right: float
    residual: float  # |upsilon~ - omega~| / omega~
    iterations: int


def _degeneracy_residual(c_right: float, j: int, params: CircuitParams, target: float) -> float:
    return upsilon_corrected(j, params.with_(c_right=c_right)) - target


def degeneracy_solution(
    j: int,
    params: CircuitParams,
    bracket: Tuple[float, float] = DEFAULT_BRACKET,
    rel_width: float = 1e-12,
    max_newton: int = 8,
) -> DegeneracySolution:
    """Solve ``omega~_j(C_r) = upsilon~_j(C_r)`` for the right-line capacitance.

    ``upsilon~_j`` scales as ``C_r^(-1/2)`` and ``omega~_j`` does not depend on
    ``C_r`` at all, so the residual is strictly decreasing and bisection in
    ``log C_r`` always converges.  A few Newton steps (analytic derivative
    ``-upsilon~ / 2 C_r``) then push the residual to round-off.
    """
    if int(j) != j or j < 1 or j > params.half:
        raise ModeDomainError(f"degeneracy mode must satisfy 1 <= j <= {params.half}, got {j!r}")
    lo, hi = sorted(float(b) for b in bracket)
    if lo <= 0:
        raise ValueError("bracket must be strictly positive")
    target = omega_corrected(j, params)
    f_lo = _degeneracy_residual(lo, j, params, target)
    f_hi = _degeneracy_residual(hi, j, params, target)
    if f_lo == 0.0:
        return DegeneracySolution(j, lo, 0.0, 0)
    if f_hi == 0.0:
        return DegeneracySolution(j, hi, 0.0, 0)
    if not (f_lo > 0 > f_hi):
        raise NoRootInBracket(
            f"j={j}: residual does not change sign over [{lo:.6g}, {hi:.6g}] F "
            f"(f_lo={f_lo:.6g}, f_hi={f_hi:.6g})"
        )

    log_lo, log_hi = math.log(lo), math.log(hi)
    iterations = 0
    while log_hi - log_lo > rel_width:
        mid = 0.5 * (log_lo + log_hi)
        f_mid = _degeneracy_residual(math.exp(mid), j, params, target)
        iterations += 1
        # residual must be monotone in C_r
        if not (f_hi <= f_mid <= f_lo):
            raise RuntimeError(f"non-monotone degeneracy residual at C_r={math.exp(mid):.6g}")
        if f_mid > 0:
            log_lo, f_lo = mid, f_mid
        elif f_mid < 0:
            log_hi, f_hi = mid, f_mid
        else:
            log_lo = log_hi = mid
            break

    c_r = math.exp(0.5 * (log_lo + log_hi))
    f = _degeneracy_residual(c_r, j, params, target)
    for _ in range(max_newton):
        if f == 0.0:
            break
        deriv = -(f + target) / (2.0 * c_r)
        step = f / deriv
        trial = c_r - step
        f_trial = _degeneracy_residual(trial, j, params, target)
        iterations += 1
        if abs(f_trial) >= abs(f):
            break
        c_r, f = trial, f_trial
    return DegeneracySolution(j, c_r, abs(f) / target, iterations)


def solve_cr_for_degeneracy(
    j: int, params: CircuitParams, bracket: Tuple[float, float] = DEFAULT_BRACKET
) -> float:
    """Right-line capacitance [F] making mode ``j`` degenerate on both lines."""
    return degeneracy_solution(j, params, bracket).c_right


# ---------------------------------------------------------------------------
# drive frequencies


def raman_drive(j_left: int, j_right: int, params: CircuitParams) -> float:
    """``omega~_{j_left} - upsilon~_{j_right}``; negative means the mirrored
    resonance ``upsilon~ = omega~ + Omega``."""
    return omega_corrected(j_left, params) - upsilon_corrected(j_right, params)


def squeeze_drive(j_left: int, j_right: int, params: CircuitParams) -> float:
    """``omega~ + upsilon~``.  The caller pairs ``j_right = -j_left``."""
    return omega_corrected(j_left, params) + upsilon_corrected(j_right, params)


# ---------------------------------------------------------------------------
# classification


def default_tolerance(*freqs: float) -> float:
    return RELATIVE_TOL * max(abs(f) for f in freqs)


def classify_resonances(
    drive: DriveSpec,
    params: CircuitParams,
    mode_set: Iterable[ModeIndex],
    tol: Optional[float] = None,
) -> List[ResonanceSpec]:
    """Every resonance condition met within ``tol`` for the given drive.

    Left-right pairs are checked against hopping (no tone), Raman in both
    directions and two-mode squeezing (one tone each); single modes against
    single-mode squeezing.  Hopping additionally requires equal signed mode
    numbers.  Composite kinds are emitted on top of their ingredients: the
    general degenerate coupling when a hopping pair also has a tone at
    ``omega~ + upsilon~``, and the position-position coupling when a Raman
    tone and a different squeeze tone act on the same pair.

    With ``tol=None`` each comparison uses ``1e-6 * max(frequencies)``;
    ``tol=0`` demands exact equality.
    """
    if tol is not None and not tol >= 0:
        raise ValueError("tol must be non-negative")
    modes = sorted(set(mode_set))
    left = [m for m in modes if m.line is Line.LEFT]
    right = [m for m in modes if m.line is Line.RIGHT]
    w = {m: omega_corrected(m.j, params) for m in left}
    u = {m: upsilon_corrected(m.j, params) for m in right}
    tones = drive.tones
    out: List[ResonanceSpec] = []

    for a, b in itertools.product(left, right):
        wa, ub = w[a], u[b]
        tau = tol if tol is not None else default_tolerance(wa, ub)
        gap = wa - ub
        hop = a.j == b.j and abs(gap) <= tau
        if hop:
            out.append(ResonanceSpec(ResonanceKind.DegenerateHopping, a, b, None, gap))
        raman = []
        squeeze = []
        for m, tone in enumerate(tones):
            big = tone.omega
            if abs(gap) > tau:
                kind = ResonanceKind.RamanLtoR if gap > 0 else ResonanceKind.RamanRtoL
                det = abs(gap) - big
                if abs(det) <= tau:
                    out.append(ResonanceSpec(kind, a, b, m, det, momentum_matched=a.j == b.j))
                    raman.append((m, det))
            det = wa + ub - big
            if abs(det) <= tau:
                out.append(
                    ResonanceSpec(
                        ResonanceKind.TwoModeSqueeze, a, b, m, det, momentum_matched=a.j == -b.j
                    )
                )
                squeeze.append((m, det))
        if hop:
            for m, det in squeeze:
                out.append(
                    ResonanceSpec(ResonanceKind.GeneralLinearDegenerate, a, b, m, gap, m, det)
                )
        for (m1, d1), (m2, d2) in itertools.product(raman, squeeze):
            if m1 != m2:
                out.append(
                    ResonanceSpec(
                        ResonanceKind.PositionPositionNondegenerate, a, b, m1, d1, m2, d2,
                        momentum_matched=False,
                    )
                )

    for a in left + right:
        freq = w[a] if a.line is Line.LEFT else u[a]
        tau = tol if tol is not None else default_tolerance(freq)
        for m, tone in enumerate(tones):
            det = 2.0 * freq - tone.omega
            if abs(det) <= tau:
                if a.line is Line.LEFT:
                    out.append(ResonanceSpec(ResonanceKind.SingleModeSqueezeL, a, None, m, det))
                else:
                    out.append(ResonanceSpec(ResonanceKind.SingleModeSqueezeR, None, a, m, det))
    return out


def find(specs: Sequence[ResonanceSpec], kind: ResonanceKind, left=None, right=None):
    """Filter helper used by the CLI and tests."""
    return [
        s
        for s in specs
        if s.kind is kind
        and (left is None or s.mode_left == left)
        and (right is None or s.mode_right == right)
    ]
