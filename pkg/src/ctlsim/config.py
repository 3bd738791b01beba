"""YAML run configuration with unit-suffixed values.

Every dimensional value may be a bare number (SI) or a string such as
``"0.4pF"``, ``"60 pH"``, ``"1.25uA"``, ``"5GHz"`` or ``"200mK"``.  Values are
converted to SI once, here; frequencies given in Hz-type units become angular
frequencies (``2 pi f``).  Unknown keys are rejected at every level.
"""

from __future__ import annotations

import math
import re
from decimal import Decimal
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from .circuit import CircuitParams, DriveSpec, ModeIndex, Tone
from .errors import ConfigError

# decimal exponents, so "1.25uA" becomes exactly float("1.25e-6")
_PREFIX = {"f": -15, "p": -12, "n": -9, "u": -6, "μ": -6, "µ": -6, "m": -3, "": 0, "k": 3, "M": 6, "G": 9, "T": 12}

_UNITS = {
    "capacitance": {"F": 1.0},
    "inductance": {"H": 1.0},
    "current": {"A": 1.0},
    "temperature": {"K": 1.0},
    "time": {"s": 1.0},
    "angular": {"rad/s": 1.0, "Hz": 2.0 * math.pi},
}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\s\d].*)?$")


def parse_quantity(value: Any, kind: str, where: str = "") -> float:
    """Convert ``value`` to SI for the dimension ``kind``."""
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a {kind}, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{where}: expected a {kind}, got {value!r}")
    m = _NUMBER.match(value)
    if not m:
        raise ConfigError(f"{where}: cannot parse {value!r}")
    number, unit = Decimal(m.group(1)), (m.group(2) or "").strip()
    if not unit:
        return float(number)
    for base, factor in _UNITS[kind].items():
        if unit.endswith(base):
            prefix = unit[: -len(base)]
            if prefix in _PREFIX:
                value = float(number.scaleb(_PREFIX[prefix]))
                return value * factor if factor != 1.0 else value
    raise ConfigError(f"{where}: unit {unit!r} is not a {kind} unit")


def _check_keys(block: Any, allowed, where: str) -> dict:
    if block is None:
        return {}
    if not isinstance(block, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(block).__name__}")
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(map(str, unknown))}")
    return block


def parse_mode(text: Any, where: str) -> ModeIndex:
    try:
        return ModeIndex.parse(str(text))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: bad mode {text!r} ({exc})") from exc


def parse_pair(value: Any, where: str) -> Tuple[ModeIndex, ModeIndex]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{where}: expected [left, right] modes")
    return parse_mode(value[0], where), parse_mode(value[1], where)


# ---------------------------------------------------------------------------
# sections


@dataclass(frozen=True)
class FrequencyRef:
    """A drive frequency tied to a resonance of a mode pair."""

    kind: str  # "raman" or "squeeze"
    pair: Tuple[ModeIndex, ModeIndex]


@dataclass(frozen=True)
class ToneConfig:
    eps: float
    kappa: float
    omega: Optional[float]
    ref: Optional[FrequencyRef] = None


@dataclass(frozen=True)
class RunConfig:
    circuit: CircuitParams
    c_right_solve: Optional[int]
    e0: Optional[float]
    tones: Tuple[ToneConfig, ...]
    commands: Dict[str, dict] = field(default_factory=dict)
    source: Optional[str] = None

    def drive(self, params: Optional[CircuitParams] = None) -> DriveSpec:
        """Resolve tone frequencies (some may depend on the solved circuit)."""
        from .matching import raman_drive, squeeze_drive

        params = params or self.circuit
        tones = []
        for t in self.tones:
            omega = t.omega
            if t.ref is not None:
                a, b = t.ref.pair
                f = raman_drive if t.ref.kind == "raman" else squeeze_drive
                omega = abs(f(a.j, b.j, params))
            tones.append(Tone(t.eps, t.kappa, omega))
        return DriveSpec(params.e0 if self.e0 is None else self.e0, tuple(tones))

    def command(self, name: str) -> dict:
        return self.commands.get(name, {}) or {}


_CIRCUIT_KEYS = {
    "c_left": "capacitance",
    "l_left": "inductance",
    "c_right": "capacitance",
    "l_right": "inductance",
    "i_crit": "current",
}

COMMANDS = ("dispersion", "match", "classify", "evolve", "g2", "hom", "power")


def _circuit(block) -> Tuple[CircuitParams, Optional[int]]:
    block = _check_keys(block, list(_CIRCUIT_KEYS) + ["n_cells", "dx", "e0_convention"], "circuit")
    missing = [k for k in list(_CIRCUIT_KEYS) + ["n_cells"] if k not in block]
    if missing:
        raise ConfigError(f"circuit: missing key(s) {', '.join(missing)}")
    values = {}
    solve = None
    for key, kind in _CIRCUIT_KEYS.items():
        raw = block[key]
        if key == "c_right" and isinstance(raw, dict):
            sub = _check_keys(raw, ["solve_degeneracy"], "circuit.c_right")
            if "solve_degeneracy" not in sub:
                raise ConfigError("circuit.c_right: expected solve_degeneracy")
            solve = int(sub["solve_degeneracy"])
            values[key] = 1e-12  # placeholder until solved
        else:
            values[key] = parse_quantity(raw, kind, f"circuit.{key}")
    try:
        params = CircuitParams(
            n_cells=block["n_cells"],
            dx=float(block.get("dx", 1.0)),
            e0_convention=block.get("e0_convention", "reduced"),
            **values,
        )
    except ValueError as exc:
        raise ConfigError(f"circuit: {exc}") from exc
    return params, solve


def _tones(block) -> Tuple[Optional[float], Tuple[ToneConfig, ...]]:
    block = _check_keys(block, ["e0", "tones"], "drive")
    e0 = None
    if "e0" in block:
        e0 = float(block["e0"])
    tones = []
    for k, raw in enumerate(block.get("tones", []) or []):
        where = f"drive.tones[{k}]"
        raw = _check_keys(raw, ["eps", "kappa", "omega"], where)
        if "omega" not in raw:
            raise ConfigError(f"{where}: missing omega")
        omega, ref = None, None
        if isinstance(raw["omega"], dict):
            sub = _check_keys(raw["omega"], ["raman", "squeeze"], f"{where}.omega")
            if len(sub) != 1:
                raise ConfigError(f"{where}.omega: give exactly one of raman/squeeze")
            kind, pair = next(iter(sub.items()))
            ref = FrequencyRef(kind, parse_pair(pair, f"{where}.omega.{kind}"))
        else:
            omega = parse_quantity(raw["omega"], "angular", f"{where}.omega")
        tones.append(ToneConfig(float(raw.get("eps", 0.0)), float(raw.get("kappa", 0.0)), omega, ref))
    return e0, tuple(tones)


def load_config(source) -> RunConfig:
    """Parse a YAML file path (or an already-loaded mapping)."""
    if isinstance(source, dict):
        tree, name = source, None
    else:
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
        try:
            tree = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
        name = str(path)
    tree = _check_keys(tree, ("circuit", "drive") + COMMANDS, "config")
    if "circuit" not in tree:
        raise ConfigError("config: missing circuit section")
    params, solve = _circuit(tree["circuit"])
    e0, tones = _tones(tree.get("drive"))
    commands = {k: tree[k] for k in COMMANDS if k in tree}
    return RunConfig(params, solve, e0, tones, commands, name)


def as_time(value, where) -> float:
    return parse_quantity(value, "time", where)


def as_temperature(value, where) -> float:
    return parse_quantity(value, "temperature", where)


def as_angular(value, where) -> float:
    return parse_quantity(value, "angular", where)


def as_modes(values, where) -> List[ModeIndex]:
    if not isinstance(values, (list, tuple)):
        raise ConfigError(f"{where}: expected a list of modes")
    return [parse_mode(v, where) for v in values]
