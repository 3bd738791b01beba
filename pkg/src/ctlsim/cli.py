"""Command-line front end.

Every subcommand writes CSV data plus a JSON sidecar (resolved SI config,
tool version, invariant summary) into ``--out``.  The exit status is 0 only
if every computation finished and every runtime invariant held.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .circuit import (
    CircuitParams,
    L,
    R,
    DriveSpec,
    Line,
    epsilon_corrected,
    omega_bare,
    omega_corrected,
    upsilon_bare,
    upsilon_corrected,
    wave_vector,
)
from .config import (
    ConfigError,
    RunConfig,
    as_angular,
    as_modes,
    as_temperature,
    as_time,
    load_config,
    parse_mode,
    parse_pair,
    parse_quantity,
    _check_keys,
)
from .constants import HBAR
from .correlations import (
    FockPair,
    g1,
    g2_hopping_raman_fock,
    g2_squeeze_fock,
    hom_dip,
)
from .dynamics.bogoliubov import BogoliubovTransform
from .dynamics.fock import FockState, fock_propagate
from .dynamics.gaussian import GaussianState
from .dynamics.symplectic import (
    static_propagator,
    symplectic_defect,
    symplectic_propagate,
    symplectic_to_bogoliubov,
)
from .errors import CTLError
from .hamiltonian import (
    QuadraticHamiltonian,
    effective_couplings,
    full_hamiltonian,
    rwa_effective_hamiltonian,
)
from .matching import DEFAULT_BRACKET, classify_resonances, degeneracy_solution
from .thermo import BathSpec, simulate_amplifier

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_FAILED = 0, 1, 2, 3


@dataclass
class Invariant:
    name: str
    value: float
    limit: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.limit)

    def to_dict(self):
        return {"name": self.name, "value": self.value, "limit": self.limit, "passed": self.passed}


@dataclass
class Outcome:
    tables: Dict[str, Tuple[List[str], List[list]]] = field(default_factory=dict)
    report: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    invariants: List[Invariant] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)


@dataclass
class Context:
    config: RunConfig
    params: CircuitParams
    drive: DriveSpec
    tol: Optional[float]
    seed: Optional[int]
    threads: int


# ---------------------------------------------------------------------------
# helpers


def thread_count() -> int:
    raw = os.environ.get("CTL_SIM_THREADS")
    if not raw:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"CTL_SIM_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("CTL_SIM_THREADS must be >= 1")
    return n


def pmap(fn: Callable, items: Sequence, threads: int) -> list:
    """Ordered parallel map."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    return "" if value is None else str(value)


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _clean(obj):
    """Replace non-finite floats so the JSON stays standard."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not math.isfinite(obj):
        return None
    return obj


def write_json(path: Path, data: dict) -> None:
    text = json.dumps(_clean(data), indent=2, sort_keys=True, default=_json_default)
    try:
        path.write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def time_grid(opts: dict, xi: Optional[float], where: str) -> np.ndarray:
    """``{stop, num, start}`` in seconds, or ``{xi_t_stop, num}`` in units of 1/|xi|."""
    opts = _check_keys(opts, ["start", "stop", "num", "xi_t_start", "xi_t_stop"], where)
    num = int(opts.get("num", 101))
    if num < 1:
        raise ConfigError(f"{where}.num must be >= 1")
    if "xi_t_stop" in opts:
        if not xi:
            raise ConfigError(f"{where}: xi_t_stop needs a nonzero coupling")
        scale = 1.0 / abs(xi)
        return np.linspace(float(opts.get("xi_t_start", 0.0)) * scale, float(opts["xi_t_stop"]) * scale, num)
    if "stop" not in opts:
        raise ConfigError(f"{where}: give stop or xi_t_stop")
    return np.linspace(as_time(opts.get("start", 0.0), where), as_time(opts["stop"], where), num)


def _initial(raw, where):
    """``"vacuum"``, ``{fock: [sL, sR]}`` or ``{thermal: [nL, nR]}``."""
    if raw is None or raw == "vacuum":
        return "fock", (0, 0)
    raw = _check_keys(raw, ["fock", "thermal"], where)
    if len(raw) != 1:
        raise ConfigError(f"{where}: give exactly one of fock/thermal")
    kind, value = next(iter(raw.items()))
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{where}.{kind}: expected two entries")
    if kind == "fock":
        try:
            FockPair(*value)
        except ValueError as exc:
            raise ConfigError(f"{where}.fock: {exc}") from exc
        return kind, (int(value[0]), int(value[1]))
    return kind, (float(value[0]), float(value[1]))


_COUPLING = {"hopping": "xi_hp", "raman": "xi_rm", "squeeze": "xi_sq"}


def _xi(ctx: Context, opts: dict, kind: str, where: str) -> Tuple[float, Optional[tuple]]:
    if "xi" in opts:
        return as_angular(opts["xi"], f"{where}.xi"), (parse_pair(opts["pair"], where) if "pair" in opts else None)
    if "pair" not in opts:
        raise ConfigError(f"{where}: give xi or pair")
    pair = parse_pair(opts["pair"], f"{where}.pair")
    c = effective_couplings(pair, ctx.drive, ctx.params)
    return getattr(c, _COUPLING[kind]), pair


# ---------------------------------------------------------------------------
# subcommands


def cmd_dispersion(ctx: Context, opts: dict) -> Outcome:
    """Bare and corrected dispersion table, one row per j."""
    _check_keys(opts, [], "dispersion")
    p = ctx.params
    js = np.arange(1, p.half + 1)
    cols = [
        js,
        wave_vector(js, p),
        omega_bare(js, p),
        omega_corrected(js, p),
        upsilon_bare(js, p),
        upsilon_corrected(js, p),
        epsilon_corrected(js, p) / HBAR,
    ]
    rows = [list(r) for r in zip(*cols)]
    out = Outcome()
    out.tables["dispersion"] = (
        ["j", "k_j", "omega_bare", "omega_corrected", "upsilon_bare", "upsilon_corrected", "epsilon_corrected_over_hbar"],
        rows,
    )
    # monotonicity: count violations
    out.invariants.append(Invariant("omega_bare_decreasing_violations", float(np.sum(np.diff(cols[2]) >= 0)), 0))
    out.invariants.append(Invariant("upsilon_bare_increasing_violations", float(np.sum(np.diff(cols[4]) <= 0)), 0))
    last = rows[-1]
    out.report = {"n_rows": len(rows), "relative_gap_at_last_j": abs(last[3] - last[5]) / last[3]}
    return out


def cmd_match(ctx: Context, opts: dict) -> Outcome:
    """Solve C_r for degeneracy at each requested j."""
    opts = _check_keys(opts, ["j", "bracket"], "match")
    js = sorted({int(j) for j in (opts.get("j") or [])})
    bracket = DEFAULT_BRACKET
    if "bracket" in opts:
        lo, hi = opts["bracket"]
        bracket = (as_cap(lo), as_cap(hi))
    base = ctx.params

    def solve(j):
        try:
            s = degeneracy_solution(j, base, bracket)
            return {"j": j, "c_right": s.c_right, "c_right_pF": s.c_right * 1e12, "residual": s.residual, "iterations": s.iterations}
        except CTLError as exc:
            return {"j": j, "error": f"{type(exc).__name__}: {exc}"}

    results = pmap(solve, js, ctx.threads)
    out = Outcome(options={"j": js, "bracket": list(bracket)})
    out.report = {"solutions": results}
    rows = []
    for r in results:
        if "error" in r:
            out.failures.append(f"j={r['j']}: {r['error']}")
            continue
        rows.append([r["j"], r["c_right"], r["c_right_pF"], r["residual"], r["iterations"]])
        out.invariants.append(Invariant(f"degeneracy_residual_j{r['j']}", r["residual"], 1e-10))
    out.tables["match"] = (["j", "c_right", "c_right_pF", "residual", "iterations"], rows)
    return out


def as_cap(value):
    return parse_quantity(value, "capacitance", "match.bracket")


def cmd_classify(ctx: Context, opts: dict) -> Outcome:
    """List the resonances activated by the drive."""
    opts = _check_keys(opts, ["modes", "tol"], "classify")
    modes = as_modes(opts.get("modes", []), "classify.modes")
    tol = as_angular(opts["tol"], "classify.tol") if "tol" in opts else ctx.tol
    specs = classify_resonances(ctx.drive, ctx.params, modes, tol)
    out = Outcome(options={"modes": [str(m) for m in modes], "tol": tol})
    header = ["kind", "mode_left", "mode_right", "drive_tone_index", "detuning", "second_tone_index", "second_detuning", "momentum_matched"]
    rows = []
    for s in specs:
        d = s.to_dict()
        rows.append([d[k] for k in header])
    out.tables["resonances"] = (header, rows)
    out.report = {"resonances": [s.to_dict() for s in specs]}
    return out


def _occupations(state, tr: BogoliubovTransform) -> List[float]:
    return [g1(k, state, tr) for k in range(tr.n_modes)]


def cmd_evolve(ctx: Context, opts: dict) -> Outcome:
    """Mean occupations of a mode pair over a time grid."""
    opts = _check_keys(opts, ["pair", "initial", "t", "frame", "tol"], "evolve")
    if "pair" not in opts:
        raise ConfigError("evolve: pair is required")
    pair = parse_pair(opts["pair"], "evolve.pair")
    kind, init = _initial(opts.get("initial"), "evolve.initial")
    frame = opts.get("frame", "rwa")
    if frame not in ("rwa", "full"):
        raise ConfigError("evolve.frame must be rwa or full")
    tol = float(opts["tol"]) if "tol" in opts else ctx.tol
    out = Outcome()
    state = FockState.basis(init, (init[0] + 1, init[1] + 1)) if kind == "fock" else GaussianState.thermal(init)

    if frame == "rwa":
        specs = classify_resonances(ctx.drive, ctx.params, pair, tol)
        if specs:
            h = rwa_effective_hamiltonian(specs[0], ctx.drive, ctx.params, tol)
            resonance = specs[0].kind.value
        else:
            h = QuadraticHamiltonian.zeros(pair)
            resonance = None
        scale = max(np.max(np.abs(h.hopping)), np.max(np.abs(h.pairing))) / HBAR
        times = time_grid(opts.get("t"), scale or None, "evolve.t")
        mats = [static_propagator(h, t) for t in times]
        limit = 1e-10
    else:
        pieces = full_hamiltonian(ctx.params, ctx.drive, pair)
        resonance = "full"
        times = time_grid(opts.get("t"), None, "evolve.t")
        itol = 1e-10 if tol is None else tol
        mats, s = [], np.eye(4)
        for k, t in enumerate(times):
            if k:
                s = symplectic_propagate(pieces, times[k - 1], t, itol) @ s
            mats.append(s)
        limit = 10 * itol
    rows, worst = [], 0.0
    for t, s in zip(times, mats):
        tr = symplectic_to_bogoliubov(s)
        worst = max(worst, symplectic_defect(s), tr.canonical_defect() if frame == "rwa" else 0.0)
        occ = _occupations(state, tr)
        rows.append([t, occ[0], occ[1]])
    out.tables["evolve"] = (["t", "n_left", "n_right"], rows)
    out.invariants.append(Invariant("symplectic_defect", worst, limit))
    if frame == "rwa" and (resonance is None or h.conserves_number()):
        drift = max(abs(r[1] + r[2] - rows[0][1] - rows[0][2]) for r in rows)
        out.invariants.append(Invariant("number_drift", drift, 1e-10))
    out.options = {"pair": [str(m) for m in pair], "initial": {kind: list(init)}, "frame": frame, "tol": tol}
    out.report = {"resonance": resonance, "n_times": len(times)}
    return out


def cmd_g2(ctx: Context, opts: dict) -> Outcome:
    """Second-order correlation scan for Fock or vacuum inputs."""
    opts = _check_keys(opts, ["kind", "initial", "xi", "pair", "xi_t", "xi_t2", "corrected"], "g2")
    kind = opts.get("kind", "hopping")
    if kind not in _COUPLING:
        raise ConfigError("g2.kind must be hopping, raman or squeeze")
    _, init = _initial(opts.get("initial"), "g2.initial")
    if _ != "fock":
        raise ConfigError("g2.initial must be vacuum or a Fock pair")
    xi, pair = _xi(ctx, opts, kind, "g2")
    xt = _check_keys(opts.get("xi_t", {}), ["start", "stop", "num"], "g2.xi_t")
    grid = np.linspace(float(xt.get("start", 0.0)), float(xt.get("stop", 1.0)), int(xt.get("num", 101)))
    fixed = opts.get("xi_t2")
    f = g2_squeeze_fock if kind == "squeeze" else g2_hopping_raman_fock
    params = ctx.params if pair else None
    corrected = bool(opts.get("corrected", False))

    def point(x1):
        x2 = x1 if fixed is None else float(fixed)
        t1, t2 = x1 / abs(xi), x2 / abs(xi)
        r = f(init[0], init[1], xi, t1, t2, params, pair, corrected)
        return [x1, x2, t1, t2, r.g2_unnormalized, r.g2_normalized if r.g2_normalized is not None else float("nan")]

    rows = pmap(point, list(grid), ctx.threads)
    out = Outcome(options={"kind": kind, "initial": list(init), "xi": xi, "pair": [str(m) for m in pair] if pair else None, "xi_t2": fixed, "corrected": corrected})
    out.tables["g2"] = (["xi_t1", "xi_t2", "t1", "t2", "g2_unnormalized", "g2_normalized"], rows)
    out.invariants.append(Invariant("negative_g2", float(max(0.0, -min(r[4] for r in rows))), 0.0))
    finite = [r[5] for r in rows if math.isfinite(r[5])]
    out.report = {"xi": xi, "final_g2_normalized": rows[-1][5], "n_normalizable": len(finite)}
    if kind != "squeeze" and init == (1, 1) and finite:
        out.invariants.append(Invariant("g2_above_one", float(max(0.0, max(finite) - 1.0)), 1e-12))
    return out


def cmd_hom(ctx: Context, opts: dict) -> Outcome:
    """Two-photon interference dip and NOON-state check."""
    opts = _check_keys(opts, ["xi", "pair", "num", "cutoff"], "hom")
    xi, pair = _xi(ctx, opts, "hopping", "hom")
    t_dip = hom_dip(xi)
    num = int(opts.get("num", 201))
    cutoff = int(opts.get("cutoff", 10))
    times = np.linspace(0.0, 2 * t_dip, num)
    rows = []
    for t in times:
        r = g2_hopping_raman_fock(1, 1, xi, t, t)
        rows.append([t, xi * t, r.g2_normalized])
    at_dip = g2_hopping_raman_fock(1, 1, xi, t_dip, t_dip).g2_normalized
    modes = pair if pair else None
    h = QuadraticHamiltonian(modes or (L(1), R(1)), [[0, HBAR * xi], [HBAR * xi, 0]], np.zeros((2, 2)), [0, 0])
    psi = fock_propagate(h, FockState.basis((1, 1), (cutoff, cutoff)), t_dip)
    p11, p20, p02 = psi.probability((1, 1)), psi.probability((2, 0)), psi.probability((0, 2))
    out = Outcome(options={"xi": xi, "pair": [str(m) for m in pair] if pair else None, "num": num, "cutoff": cutoff})
    out.tables["hom"] = (["t", "xi_t", "g2_normalized"], rows)
    out.report = {"xi": xi, "t_dip": t_dip, "g2_at_dip": at_dip, "p_11": p11, "p_20": p20, "p_02": p02, "leakage": psi.leakage}
    out.invariants += [
        Invariant("g2_at_dip", at_dip, 1e-10),
        Invariant("p11_at_dip", p11, 1e-10),
        Invariant("noon_balance", max(abs(p20 - 0.5), abs(p02 - 0.5)), 1e-8),
    ]
    return out


def cmd_power(ctx: Context, opts: dict) -> Outcome:
    """Amplifier output power for a Raman-driven pair."""
    opts = _check_keys(opts, ["hot", "cold", "t"], "power")
    baths = []
    for name in ("hot", "cold"):
        b = _check_keys(opts.get(name), ["mode", "temperature"], f"power.{name}")
        if "mode" not in b or "temperature" not in b:
            raise ConfigError(f"power.{name}: mode and temperature are required")
        baths.append(BathSpec(as_temperature(b["temperature"], f"power.{name}.temperature"), parse_mode(b["mode"], f"power.{name}.mode")))
    hot, cold = baths
    pair = (hot.attached_mode, cold.attached_mode)
    left = hot.attached_mode if hot.attached_mode.line is Line.LEFT else cold.attached_mode
    right = cold.attached_mode if left is hot.attached_mode else hot.attached_mode
    xi = effective_couplings((left, right), ctx.drive, ctx.params).xi_rm
    t_opts = opts.get("t") or {"xi_t_stop": math.pi / 2, "num": 201}
    times = time_grid(t_opts, xi, "power.t")
    trace = simulate_amplifier(hot, cold, ctx.drive, ctx.params, times, ctx.tol)
    flow = trace.flow_power()
    rows = [list(r) for r in zip(trace.t, trace.power, trace.n_hot, trace.n_cold, flow)]
    out = Outcome(options={"hot": {"mode": str(hot.attached_mode), "temperature": hot.temperature}, "cold": {"mode": str(cold.attached_mode), "temperature": cold.temperature}})
    out.tables["power"] = (["t", "power", "n_hot", "n_cold", "flow_power"], rows)
    out.report = {"xi": trace.xi, "drive_freq": trace.drive_freq, "mean_power": trace.mean_power, "initial_occupations": list(trace.occupations0), "modes": [str(m) for m in pair]}
    peak = float(np.max(np.abs(trace.power)))
    if peak > 0 and trace.t.size > 2:
        err = float(np.max(np.abs(flow[1:-1] - trace.power[1:-1])) / peak)
        out.invariants.append(Invariant("energy_bookkeeping_rel", err, 1e-2))
    return out


COMMANDS: Dict[str, Callable[[Context, dict], Outcome]] = {
    "dispersion": cmd_dispersion,
    "match": cmd_match,
    "classify": cmd_classify,
    "evolve": cmd_evolve,
    "g2": cmd_g2,
    "hom": cmd_hom,
    "power": cmd_power,
}


# ---------------------------------------------------------------------------
# entry point


def build_context(config: RunConfig, tol: Optional[float], seed: Optional[int]) -> Context:
    params = config.circuit
    if config.c_right_solve is not None:
        sol = degeneracy_solution(config.c_right_solve, params)
        params = params.with_(c_right=sol.c_right)
    return Context(config, params, config.drive(params), tol, seed, thread_count())


def run(command: str, config: RunConfig, out_dir: Path, tol=None, seed=None) -> Tuple[int, dict]:
    """Execute one subcommand and write its files; returns (exit code, sidecar)."""
    ctx = build_context(config, tol, seed)
    if seed is not None:
        np.random.seed(seed)
    outcome = COMMANDS[command](ctx, config.command(command))
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for name, (header, rows) in outcome.tables.items():
        path = out_dir / f"{name}.csv"
        write_csv(path, header, rows)
        files.append(path.name)
    ok = all(i.passed for i in outcome.invariants) and not outcome.failures
    sidecar = {
        "command": command,
        "tool_version": __version__,
        "config": {
            "circuit": ctx.params.to_dict(),
            "c_right_solved_for_j": config.c_right_solve,
            "drive": {"e0": ctx.drive.e0, "tones": [{"eps": t.eps, "kappa": t.kappa, "omega": t.omega} for t in ctx.drive.tones]},
            "options": outcome.options,
            "tol": tol,
            "seed": seed,
        },
        "outputs": files,
        "report": outcome.report,
        "invariants": [i.to_dict() for i in outcome.invariants],
        "failures": outcome.failures,
        "status": "ok" if ok else "failed",
    }
    write_json(out_dir / f"{command}.json", sidecar)
    return (EXIT_OK if ok else EXIT_INVARIANT), sidecar


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctlsim", description="Composed transmission line simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or name).splitlines()[0])
        p.add_argument("--config", required=True, type=Path, help="YAML configuration file")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int, default=None, help="seed recorded for reruns")
        p.add_argument("--tol", type=float, default=None, help="resonance/integrator tolerance")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        code, sidecar = run(args.command, config, args.out, args.tol, args.seed)
    except ConfigError as exc:
        print(f"ctlsim {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CTLError, OSError, ValueError, RuntimeError) as exc:
        print(f"ctlsim {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED
    for inv in sidecar["invariants"]:
        if not inv["passed"]:
            print(f"ctlsim {args.command}: invariant {inv['name']} = {inv['value']:.3g} > {inv['limit']:.3g}", file=sys.stderr)
    for msg in sidecar["failures"]:
        print(f"ctlsim {args.command}: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
