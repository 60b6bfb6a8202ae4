"""Command-line front end.

Every subcommand takes one JSON config (``--config``), optional dotted
``--set key=value`` overrides, and writes JSON or CSV to stdout or
``--out``. A relative ``--out`` is resolved against ``$QDEXCITON_OUTPUT_DIR``
when that variable is set.

Exit codes: 0 success, 2 invalid config, 3 numerical-contract failure,
4 verification mismatch.
"""

from __future__ import annotations

import argparse
import copy
import datetime as _dt
import itertools
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DecompositionMismatchError, InvalidArgumentError, QDError
from .gates import (
    SingleQubitGateSpec,
    apply_single,
    cnot_sequence,
    iswap,
    two_qubit_propagator,
    u_chi_gamma,
    u_x,
    u_z,
)
from .hamiltonians import HBAR_EV_FS, CoupledDotParams, DriveParams, coupled_hamiltonian, to_fs
from .operators import fidelity_up_to_phase, is_unitary
from .phases import phase_decomposition
from .propagation import IntegratorConfig, evolve_const, evolve_driven, period, state_from_label
from .scheduler import (
    fidelity_penalty,
    iswap_candidates,
    solve_iswap_timing,
    timing_fidelity,
)
from .serialize import csv_text, dumps, matrix_to_json

OUTPUT_DIR_ENV = "QDEXCITON_OUTPUT_DIR"
MAX_GRID = 10**6

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_MISMATCH = 0, 2, 3, 4

DEFAULTS = {
    "phase": {
        "drive": {"epsilon": 1.0, "amplitude": 0.2, "omega": 1.0, "phase": 0.0},
        "integrator": {},
    },
    "evolve": {
        "system": "driven",
        "drive": {"epsilon": 1.0, "amplitude": 0.2, "omega": 1.0, "phase": 0.0},
        "coupled": {"epsilon": 1.4, "coupling": 0.1},
        "t": None,
        "initial_state": None,
        "samples": 0,
        "integrator": {},
    },
    "gate": {
        "gate": "u_chi_gamma",
        "chi": 0.0,
        "gamma": 0.0,
        "qubit": None,
        "coupled": {"epsilon": 1.4, "coupling": 0.1},
        "t": 0.0,
    },
    "iswap-schedule": {
        "epsilon": 1.4,
        "v_target": 0.1,
        "k_max": 10,
        "m_max": 10,
        "candidates_csv": None,
    },
    "cnot-verify": {"tol": 1e-10},
    "sweep": {
        "kind": "drive",
        "base": {"epsilon": 1.0, "amplitude": 0.2, "omega": 1.0, "phase": 0.0},
        "axes": [],
        "quantities": ["gamma_geometric"],
        "integrator": {},
        "k_max": 10,
        "m_max": 10,
        "t": None,
    },
}

DRIVE_QUANTITIES = ("chi", "gamma_total", "gamma_dynamic", "gamma_geometric", "cyclicity_residual")
COUPLED_QUANTITIES = ("iswap_fidelity",)


class ConfigError(InvalidArgumentError):
    pass


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _apply_set(cfg: dict, assignment: str):
    key, sep, raw = assignment.partition("=")
    if not sep or not key:
        raise ConfigError(f"--set expects key=value, got {assignment!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    parts = key.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set {key}: {part} is not an object")
    node[parts[-1]] = value


def load_config(command: str, path: str | None, overrides) -> dict:
    cfg = copy.deepcopy(DEFAULTS[command])
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        cfg = _merge(cfg, doc)
    for item in overrides or ():
        _apply_set(cfg, item)
    return cfg


def _drive(d: dict) -> DriveParams:
    try:
        return DriveParams(
            float(d["epsilon"]), float(d["amplitude"]), float(d["omega"]), float(d.get("phase", 0.0))
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad drive parameters: {exc}") from None


def _coupled(d: dict) -> CoupledDotParams:
    try:
        return CoupledDotParams(float(d["epsilon"]), float(d["coupling"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad coupled-dot parameters: {exc}") from None


def _integrator(d: dict) -> IntegratorConfig:
    try:
        return IntegratorConfig(**d)
    except TypeError as exc:
        raise ConfigError(f"bad integrator config: {exc}") from None


def _integrator_dict(c: IntegratorConfig) -> dict:
    return {"steps_per_period": c.steps_per_period, "scheme": c.scheme, "tolerance": c.tolerance}


# --- commands ---------------------------------------------------------------
# Each returns (payload, exit_code); payload is a dict for JSON or a
# (columns, rows) pair for CSV.


def cmd_phase(cfg: dict, fmt: str):
    p = _drive(cfg["drive"])
    integ = _integrator(cfg.get("integrator") or {})
    dec = phase_decomposition(p, integ)
    out = {"drive": _drive_dict(p), **dec.as_dict()}
    if fmt == "csv":
        cols = list(out["drive"]) + list(dec.as_dict())
        return (cols, [list(out["drive"].values()) + list(dec.as_dict().values())]), EXIT_OK
    return out, EXIT_OK


def _drive_dict(p: DriveParams) -> dict:
    return {"epsilon": p.epsilon, "amplitude": p.amplitude, "omega": p.omega, "phase": p.phase}


def _sample_rows(times, states):
    rows = []
    for t, psi in zip(times, states):
        pops = np.abs(psi) ** 2
        phases = np.angle(psi)
        rows.append((float(t), pops, phases))
    return rows


def cmd_evolve(cfg: dict, fmt: str):
    system = cfg.get("system", "driven")
    n_samples = int(cfg.get("samples") or 0)
    if n_samples < 0 or n_samples > MAX_GRID:
        raise ConfigError("samples must lie in [0, 1e6]")
    out = {"system": system}
    if system == "driven":
        p = _drive(cfg["drive"])
        integ = _integrator(cfg.get("integrator") or {})
        t = period(p) if cfg.get("t") is None else float(cfg["t"])
        label = cfg.get("initial_state") or "0"
        psi0 = state_from_label(label)
        if psi0.size != 2:
            raise ConfigError("driven system takes a one-qubit initial state")
        res = evolve_driven(p, t, integ, initial_state=psi0 if n_samples else None)
        unitary = res.unitary
        out.update(drive=_drive_dict(p), integrator=_integrator_dict(integ),
                   scheme=res.scheme_used, step_count=res.step_count)
        rows = []
        if n_samples:
            idx = np.unique(np.round(np.linspace(0, len(res.times) - 1, n_samples)).astype(int))
            rows = _sample_rows(res.times[idx], res.states[idx])
        basis = ["0", "1"]
    elif system == "coupled":
        p = _coupled(cfg["coupled"])
        if cfg.get("t") is None:
            raise ConfigError("coupled evolution needs an explicit t")
        t = float(cfg["t"])
        h = coupled_hamiltonian(p)
        label = cfg.get("initial_state") or "01"
        psi0 = state_from_label(label)
        if psi0.size != 4:
            raise ConfigError("coupled system takes a two-qubit initial state")
        rows = []
        if n_samples:
            times = np.linspace(0.0, t, n_samples)
            rows = _sample_rows(times, [evolve_const(h, tk) @ psi0 for tk in times])
        unitary = evolve_const(h, t)
        out.update(coupled={"epsilon": p.epsilon, "coupling": p.coupling},
                   scheme="eigendecomposition", step_count=1)
        basis = ["00", "01", "10", "11"]
    else:
        raise ConfigError(f"unknown system {system!r}")
    out.update(t_invEV=t, t_fs=to_fs(t), initial_state=label, unitary=matrix_to_json(unitary),
               unitarity_ok=bool(is_unitary(unitary)))
    if fmt == "csv":
        cols = ["t_invEV", "t_fs"] + [f"P_{b}" for b in basis] + [f"phase_{b}" for b in basis]
        body = [[tk, to_fs(tk), *pops, *ph] for tk, pops, ph in rows]
        return (cols, body), EXIT_OK
    out["trajectory"] = [
        {"t_invEV": tk, "t_fs": to_fs(tk), "populations": list(pops), "phases": list(ph)}
        for tk, pops, ph in rows
    ]
    return out, EXIT_OK


def cmd_gate(cfg: dict, fmt: str):
    name = cfg.get("gate")
    params = {}
    if name == "u_chi_gamma":
        spec = SingleQubitGateSpec(float(cfg["chi"]), float(cfg["gamma"]))
        m, params = u_chi_gamma(spec), {"chi": spec.chi, "gamma": spec.gamma}
    elif name == "u_z":
        m, params = u_z(float(cfg["gamma"])), {"gamma_z": float(cfg["gamma"])}
    elif name == "u_x":
        m, params = u_x(float(cfg["gamma"])), {"gamma_x": float(cfg["gamma"])}
    elif name == "iswap":
        m = iswap()
    elif name == "cnot":
        m = cnot_sequence().matrix
    elif name == "two_qubit_propagator":
        p = _coupled(cfg["coupled"])
        m = two_qubit_propagator(p, float(cfg["t"]))
        params = {"epsilon": p.epsilon, "coupling": p.coupling, "t": float(cfg["t"])}
    else:
        raise ConfigError(f"unknown gate {name!r}")
    qubit = cfg.get("qubit")
    if qubit is not None:
        if m.shape != (2, 2):
            raise ConfigError("qubit lifting applies to single-qubit gates only")
        m = apply_single(m, int(qubit))
        params["qubit"] = int(qubit)
    if fmt == "csv":
        rows = [[i, j, m[i, j].real, m[i, j].imag] for i in range(m.shape[0]) for j in range(m.shape[1])]
        return (["row", "col", "re", "im"], rows), EXIT_OK
    return {"gate": name, "params": params, "dim": m.shape[0], "matrix": matrix_to_json(m),
            "unitary": bool(is_unitary(m))}, EXIT_OK


CANDIDATE_COLUMNS = ["k", "m", "t_invEV", "t_fs", "v_required_eV", "v_residual_eV", "fidelity"]


def _candidate_rows(cfg):
    eps = float(cfg["epsilon"])
    cands = iswap_candidates(eps, float(cfg["v_target"]), cfg["k_max"], cfg["m_max"])
    return [[s.k, s.m, s.t, s.t_fs, s.v_required, s.v_residual, timing_fidelity(s, eps)] for s in cands]


def cmd_iswap_schedule(cfg: dict, fmt: str):
    eps, v = float(cfg["epsilon"]), float(cfg["v_target"])
    k_max, m_max = cfg["k_max"], cfg["m_max"]
    if not isinstance(k_max, int) or not isinstance(m_max, int):
        raise ConfigError("k_max and m_max must be integers")
    if k_max * m_max > MAX_GRID:
        raise ConfigError("candidate grid exceeds 1e6 points")
    sol = solve_iswap_timing(eps, v, k_max, m_max)
    rows = _candidate_rows(cfg)
    if cfg.get("candidates_csv"):
        _write(_resolve_out(cfg["candidates_csv"]), csv_text(CANDIDATE_COLUMNS, rows))
    if fmt == "csv":
        return (CANDIDATE_COLUMNS, rows), EXIT_OK
    return {
        "epsilon_eV": eps,
        "solution": sol.as_dict(),
        "fidelity": timing_fidelity(sol, eps),
        "fidelity_at_target": fidelity_penalty(sol, eps, v),
        "candidates": len(rows),
        "hbar_eV_fs": HBAR_EV_FS,
    }, EXIT_OK


def _step_json(e) -> dict:
    return {"label": e.label, "name": e.name, "qubit": e.qubit, "angle": e.angle,
            "matrix": matrix_to_json(e.matrix)}


def _cnot_payload(passed, elements, composed, fidelities, control) -> dict:
    fids = {f"control_{k}": v for k, v in fidelities.items()}
    return {
        "passed": passed,
        "order": "operator product, rightmost element acts first",
        "sequence": [_step_json(e) for e in elements],
        "iswap_count": sum(1 for e in elements if e.name == "iSWAP"),
        "composed": matrix_to_json(composed),
        "fidelity": fidelities[control],
        "fidelities": fids,
        "control_qubit": control,
        "target_qubit": 3 - control,
    }


def cmd_cnot_verify(cfg: dict, fmt: str):
    tol = float(cfg.get("tol", 1e-10))
    try:
        seq = cnot_sequence(tol)
    except DecompositionMismatchError as exc:
        # report the closer of the two assignments and every step, for debugging
        control = max(exc.fidelities, key=exc.fidelities.get)
        out = _cnot_payload(False, exc.elements, exc.composed, exc.fidelities, control)
        out["message"] = str(exc)
        return out, EXIT_MISMATCH
    if fmt == "csv":
        rows = [[i, e.label, e.name, e.qubit, e.angle] for i, e in enumerate(seq.elements)]
        return (["position", "label", "name", "qubit", "angle"], rows), EXIT_OK
    return _cnot_payload(True, seq.elements, seq.matrix, seq.fidelities, seq.control), EXIT_OK


def _axis_values(axis: dict) -> list:
    if "name" not in axis:
        raise ConfigError("every sweep axis needs a name")
    if "values" in axis:
        vals = [float(v) for v in axis["values"]]
    else:
        try:
            vals = np.linspace(float(axis["start"]), float(axis["stop"]), int(axis["num"])).tolist()
        except KeyError as exc:
            raise ConfigError(f"axis {axis['name']}: missing {exc}") from None
    if not vals:
        raise ConfigError(f"axis {axis['name']} is empty")
    return vals


def sweep_rows(cfg: dict):
    """Evaluate the sweep grid; returns ``(columns, rows)`` in grid order."""
    kind = cfg.get("kind", "drive")
    allowed = DRIVE_QUANTITIES if kind == "drive" else COUPLED_QUANTITIES if kind == "coupled" else None
    if allowed is None:
        raise ConfigError(f"unknown sweep kind {kind!r}")
    quantities = list(cfg.get("quantities") or [])
    bad = [q for q in quantities if q not in allowed]
    if bad or not quantities:
        raise ConfigError(f"quantities {bad or quantities} not available for {kind} sweeps")
    axes = cfg.get("axes") or []
    names = [a.get("name") for a in axes]
    fields = ("epsilon", "amplitude", "omega", "phase") if kind == "drive" else ("epsilon", "coupling")
    if any(n not in fields for n in names) or len(set(names)) != len(names):
        raise ConfigError(f"sweep axes must be distinct members of {fields}, got {names}")
    values = [_axis_values(a) for a in axes]
    size = math.prod(len(v) for v in values)
    if size > MAX_GRID:
        raise ConfigError(f"sweep grid of {size} points exceeds 1e6")
    integ = _integrator(cfg.get("integrator") or {})
    rows = []
    for point in itertools.product(*values):
        params = dict(cfg["base"])
        params.update(zip(names, point))
        outputs, error = _sweep_point(kind, params, quantities, integ, cfg)
        rows.append([*point, *outputs, error])
    return names + quantities + ["error"], rows


def _sweep_point(kind, params, quantities, integ, cfg):
    try:
        if kind == "drive":
            dec = phase_decomposition(_drive(params), integ).as_dict()
            return [dec[q] for q in quantities], ""
        p = _coupled(params)
        if cfg.get("t") is not None:
            f = fidelity_up_to_phase(two_qubit_propagator(p, float(cfg["t"])), iswap())
        else:
            sol = solve_iswap_timing(p.epsilon, p.coupling, cfg["k_max"], cfg["m_max"])
            f = fidelity_penalty(sol, p.epsilon, p.coupling)
        return [f], ""
    except QDError as exc:
        return [None] * len(quantities), f"{type(exc).__name__}: {exc}"


def sweep_metadata(cfg: dict) -> dict:
    return {
        "toolkit_version": __version__,
        "integrator": _integrator_dict(_integrator(cfg.get("integrator") or {})),
        "hbar_eV_fs": HBAR_EV_FS,
        "kind": cfg.get("kind", "drive"),
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def cmd_sweep(cfg: dict, fmt: str):
    cols, rows = sweep_rows(cfg)
    if fmt == "csv":
        return (cols, rows), EXIT_OK
    return {"metadata": sweep_metadata(cfg), "columns": cols, "rows": rows}, EXIT_OK


COMMANDS = {
    "phase": cmd_phase,
    "evolve": cmd_evolve,
    "gate": cmd_gate,
    "iswap-schedule": cmd_iswap_schedule,
    "cnot-verify": cmd_cnot_verify,
    "sweep": cmd_sweep,
}


def _resolve_out(path: str) -> Path:
    out = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not out.is_absolute():
        out = Path(base) / out
    return out


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdexciton", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a (dotted) config key; VALUE parsed as JSON when possible")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def _error_payload(exc: Exception) -> dict:
    err = {"type": type(exc).__name__, "message": str(exc)}
    loops = getattr(exc, "loops", None)
    if loops:
        err["loops"] = [
            {"gamma_total": lp.gamma_total, "gamma_dynamic": lp.gamma_dynamic} for lp in loops
        ]
    return {"error": err}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, args.set)
        payload, code = COMMANDS[args.command](cfg, args.format)
    except QDError as exc:
        stdout.write(dumps(_error_payload(exc)))
        return exc.exit_code
    except (KeyError, TypeError, ValueError) as exc:
        stdout.write(dumps(_error_payload(ConfigError(f"invalid config: {exc}"))))
        return EXIT_CONFIG
    if args.format == "csv" and isinstance(payload, tuple):
        cols, rows = payload
        text = csv_text(cols, rows)
    else:
        text = dumps(payload)
    if args.out:
        out = _resolve_out(args.out)
        _write(out, text)
        if args.command == "sweep" and args.format == "csv":
            _write(out.with_name(out.name + ".meta.json"), dumps(sweep_metadata(cfg)))
    else:
        stdout.write(text)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
