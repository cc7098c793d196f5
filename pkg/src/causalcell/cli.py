"""Command-line front end: parameter sweeps written as CSV.

Every command accepts ``--config FILE`` with ``key = value`` lines (``#``
starts a comment); keys are the long flag names with or without dashes.
Flags given on the command line override the file.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from . import gibbs_charger as gc
from . import stabilizer as st
from . import unitary_charger as uc
from .errors import InvalidInput, NumericalFailure

COLUMNS = {
    "unitary": ["t", "prob_minus", "rho11", "rho22", "coherence_abs", "energy"],
    "unitary-optimal": ["omega", "k", "x1", "y1", "x2", "y2", "t_min", "probability",
                        "probability_simulated", "fidelity_excited"],
    "gibbs": ["t", "prob_minus", "excited_pop", "coherence_abs"],
    "gibbs-compare": ["p", "f", "g", "h", "f_weak_approx"],
    "stabilize": ["t", "P", "C", "prob_plus", "fidelity"],
    "rescue-time": ["t_rescue", "fidelity", "prob_plus", "branch_duration"],
}

# name -> (type, default); None default means "required or derived"
PARAMS = {
    "unitary": {"omega": (float, 1.0), "x1": (float, 0.0), "y1": (float, 0.0),
                "x2": (float, math.sqrt(8.0)), "y2": (float, 0.0), "t_max": (float, math.pi),
                "steps": (int, 201), "branch_duration": (str, "full")},
    "unitary-optimal": {"omega": (float, 1.0), "k": (int, 1)},
    "gibbs": {"omega": (float, 1.0), "coupling": (float, 1.0), "p": (float, 0.25),
              "beta": (float, None), "t_max": (float, None), "steps": (int, 401),
              "branch_duration": (str, "half"), "convention": (str, "standard")},
    "gibbs-compare": {"omega": (float, 1.0), "coupling": (float, 1.0), "p_steps": (int, 501)},
    "stabilize": {"ha_x": (float, 12.0), "ha_y": (float, 5.0), "ha_z": (float, 0.0),
                  "t_max": (float, 0.5), "steps": (int, 501), "branch_duration": (str, "half"),
                  "reference": (str, "hamiltonian")},
    "rescue-time": {"ha_x": (float, 12.0), "ha_y": (float, 5.0), "ha_z": (float, 0.0),
                    "t_max": (float, 1.0), "branch_duration": (str, "half"),
                    "threshold": (float, 0.999), "reference": (str, "hamiltonian")},
}

_ALL_FLAGS = ["omega", "coupling", "p", "beta", "k", "x1", "y1", "x2", "y2", "t_max", "steps",
              "p_steps", "ha_x", "ha_y", "ha_z", "threshold"]
_CHOICES = {"branch_duration": ("half", "full"), "convention": ("standard", "verbatim"),
            "reference": ("hamiltonian", "computational")}


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def read_config(path: str | os.PathLike) -> dict:
    out = {}
    for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def resolve(command: str, flags: dict, config: dict) -> dict:
    """Merge defaults, config-file values and flags; coerce and validate types."""
    spec = PARAMS[command]
    unknown = sorted(set(config) - set(spec))
    if unknown:
        raise InvalidInput(f"unknown key(s) for {command}: {', '.join(unknown)}")
    merged = {k: default for k, (_, default) in spec.items()}
    merged.update(config)
    merged.update({k: v for k, v in flags.items() if k in spec and v is not None})
    out = {}
    for key, (typ, _) in spec.items():
        value = merged[key]
        if value is None:
            out[key] = None
            continue
        try:
            out[key] = typ(value)
        except (TypeError, ValueError):
            raise InvalidInput(f"{key}: cannot read {value!r} as {typ.__name__}") from None
        if isinstance(out[key], float) and not math.isfinite(out[key]):
            raise InvalidInput(f"{key} must be finite")
        if key in _CHOICES and out[key] not in _CHOICES[key]:
            raise InvalidInput(f"{key} must be one of {', '.join(_CHOICES[key])}")
    for key in ("steps", "p_steps"):
        if key in out and out[key] < 1:
            raise InvalidInput(f"{key} must be at least 1")
    for key in ("omega", "t_max"):
        if out.get(key) is not None and out[key] <= 0:
            raise InvalidInput(f"{key} must be positive")
    return out


def thread_count() -> int:
    raw = os.environ.get("CAUSALCELL_THREADS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidInput("CAUSALCELL_THREADS must be an integer") from None


def parallel_map(fn: Callable, items: Iterable) -> list:
    """Order-preserving map, threaded when ``CAUSALCELL_THREADS`` > 1."""
    items = list(items)
    n = thread_count()
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _grid(t_max: float, steps: int) -> np.ndarray:
    return np.linspace(0.0, t_max, steps)


# --- commands --------------------------------------------------------------

def cmd_unitary(p: dict) -> list[list]:
    proto = uc.UnitaryProtocol(p["omega"], uc.ChargerSpec(p["x1"], p["y1"]), uc.ChargerSpec(p["x2"], p["y2"]))
    ratio = st.BRANCH_DURATIONS[p["branch_duration"]]

    def row(t):
        _, minus = uc.simulate(proto, t * ratio / uc.BRANCH_RATIO)
        m = minus.unnormalized
        energy = uc.battery_energy(minus.state, p["omega"]) if minus.defined else float("nan")
        return [t, minus.probability, m[0, 0].real, m[1, 1].real, abs(m[0, 1]), energy]

    return parallel_map(row, _grid(p["t_max"], p["steps"]))


def cmd_unitary_optimal(p: dict) -> list[list]:
    if p["k"] < 1:
        raise InvalidInput("k must be a positive integer")
    proto = uc.optimal_protocol(p["omega"], p["k"])
    t_min = uc.optimal_time(p["omega"])
    _, minus = uc.simulate(proto, t_min)
    return [[p["omega"], p["k"], proto.c1.x, proto.c1.y, proto.c2.x, proto.c2.y, t_min,
             uc.success_probability(p["k"]), minus.probability, uc.excited_fidelity(minus)]]


def _gibbs_spec(p: dict) -> gc.GibbsSpec:
    if p.get("beta") is not None:
        return gc.GibbsSpec.from_beta(p["omega"], p["coupling"], p["beta"])
    return gc.GibbsSpec(p["omega"], p["coupling"], p["p"])


def cmd_gibbs(p: dict) -> list[list]:
    spec = _gibbs_spec(p)
    conv = gc.STANDARD if p["convention"] == "standard" else gc.VERBATIM
    ratio = st.BRANCH_DURATIONS[p["branch_duration"]]
    t_max = p["t_max"] if p["t_max"] is not None else gc.minus_period(spec, conv, ratio)

    def row(t):
        minus = gc.switched_charge(spec, conv, t, branch_ratio=ratio)[1]
        if minus.state is None:
            return [t, minus.probability, float("nan"), float("nan")]
        return [t, minus.probability, minus.state[0, 0].real, abs(minus.state[0, 1])]

    return parallel_map(row, _grid(t_max, p["steps"]))


def cmd_gibbs_compare(p: dict) -> list[list]:
    def row(pop):
        spec = gc.GibbsSpec(p["omega"], p["coupling"], float(pop))
        return [pop, gc.f_of_p(spec), gc.g_of_p(spec), gc.h_of_p(pop), gc.weak_coupling_f(pop)]

    return parallel_map(row, np.linspace(0.0, 0.5, p["p_steps"]))


def _stab_spec(p: dict) -> st.StabilizerSpec:
    spec = st.StabilizerSpec.from_drive(p["ha_x"], p["ha_y"], p["ha_z"], reference=p["reference"])
    return st.with_branch_duration(spec, p["branch_duration"])


def cmd_stabilize(p: dict) -> list[list]:
    spec = _stab_spec(p)
    ref = st.initial_state(spec)
    return parallel_map(lambda t: list(st._point(spec, float(t), ref)), _grid(p["t_max"], p["steps"]))


def cmd_rescue_time(p: dict) -> list[list]:
    res = st.find_rescue_time(_stab_spec(p), p["t_max"], p["threshold"])
    return [[res.t_rescue, res.fidelity, res.prob_plus, p["branch_duration"]]]


COMMANDS = {
    "unitary": cmd_unitary,
    "unitary-optimal": cmd_unitary_optimal,
    "gibbs": cmd_gibbs,
    "gibbs-compare": cmd_gibbs_compare,
    "stabilize": cmd_stabilize,
    "rescue-time": cmd_rescue_time,
}


def write_csv(rows: list[list], columns: list[str], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt(v) for v in r])


def metadata(command: str, params: dict) -> dict:
    meta = {"command": command, "parameters": {k: v for k, v in sorted(params.items())}}
    if command in ("gibbs", "gibbs-compare"):
        meta["raising_lowering_scale"] = gc.STANDARD_SCALE if params.get("convention", "standard") == "standard" else gc.PAPER_SCALE
        meta["battery_initial_state"] = "thermal, diag(p, 1-p)"
    if "branch_duration" in params:
        meta["branch_duration"] = params["branch_duration"]
    return meta


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causalcell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        for flag in _ALL_FLAGS:
            if flag in PARAMS[name]:
                typ = PARAMS[name][flag][0]
                sp.add_argument("--" + flag.replace("_", "-"), dest=flag, type=typ, default=None)
        for flag, choices in _CHOICES.items():
            if flag in PARAMS[name]:
                sp.add_argument("--" + flag.replace("_", "-"), dest=flag, choices=choices, default=None)
        sp.add_argument("--out", default="-", help="CSV path, '-' for stdout")
        sp.add_argument("--config", default=None, help="key = value parameter file")
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = read_config(args.config) if args.config else {}
        params = resolve(args.command, vars(args), config)
        rows = COMMANDS[args.command](params)
    except (InvalidInput, ValueError, OSError) as exc:
        print(f"causalcell: error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"causalcell: numerical failure: {exc}", file=sys.stderr)
        return 3
    columns = COLUMNS[args.command]
    if args.out == "-":
        write_csv(rows, columns, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, columns, fh)
        Path(args.out + ".meta.json").write_text(
            json.dumps(metadata(args.command, params), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
