"""Command-line front end: scenario configs, dispatch, artifact emission.

Configs are flat ``key = value`` text files with ``#`` comments; any key can
be overridden on the command line with trailing ``key=value`` arguments
(the command line wins).  Every run writes a ``run.log`` that echoes all
resolved parameters, defaults included, and is itself a valid config file,
so any artifact can be regenerated from its log alone.

Exit codes: 0 success, 2 configuration errors, 3 numerical failure,
4 netlist/readout errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .analysis import (
    SweepAxis,
    UnknownAxisParameterError,
    bench_formulations,
    compare_formulations,
    localization_degree,
    sweep,
)
from .backend import KERNEL_NAME
from .dynamics import AngleState, Constant, TanhRise
from .integrator import NonFiniteStateError, Scenario, SystemParams, integrate
from .qca import (
    IndeterminatePolarizationError,
    NetlistError,
    QcaCellState,
    UnknownNodeError,
    eval_circuit,
    load_netlist,
    polarization,
)
from .svg import heatmap, line_chart

TRAJECTORY_HEADER = "t,p_left,p_right,alpha,phi,re_aL,im_aL,re_aR,im_aR"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3
EXIT_NETLIST = 4


class ConfigError(ValueError):
    """Base for configuration failures (exit code 2)."""


class MissingKeyError(ConfigError):
    pass


class UnknownKeyError(ConfigError):
    pass


class TypeMismatchError(ConfigError):
    pass


def _to_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise TypeMismatchError(f"{key}: expected a number, got {raw!r}") from None


def _to_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise TypeMismatchError(f"{key}: expected an integer, got {raw!r}") from None


def _to_bool(key: str, raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise TypeMismatchError(f"{key}: expected a boolean, got {raw!r}")


def _to_str(key: str, raw: str) -> str:
    return raw.strip()


def _choice(*options: str) -> Callable[[str, str], str]:
    def parse(key: str, raw: str) -> str:
        val = raw.strip().lower()
        if val not in options:
            raise TypeMismatchError(f"{key}: expected one of {options}, got {raw!r}")
        return val
    return parse


def _to_float_list(key: str, raw: str) -> tuple[float, ...]:
    items = [s for s in raw.replace(",", " ").split() if s]
    if not items:
        raise TypeMismatchError(f"{key}: expected a comma-separated list of numbers")
    return tuple(_to_float(key, s) for s in items)


_REQUIRED = object()

# key -> (parser, default); _REQUIRED means the key must be present,
# None means optional with no default.
_SIM_KEYS: dict[str, tuple[Callable, Any]] = {
    "k": (_to_float, 1.0),
    "omega_coulomb": (_to_float, _REQUIRED),
    "rabi_ratio": (_to_float, _REQUIRED),
    # the source material never states the drive frequency; 10|k| is this
    # project's documented assumption and is echoed into every run log
    "omega_drive": (_to_float, 10.0),
    "phase": (_to_float, 0.0),
    "envelope": (_choice("constant", "tanh"), "constant"),
    "tau": (_to_float, None),
    "formulation": (_choice("amplitude", "angle"), "amplitude"),
    "initial": (_choice("left", "right", "custom"), "left"),
    "alpha0": (_to_float, None),
    "phi0": (_to_float, None),
    "lambda0": (_to_float, None),
    "t_end": (_to_float, None),  # defaulted from the envelope, see below
    "dt": (_to_float, 1e-3),
    "sample_stride": (_to_int, 10),
}

_OUTPUT_KEYS: dict[str, tuple[Callable, Any]] = {
    "out_dir": (_to_str, "."),
    "emit_svg": (_to_bool, False),
}

_KEYS_BY_COMMAND: dict[str, dict[str, tuple[Callable, Any]]] = {
    "simulate": {**_SIM_KEYS, **_OUTPUT_KEYS,
                 "window_start": (_to_float, None),
                 "window_end": (_to_float, None)},
    "compare": {**_SIM_KEYS, **_OUTPUT_KEYS},
    "bench": {**_SIM_KEYS, **_OUTPUT_KEYS, "repeats": (_to_int, 5)},
    "sweep": {**_SIM_KEYS, **_OUTPUT_KEYS,
              "sweep_param": (_to_str, _REQUIRED),
              "sweep_values": (_to_float_list, _REQUIRED),
              "sweep_param2": (_to_str, None),
              "sweep_values2": (_to_float_list, None)},
    "qca": {**_OUTPUT_KEYS,
            "netlist": (_to_str, _REQUIRED),
            "eta": (_to_float, 1.0),
            "tau_d": (_to_float, 1.0),
            "control_input": (_to_str, _REQUIRED),
            "control_bit": (_to_int, 0),
            "control_trajectory": (_to_str, None)},
}

COMMANDS = ("simulate", "compare", "bench", "sweep", "qca")


@dataclass
class RunConfig:
    command: str
    values: dict[str, Any]
    defaulted: set[str]

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)


def read_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat key = value file into raw strings."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    raw: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        raw[key.strip()] = value.strip()
    return raw


def parse_overrides(tokens: list[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for token in tokens:
        if "=" not in token:
            raise ConfigError(f"override {token!r} is not of the form key=value")
        key, _, value = token.partition("=")
        out[key.strip()] = value.strip()
    return out


def build_config(command: str, raw: dict[str, str]) -> RunConfig:
    """Validate raw key/value strings against the command's schema."""
    schema = _KEYS_BY_COMMAND[command]
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise UnknownKeyError(
            f"unknown key(s) for '{command}': {', '.join(unknown)}")

    values: dict[str, Any] = {}
    defaulted: set[str] = set()
    missing = [k for k, (_, default) in schema.items()
               if default is _REQUIRED and k not in raw]
    if missing:
        raise MissingKeyError(f"missing required key(s): {', '.join(missing)}")
    for key, (parse, default) in schema.items():
        if key in raw:
            values[key] = parse(key, raw[key])
        else:
            values[key] = None if default is None else default
            defaulted.add(key)

    cfg = RunConfig(command, values, defaulted)
    _cross_validate(cfg)
    return cfg


def _cross_validate(cfg: RunConfig) -> None:
    v = cfg.values
    if cfg.command == "qca":
        if v["control_bit"] not in (0, 1):
            raise TypeMismatchError("control_bit must be 0 or 1")
        return

    if v["envelope"] == "tanh":
        if v["tau"] is None:
            raise MissingKeyError("missing required key(s): tau (tanh envelope)")
    elif v["tau"] is not None:
        raise ConfigError("tau is only meaningful with envelope = tanh")

    if v["initial"] == "custom":
        need = [k for k in ("alpha0", "phi0") if v[k] is None]
        if need:
            raise MissingKeyError(
                f"missing required key(s): {', '.join(need)} (custom initial state)")
        if v["lambda0"] is None:
            v["lambda0"] = 0.0
            cfg.defaulted.add("lambda0")
    else:
        extra = [k for k in ("alpha0", "phi0", "lambda0") if v[k] is not None]
        if extra:
            raise ConfigError(
                f"{', '.join(extra)} only apply to initial = custom")

    if v["t_end"] is None:
        v["t_end"] = 15.0 * v["tau"] if v["envelope"] == "tanh" else 50.0
        cfg.defaulted.add("t_end")

    if cfg.command == "simulate":
        ws, we = v["window_start"], v["window_end"]
        if (ws is None) != (we is None):
            raise ConfigError("window_start and window_end must be given together")
        if ws is not None and not ws < we:
            raise ConfigError("window_start must be < window_end")

    if cfg.command == "sweep" and (v["sweep_param2"] is None) != (v["sweep_values2"] is None):
        raise ConfigError("sweep_param2 and sweep_values2 must be given together")


def scenario_from_config(cfg: RunConfig) -> Scenario:
    v = cfg.values
    try:
        params = SystemParams(k=v["k"], omega_coulomb=v["omega_coulomb"],
                              rabi_ratio=v["rabi_ratio"],
                              omega_drive=v["omega_drive"], phase=v["phase"])
        envelope = TanhRise(v["tau"]) if v["envelope"] == "tanh" else Constant()
        if v["initial"] == "custom":
            initial = AngleState(v["alpha0"], v["phi0"], v["lambda0"])
        else:
            initial = v["initial"]
        return Scenario(params=params, envelope=envelope, t_end=v["t_end"],
                        dt=v["dt"], sample_stride=v["sample_stride"],
                        formulation=v["formulation"], initial=initial)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(command: str, config_path: str, overrides: list[str],
                out_flag: str | None, svg_flag: bool) -> RunConfig:
    raw = read_config_file(config_path)
    raw.update(parse_overrides(overrides))
    if out_flag is not None:
        raw["out_dir"] = out_flag
    if svg_flag:
        raw["emit_svg"] = "true"
    return build_config(command, raw)


def _fmt_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(repr(float(x)) for x in value)
    return str(value)


def write_run_log(cfg: RunConfig, out_dir: Path, extra: dict[str, Any] | None = None) -> None:
    lines = [f"# dotsim {cfg.command} run log (dotsim {__version__}, {KERNEL_NAME} kernel)",
             f"# regenerate: dotsim {cfg.command} --config run.log"]
    for key, value in cfg.values.items():
        if value is None:
            continue
        mark = "  # default" if key in cfg.defaulted else ""
        lines.append(f"{key} = {_fmt_value(value)}{mark}")
    for key, value in (extra or {}).items():
        lines.append(f"# {key}: {value}")
    (out_dir / "run.log").write_text("\n".join(lines) + "\n")


def write_trajectory_csv(path: Path, traj) -> None:
    rows = [TRAJECTORY_HEADER]
    for i in range(len(traj)):
        vals = (traj.times[i], traj.p_left[i], traj.p_right[i],
                traj.alpha[i], traj.phi[i],
                traj.a_l[i].real, traj.a_l[i].imag,
                traj.a_r[i].real, traj.a_r[i].imag)
        rows.append(",".join(repr(float(x)) for x in vals))
    path.write_text("\n".join(rows) + "\n")


def read_trajectory_csv(path: str | Path) -> dict[str, list[float]]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"trajectory file not found: {path}")
    lines = path.read_text().strip().splitlines()
    header = lines[0].strip()
    if header != TRAJECTORY_HEADER:
        raise ConfigError(f"{path}: unexpected trajectory header {header!r}")
    cols: dict[str, list[float]] = {name: [] for name in header.split(",")}
    names = header.split(",")
    for line in lines[1:]:
        for name, field_ in zip(names, line.split(",")):
            cols[name].append(float(field_))
    if not cols["t"]:
        raise ConfigError(f"{path}: trajectory has no data rows")
    return cols


def _warnings_json(warnings) -> list[dict[str, Any]]:
    return [{"time": w.time, "kind": w.kind, "detail": w.detail} for w in warnings]


def _report_json(report) -> dict[str, Any]:
    return {"degree": report.degree, "variance": report.variance,
            "mean_p": report.mean_p, "window": list(report.window),
            "dot": report.dot}


def _write_json(path: Path, payload: dict[str, Any]) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _occupied_dot(scenario: Scenario) -> str:
    if scenario.initial == "right":
        return "right"
    if isinstance(scenario.initial, AngleState):
        return "left" if math.cos(scenario.initial.alpha) ** 2 >= 0.5 else "right"
    return "left"


def cmd_simulate(cfg: RunConfig) -> int:
    scenario = scenario_from_config(cfg)
    out = _out_dir(cfg)
    traj = integrate(scenario)

    window = None
    if cfg["window_start"] is not None:
        window = (cfg["window_start"], cfg["window_end"])
    dot = _occupied_dot(scenario)
    report = localization_degree(traj, dot=dot, window=window)
    payload: dict[str, Any] = {
        "localization": _report_json(report),
        "norm_drift": traj.norm_drift,
        "warnings": _warnings_json(traj.warnings),
        "backend": KERNEL_NAME,
    }
    if isinstance(scenario.envelope, TanhRise) and window is None:
        settled = localization_degree(
            traj, dot=dot, window=(scenario.t_end / 2.0, scenario.t_end))
        payload["settled_localization"] = _report_json(settled)

    write_trajectory_csv(out / "trajectory.csv", traj)
    _write_json(out / "report.json", payload)
    write_run_log(cfg, out, {"samples": len(traj), "backend": KERNEL_NAME})
    if cfg["emit_svg"]:
        line_chart(out / "trajectory.svg", traj.times,
                   [traj.p_left, traj.p_right], ["p_left", "p_right"],
                   "dot occupation probabilities", "t  [1/|k|]", "probability")
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    scenario = scenario_from_config(cfg)
    out = _out_dir(cfg)
    rep = compare_formulations(scenario)
    _write_json(out / "divergence.json", {
        "max_abs_dp": rep.max_abs_dp,
        "at_time": rep.at_time,
        "warnings_merged": _warnings_json(rep.warnings_merged),
        "backend": KERNEL_NAME,
    })
    write_run_log(cfg, out, {"backend": KERNEL_NAME})
    return EXIT_OK


def cmd_bench(cfg: RunConfig) -> int:
    scenario = scenario_from_config(cfg)
    out = _out_dir(cfg)
    rep = bench_formulations(scenario, repeats=cfg["repeats"])
    _write_json(out / "bench.json", {
        "per_formulation": {
            name: {"real_ode_dimension": c.real_ode_dimension,
                   "rhs_flop_estimate": c.rhs_flop_estimate,
                   "wall_time_total": c.wall_time_total,
                   "rhs_eval_count": c.rhs_eval_count}
            for name, c in rep.per_formulation.items()},
        "divergence": {"max_abs_dp": rep.divergence.max_abs_dp,
                       "at_time": rep.divergence.at_time,
                       "warnings_merged": _warnings_json(rep.divergence.warnings_merged)},
        "repeats": rep.repeats,
        "backend": rep.backend,
        "faster": rep.faster,
    })
    write_run_log(cfg, out, {"backend": KERNEL_NAME})
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    scenario = scenario_from_config(cfg)
    out = _out_dir(cfg)
    try:
        axes = [SweepAxis(cfg["sweep_param"], cfg["sweep_values"])]
        if cfg["sweep_param2"] is not None:
            axes.append(SweepAxis(cfg["sweep_param2"], cfg["sweep_values2"]))
        result = sweep(scenario, axes)
    except (UnknownAxisParameterError, ValueError) as exc:
        raise ConfigError(str(exc)) from None

    names = [axis.name for axis in result.axes]
    lines = [",".join(names + ["degree", "warnings"])]
    grids = [axis.values for axis in result.axes]
    for idx, combo in zip(product(*[range(len(g)) for g in grids]),
                          product(*grids)):
        degree = result.degrees[idx]
        count = result.warning_counts[idx]
        lines.append(",".join([repr(float(v)) for v in combo]
                              + [repr(float(degree)), str(int(count))]))
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    write_run_log(cfg, out, {"cells": int(result.degrees.size), "backend": KERNEL_NAME})

    if cfg["emit_svg"]:
        if len(result.axes) == 1:
            line_chart(out / "sweep.svg", result.axes[0].values,
                       [result.degrees], ["degree"],
                       "localization degree sweep", names[0], "degree")
        else:
            heatmap(out / "sweep.svg", result.degrees,
                    result.axes[1].values, result.axes[0].values,
                    "localization degree", names[1], names[0])
    return EXIT_OK


def _control_cell(cfg: RunConfig) -> QcaCellState:
    eta, tau_d = cfg["eta"], cfg["tau_d"]
    if cfg["control_trajectory"] is not None:
        cols = read_trajectory_csv(cfg["control_trajectory"])
        a_l = complex(cols["re_aL"][-1], cols["im_aL"][-1])
        a_r = complex(cols["re_aR"][-1], cols["im_aR"][-1])
        norm = math.hypot(abs(a_l), abs(a_r))
        if norm == 0.0:
            raise ConfigError(f"{cfg['control_trajectory']}: final state has zero norm")
        return QcaCellState(a_t=a_r / norm, a_b=a_l / norm, eta=eta, tau_d=tau_d)
    # bit 0 reads as P = +1, i.e. the top dot occupied
    if cfg["control_bit"] == 0:
        return QcaCellState(a_t=1.0 + 0.0j, a_b=0.0j, eta=eta, tau_d=tau_d)
    return QcaCellState(a_t=0.0j, a_b=1.0 + 0.0j, eta=eta, tau_d=tau_d)


def cmd_qca(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    netlist = load_netlist(cfg["netlist"])
    control_id = cfg["control_input"]
    if control_id not in netlist.input_ids:
        raise UnknownNodeError(f"control_input {control_id!r} is not an input cell")
    try:
        cell = _control_cell(cfg)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None

    free = [nid for nid in netlist.input_ids if nid != control_id]
    probes = list(netlist.probe_ids)
    lines = [",".join(free + probes)]
    for combo in product((0, 1), repeat=len(free)):
        bits = dict(zip(free, combo))
        result = eval_circuit(netlist, bits=bits, cells={control_id: cell})
        lines.append(",".join(str(b) for b in combo)
                     + ("," if free else "")
                     + ",".join(str(result[p]) for p in probes))
    (out / "truthtable.csv").write_text("\n".join(lines) + "\n")
    write_run_log(cfg, out, {
        "control_polarization": repr(polarization(cell)),
        "backend": KERNEL_NAME,
    })
    return EXIT_OK


_DISPATCH = {
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "bench": cmd_bench,
    "sweep": cmd_sweep,
    "qca": cmd_qca,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="dotsim",
        description="AC-driven coupled double quantum dot simulator")
    parser.add_argument("--version", action="version", version=f"dotsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "integrate one scenario and write trajectory + report",
        "compare": "cross-check the two formulations on one scenario",
        "bench": "time both formulations and report their cost",
        "sweep": "scan localization degree over a parameter grid",
        "qca": "evaluate a QCA netlist truth table with a control cell",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", required=True, help="scenario config file")
        p.add_argument("--out", default=None, help="output directory (default: .)")
        p.add_argument("--svg", action="store_true", help="also write SVG plots")
        p.add_argument("overrides", nargs="*", metavar="key=value",
                       help="config overrides (win over the file)")

    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, args.overrides,
                          args.out, args.svg)
        return _DISPATCH[args.command](cfg)
    except ConfigError as exc:
        print(f"dotsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteStateError as exc:
        print(f"dotsim: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except (NetlistError, IndeterminatePolarizationError) as exc:
        print(f"dotsim: netlist error: {exc}", file=sys.stderr)
        return EXIT_NETLIST


if __name__ == "__main__":
    sys.exit(main())
