"""Experiment driver.

Subcommands:
  simulate   one noisy walk, per-step fidelity and total probability
  sweep-a    the same walk at several gate-tuning efforts a
  tolerance  steps-within-tolerance table over the whole walk grid
  composite  composite-fidelity gain from raising the native rank bound

Configs are INI-style text (section headers, key = value). Unknown
sections or keys are rejected. Everything is deterministic; the
--seedless flag exists only to say so out loud.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import gates as gatelib
from .circuits import NativeGateSet, WalkSpec, uniform_spec
from .noise import NoiseParams
from .simulate import (
    DEFAULT_COMPARISON_NS,
    DEFAULT_FIDELITY_SETS,
    DEFAULT_TRANSITIONS,
    TOLERANCES,
    RunResult,
    UnsupportedSizeError,
    gate_set_comparison,
    run_noisy,
    tolerance_report,
)

KINDS = ("simulate", "sweep-a", "tolerance", "composite")

DEFAULT_A_LIST = (0.0, 13.0 / 3, 26.0 / 3, 13.0, 52.0 / 3, 65.0 / 3, 26.0)


class ConfigError(Exception):
    """Bad experiment config; the message names the offending key."""


@dataclass
class ExperimentConfig:
    kind: str | None = None
    position_qubits: int = 2
    coin_qubits: int = 1
    steps: int = 21
    theta: tuple[float, ...] = (math.pi / 2,)
    phi: tuple[float, ...] = (math.pi / 2,)
    max_rank: int = 3
    param_a: float | None = None
    a_list: tuple[float, ...] = DEFAULT_A_LIST
    eps_init: float = 0.003
    eps_read: float = 0.0017
    t1_seconds: float = 4.0
    tau_gate_seconds: float = 1.8e-6
    tau_move_seconds: float = 100e-6
    gate_errors: bool = True
    passive: bool = True
    spam: bool = True
    moves_per_step: int | None = None
    n_list: tuple[int, ...] = DEFAULT_COMPARISON_NS
    fidelity_sets: tuple[tuple[float, ...], ...] = DEFAULT_FIDELITY_SETS
    transitions: tuple[tuple[int, int], ...] = DEFAULT_TRANSITIONS
    out_path: str | None = None
    out_format: str = "csv"

    def walk_spec(self) -> WalkSpec:
        theta = self.theta if len(self.theta) > 1 else self.theta * self.steps
        phi = self.phi if len(self.phi) > 1 else self.phi * self.steps
        try:
            return WalkSpec(
                position_qubits=self.position_qubits,
                coin_qubits=self.coin_qubits,
                theta_schedule=theta,
                phi_schedule=phi if self.coin_qubits == 2 else None,
                steps=self.steps,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def gate_set(self, param_a: float | None = None) -> NativeGateSet:
        if param_a is None:
            param_a = self.param_a
        try:
            return NativeGateSet(max_rank=self.max_rank, param_a=param_a)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def noise_params(self) -> NoiseParams:
        try:
            return NoiseParams(
                eps_init=self.eps_init,
                eps_read=self.eps_read,
                t1=self.t1_seconds,
                tau_gate=self.tau_gate_seconds,
                tau_move=self.tau_move_seconds,
                gate_errors_enabled=self.gate_errors,
                passive_enabled=self.passive,
                spam_enabled=self.spam,
                moves_per_step=self.moves_per_step,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def _atom(text: str) -> float:
    text = text.strip()
    if text == "pi":
        return math.pi
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse number {text!r}") from exc


def _number(text: str) -> float:
    if "/" in text:
        num, _, den = text.partition("/")
        bottom = _atom(den)
        if bottom == 0:
            raise ConfigError(f"division by zero in {text!r}")
        return _atom(num) / bottom
    return _atom(text)


def _boolean(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("on", "true", "yes", "1"):
        return True
    if lowered in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"cannot parse boolean {text!r}")


def _number_list(text: str) -> tuple[float, ...]:
    return tuple(_number(part) for part in text.split(",") if part.strip())


# section -> key -> (config attribute, parser)
_CONFIG_SCHEMA = {
    "experiment": {"kind": ("kind", str.strip)},
    "walk": {
        "position_qubits": ("position_qubits", lambda s: int(s)),
        "coin_qubits": ("coin_qubits", lambda s: int(s)),
        "steps": ("steps", lambda s: int(s)),
        "theta": ("theta", _number_list),
        "phi": ("phi", _number_list),
    },
    "gates": {
        "max_rank": ("max_rank", lambda s: int(s)),
        "param_a": ("param_a", _number),
        "a_list": ("a_list", _number_list),
    },
    "noise": {
        "eps_init": ("eps_init", _number),
        "eps_read": ("eps_read", _number),
        "t1_seconds": ("t1_seconds", _number),
        "tau_gate_seconds": ("tau_gate_seconds", _number),
        "tau_move_seconds": ("tau_move_seconds", _number),
        "gate_errors": ("gate_errors", _boolean),
        "passive": ("passive", _boolean),
        "spam": ("spam", _boolean),
        "moves_per_step": ("moves_per_step", lambda s: int(s)),
    },
    "composite": {
        "n_list": ("n_list", lambda s: tuple(int(round(v)) for v in _number_list(s))),
        "fidelity_sets": (
            "fidelity_sets",
            lambda s: tuple(tuple(_number(v) for v in group.split()) for group in s.split(";") if group.strip()),
        ),
        "transitions": (
            "transitions",
            lambda s: tuple(
                tuple(int(r) for r in part.split("->")) for part in s.split(",") if part.strip()
            ),
        ),
    },
    "output": {
        "path": ("out_path", str.strip),
        "format": ("out_format", str.strip),
    },
}


def load_config(path: str | Path) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc

    config = ExperimentConfig()
    for section in parser.sections():
        if section not in _CONFIG_SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser[section].items():
            if key not in _CONFIG_SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            attribute, parse = _CONFIG_SCHEMA[section][key]
            try:
                setattr(config, attribute, parse(raw))
            except ConfigError:
                raise
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc
    if config.kind is not None and config.kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {config.kind!r}")
    if config.out_format not in ("csv", "json"):
        raise ConfigError(f"unknown output format {config.out_format!r}")
    return config


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _round12(value: float) -> float:
    return float(_fmt(value))


def _config_echo(config: ExperimentConfig) -> dict:
    return {
        "position_qubits": config.position_qubits,
        "coin_qubits": config.coin_qubits,
        "steps": config.steps,
        "theta": [_round12(v) for v in config.theta],
        "phi": [_round12(v) for v in config.phi] if config.coin_qubits == 2 else None,
        "max_rank": config.max_rank,
        "param_a": None if config.param_a is None else _round12(config.param_a),
        "noise": {
            "eps_init": config.eps_init,
            "eps_read": config.eps_read,
            "t1_seconds": config.t1_seconds,
            "tau_gate_seconds": config.tau_gate_seconds,
            "tau_move_seconds": config.tau_move_seconds,
            "gate_errors": config.gate_errors,
            "passive": config.passive,
            "spam": config.spam,
            "moves_per_step": config.moves_per_step,
        },
    }


def _step_rows(result: RunResult) -> list[dict]:
    rows = []
    for rec in result.steps:
        rows.append(
            {
                "step": rec.step,
                "fidelity": _round12(rec.fidelity),
                "total_probability": _round12(rec.total_probability),
                "scalar_factor": _round12(rec.scalar_factor),
                "ideal_positions": {k: _round12(v) for k, v in rec.ideal_positions.as_dict().items()},
                "noisy_positions": {k: _round12(v) for k, v in rec.noisy_positions.as_dict().items()},
            }
        )
    return rows


def cmd_simulate(config: ExperimentConfig) -> tuple[str, str, str]:
    """Returns (csv_text, json_text, report_text)."""
    result = run_noisy(config.walk_spec(), config.gate_set(), config.noise_params())
    lines = ["step,fidelity,total_probability"]
    for rec in result.steps:
        lines.append(f"{rec.step},{_fmt(rec.fidelity)},{_fmt(rec.total_probability)}")
    csv_text = "\n".join(lines) + "\n"

    payload = {"kind": "simulate", "config": _config_echo(config), "steps": _step_rows(result)}
    json_text = json.dumps(payload, indent=2, sort_keys=True) + "\n"

    fids = result.fidelities
    report = "\n".join(
        [
            f"walk: {config.coin_qubits}q-coin on {2**config.position_qubits} nodes, "
            f"{config.steps} steps, native max rank {config.max_rank}",
            f"f_1 = {_fmt(fids[0])}   f_{len(fids)} = {_fmt(fids[-1])}",
            "steps within tolerance: "
            + "  ".join(f"{tol:g}: {n}" for tol, n in tolerance_report(result).steps_within.items()),
        ]
    ) + "\n"
    return csv_text, json_text, report


def cmd_sweep_a(config: ExperimentConfig) -> tuple[str, str, str]:
    spec = config.walk_spec()
    noise = config.noise_params()
    series = []
    for a in config.a_list:
        if a < 0:
            raise ConfigError(f"a_list entries must be nonnegative, got {a}")
        result = run_noisy(spec, config.gate_set(param_a=a), noise)
        f_cz = gatelib.gate_fidelity(gatelib.param_gate("CZ", a), gatelib.ideal_ckz(1))
        f_ccz = gatelib.gate_fidelity(gatelib.param_gate("CCZ", a), gatelib.ideal_ckz(2))
        series.append((a, f_cz, f_ccz, result))

    lines = ["a,step,fidelity,total_probability,f_cz,f_ccz"]
    for a, f_cz, f_ccz, result in series:
        for rec in result.steps:
            lines.append(
                f"{_fmt(a)},{rec.step},{_fmt(rec.fidelity)},{_fmt(rec.total_probability)},"
                f"{_fmt(f_cz)},{_fmt(f_ccz)}"
            )
    csv_text = "\n".join(lines) + "\n"

    payload = {
        "kind": "sweep-a",
        "config": _config_echo(config),
        "series": [
            {
                "a": _round12(a),
                "f_cz": _round12(f_cz),
                "f_ccz": _round12(f_ccz),
                "steps": _step_rows(result),
            }
            for a, f_cz, f_ccz, result in series
        ],
    }
    json_text = json.dumps(payload, indent=2, sort_keys=True) + "\n"

    report_lines = ["a        F(CZ(a))      F(CCZ(a))     f_final"]
    for a, f_cz, f_ccz, result in series:
        report_lines.append(
            f"{_fmt(a):<8} {_fmt(f_cz):<13} {_fmt(f_ccz):<13} {_fmt(result.fidelities[-1])}"
        )
    return csv_text, json_text, "\n".join(report_lines) + "\n"


def cmd_tolerance(config: ExperimentConfig) -> tuple[str, str, str]:
    reports = []
    for max_rank in (3, 4):
        for coin_qubits in (1, 2):
            for position_qubits in (2, 3, 4):
                spec = uniform_spec(position_qubits, coin_qubits, steps=config.steps)
                gate_set = NativeGateSet(max_rank=max_rank, param_a=config.param_a)
                reports.append(tolerance_report(run_noisy(spec, gate_set, config.noise_params())))

    lines = ["max_rank,coin_qubits,position_qubits,tolerance,steps_within"]
    for rep in reports:
        for tol, steps in rep.steps_within.items():
            lines.append(f"{rep.max_rank},{rep.coin_qubits},{rep.position_qubits},{_fmt(tol)},{steps}")
    csv_text = "\n".join(lines) + "\n"

    payload = {
        "kind": "tolerance",
        "config": _config_echo(config),
        "rows": [
            {
                "max_rank": rep.max_rank,
                "coin_qubits": rep.coin_qubits,
                "position_qubits": rep.position_qubits,
                "steps_within": {_fmt(tol): steps for tol, steps in rep.steps_within.items()},
            }
            for rep in reports
        ],
    }
    json_text = json.dumps(payload, indent=2, sort_keys=True) + "\n"

    report_lines = ["rank  coin  nodes  " + "  ".join(f"<={tol:g}" for tol in TOLERANCES)]
    for rep in reports:
        cells = "  ".join(f"{rep.steps_within[tol]:6d}" for tol in TOLERANCES)
        report_lines.append(
            f"{rep.max_rank:>4}  {rep.coin_qubits:>4}  {2**rep.position_qubits:>5}  {cells}"
        )
    return csv_text, json_text, "\n".join(report_lines) + "\n"


def cmd_composite(config: ExperimentConfig) -> tuple[str, str, str]:
    try:
        comparison = gate_set_comparison(config.n_list, config.fidelity_sets, config.transitions)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    lines = ["position_qubits,transition,set_index,f_low,f_high,percent_increase"]
    for entry in comparison.entries:
        name = f"{entry.rank_low}->{entry.rank_high}"
        for i, (_, f_low, f_high, pct) in enumerate(entry.per_set):
            lines.append(
                f"{entry.position_qubits},{name},{i},{_fmt(f_low)},{_fmt(f_high)},{_fmt(pct)}"
            )
        lines.append(f"{entry.position_qubits},{name},mean,,,{_fmt(entry.mean_percent_increase)}")
    csv_text = "\n".join(lines) + "\n"

    payload = {
        "kind": "composite",
        "config": {
            "n_list": list(config.n_list),
            "fidelity_sets": [[_round12(f) for f in s] for s in config.fidelity_sets],
            "transitions": [f"{lo}->{hi}" for lo, hi in config.transitions],
        },
        "entries": [
            {
                "position_qubits": entry.position_qubits,
                "transition": f"{entry.rank_low}->{entry.rank_high}",
                "counts_low": {str(r): c for r, c in entry.counts_low.items()},
                "counts_high": {str(r): c for r, c in entry.counts_high.items()},
                "per_set": [
                    {
                        "fidelities": [_round12(f) for f in s],
                        "f_low": _round12(f_low),
                        "f_high": _round12(f_high),
                        "percent_increase": _round12(pct),
                    }
                    for s, f_low, f_high, pct in entry.per_set
                ],
                "mean_percent_increase": _round12(entry.mean_percent_increase),
            }
            for entry in comparison.entries
        ],
    }
    json_text = json.dumps(payload, indent=2, sort_keys=True) + "\n"

    report_lines = ["composite fidelity gains (2q-coin walk, per-step gate census)"]
    for entry in comparison.entries:
        report_lines.append(
            f"n={entry.position_qubits} G({entry.rank_low})->G({entry.rank_high}): "
            f"counts {entry.counts_low} -> {entry.counts_high}"
        )
        for s, f_low, f_high, pct in entry.per_set:
            report_lines.append(
                f"  set {tuple(_round12(f) for f in s)}: f {_fmt(f_low)} -> {_fmt(f_high)}  ({_fmt(pct)}%)"
            )
        report_lines.append(f"  mean increase: {_fmt(entry.mean_percent_increase)}%")
    return csv_text, json_text, "\n".join(report_lines) + "\n"


_COMMANDS = {
    "simulate": cmd_simulate,
    "sweep-a": cmd_sweep_a,
    "tolerance": cmd_tolerance,
    "composite": cmd_composite,
}

_POSITIONS_SCHEMA = {"type": "object", "additionalProperties": {"type": "number"}}
_STEP_SCHEMA = {
    "type": "object",
    "required": ["step", "fidelity", "total_probability", "scalar_factor", "ideal_positions", "noisy_positions"],
    "properties": {
        "step": {"type": "integer", "minimum": 1},
        "fidelity": {"type": "number", "minimum": 0, "maximum": 1},
        "total_probability": {"type": "number", "minimum": 0, "maximum": 1},
        "scalar_factor": {"type": "number", "minimum": 0, "maximum": 1},
        "ideal_positions": _POSITIONS_SCHEMA,
        "noisy_positions": _POSITIONS_SCHEMA,
    },
}

SCHEMAS = {
    "simulate": {
        "type": "object",
        "required": ["kind", "config", "steps"],
        "properties": {
            "kind": {"const": "simulate"},
            "config": {"type": "object"},
            "steps": {"type": "array", "items": _STEP_SCHEMA},
        },
    },
    "sweep-a": {
        "type": "object",
        "required": ["kind", "config", "series"],
        "properties": {
            "kind": {"const": "sweep-a"},
            "config": {"type": "object"},
            "series": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["a", "f_cz", "f_ccz", "steps"],
                    "properties": {
                        "a": {"type": "number", "minimum": 0},
                        "f_cz": {"type": "number"},
                        "f_ccz": {"type": "number"},
                        "steps": {"type": "array", "items": _STEP_SCHEMA},
                    },
                },
            },
        },
    },
    "tolerance": {
        "type": "object",
        "required": ["kind", "config", "rows"],
        "properties": {
            "kind": {"const": "tolerance"},
            "config": {"type": "object"},
            "rows": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["max_rank", "coin_qubits", "position_qubits", "steps_within"],
                    "properties": {
                        "max_rank": {"type": "integer"},
                        "coin_qubits": {"type": "integer"},
                        "position_qubits": {"type": "integer"},
                        "steps_within": {"type": "object", "additionalProperties": {"type": "integer"}},
                    },
                },
            },
        },
    },
    "composite": {
        "type": "object",
        "required": ["kind", "config", "entries"],
        "properties": {
            "kind": {"const": "composite"},
            "config": {"type": "object"},
            "entries": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["position_qubits", "transition", "counts_low", "counts_high", "per_set", "mean_percent_increase"],
                    "properties": {
                        "position_qubits": {"type": "integer"},
                        "transition": {"type": "string"},
                        "counts_low": {"type": "object", "additionalProperties": {"type": "integer"}},
                        "counts_high": {"type": "object", "additionalProperties": {"type": "integer"}},
                        "per_set": {"type": "array"},
                        "mean_percent_increase": {"type": "number"},
                    },
                },
            },
        },
    },
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="ringwalk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="experiment config file (INI-style)")
        cmd.add_argument("--out", help="output file path (default: print payload to stdout)")
        cmd.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
        cmd.add_argument(
            "--seedless",
            action="store_true",
            help="no-op: runs are deterministic, there is no seed to set",
        )
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config) if args.config else ExperimentConfig()
        if config.kind is not None and config.kind != args.command:
            raise ConfigError(
                f"config kind {config.kind!r} does not match subcommand {args.command!r}"
            )
        if args.out:
            config.out_path = args.out
        if args.format:
            config.out_format = args.format
        csv_text, json_text, report = _COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except UnsupportedSizeError as exc:
        print(f"unsupported size: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    payload = json_text if config.out_format == "json" else csv_text
    if config.out_path:
        Path(config.out_path).write_text(payload, encoding="utf-8")
        sys.stdout.write(report)
        sys.stdout.write(f"wrote {config.out_path}\n")
    else:
        sys.stdout.write(payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
