"""Experiment configuration: INI-style key=value sections, strictly validated.

Each CLI subcommand owns one schema; unknown keys, missing required keys, and
type mismatches are rejected with a diagnostic naming the key and its line.
History and forcing functions are either named primitives with numeric
arguments -- ``constant(c)``, ``exp(amp, rate)``, ``sin(amp, omega)``,
``gaussian-pulse(amp, center, width)`` -- or sampled tables from a two-column
CSV via ``table(path)``.  No expression interpreter is in scope.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "ConfigError",
    "FieldSpec",
    "RunConfig",
    "SCHEMAS",
    "named_function",
    "parse_config",
]


class ConfigError(Exception):
    """Invalid run configuration; maps to exit code 2."""


def _line_of(text: str, section: str, key: str | None = None) -> int:
    """Best-effort line number of a section or key for diagnostics."""
    in_section = section is None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            if key is None and line == f"[{section}]":
                return lineno
            in_section = line == f"[{section}]"
            continue
        if key is not None and in_section and re.match(rf"{re.escape(key)}\s*[=:]", line):
            return lineno
    return 0


def named_function(spec_text: str, base_dir: Path | None = None):
    """Build a callable of one real variable from a named-function string."""
    text = spec_text.strip()
    match = re.fullmatch(r"([a-zA-Z][a-zA-Z0-9_-]*)\s*\((.*)\)", text)
    if not match:
        raise ConfigError(
            f"expected name(arg, ...) for a function value, got {spec_text!r}"
        )
    name, argtext = match.group(1), match.group(2).strip()
    args = [a.strip() for a in argtext.split(",")] if argtext else []

    def floats(n):
        if len(args) != n:
            raise ConfigError(f"{name} takes {n} argument(s), got {len(args)}")
        try:
            return [float(a) for a in args]
        except ValueError as exc:
            raise ConfigError(f"non-numeric argument in {spec_text!r}") from exc

    if name == "constant":
        (value,) = floats(1)
        return lambda t: value + 0.0 * np.asarray(t, dtype=float)
    if name == "exp":
        amp, rate = floats(2)
        return lambda t: amp * np.exp(rate * np.asarray(t, dtype=float))
    if name == "sin":
        amp, omega = floats(2)
        return lambda t: amp * np.sin(omega * np.asarray(t, dtype=float))
    if name == "gaussian-pulse":
        amp, center, width = floats(3)
        if width <= 0:
            raise ConfigError("gaussian-pulse width must be positive")
        return lambda t: amp * np.exp(-(((np.asarray(t, dtype=float) - center) / width) ** 2))
    if name == "table":
        if len(args) != 1:
            raise ConfigError("table takes one argument: the CSV path")
        path = Path(args[0])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            data = np.loadtxt(path, delimiter=",", ndmin=2)
        except OSError as exc:
            raise ConfigError(f"cannot read table {path}: {exc}") from exc
        if data.shape[1] != 2 or data.shape[0] < 2:
            raise ConfigError(f"table {path} must have two columns and >= 2 rows")
        ts, vs = data[:, 0], data[:, 1]
        if (np.diff(ts) <= 0).any():
            raise ConfigError(f"table {path} times must be strictly increasing")
        return lambda t: np.interp(np.asarray(t, dtype=float), ts, vs)
    raise ConfigError(
        f"unknown function {name!r}; choose constant, exp, sin, gaussian-pulse or table"
    )


@dataclass(frozen=True)
class FieldSpec:
    """One schema entry: value kind, requiredness, default."""

    kind: str  # float | int | bool | str | float_list | func
    required: bool = False
    default: object = None
    choices: tuple[str, ...] | None = None


_NUMERICS_SCHEMA = {
    "lambert_tol": FieldSpec("float", default=1e-12),
    "lambert_max_iter": FieldSpec("int", default=100),
    "bisect_tol": FieldSpec("float", default=1e-13),
}

SCHEMAS: dict[str, dict[str, FieldSpec]] = {
    "delayed-exp": {
        "b": FieldSpec("float", required=True),
        "tau": FieldSpec("float", required=True),
        "t0": FieldSpec("float", required=False),
        "t1": FieldSpec("float", required=True),
        "cells": FieldSpec("int", default=400),
    },
    "ode": {
        "a": FieldSpec("float_list", required=True),
        "b": FieldSpec("float", required=True),
        "tau": FieldSpec("float", required=True),
        "T": FieldSpec("float", required=True),
        "u0": FieldSpec("float", required=True),
        "cells_per_tau": FieldSpec("int", default=200),
        "history": FieldSpec("func", required=True),
        "forcing": FieldSpec("func", default=None),
        "method": FieldSpec("str", default="closed", choices=("closed", "steps")),
    },
    "heat": {
        "kind": FieldSpec("str", required=True, choices=("dirichlet", "neumann")),
        "L": FieldSpec("float", required=True),
        "n_modes": FieldSpec("int", required=True),
        "tau": FieldSpec("float", required=True),
        "T": FieldSpec("float", required=True),
        "cells_per_tau": FieldSpec("int", default=40),
        "x_cells": FieldSpec("int", default=512),
        "x_out": FieldSpec("int", default=101),
        "c_a": FieldSpec("float", required=True),
        "c0": FieldSpec("float", default=0.0),
        "c_a_delay": FieldSpec("float", default=0.0),
        "c0_delay": FieldSpec("float", default=0.0),
        "u0": FieldSpec("func", required=True),
        "history": FieldSpec("func", required=True),
        "forcing_time": FieldSpec("func", default=None),
        "forcing_space": FieldSpec("func", default=None),
        "gamma_left": FieldSpec("func", default=None),
        "gamma_right": FieldSpec("func", default=None),
        "snapshot_times": FieldSpec("float_list", default=()),
    },
    "stability": {
        "kappa": FieldSpec("float", required=True),
        "tilde_kappa": FieldSpec("float", required=True),
        "tilde_lambda": FieldSpec("float", required=True),
        "tau": FieldSpec("float", required=True),
        "margin": FieldSpec("float", default=0.1),
        "eps": FieldSpec("float", default=None),
        "empirical": FieldSpec("bool", default=False),
        "seed": FieldSpec("int", default=0),
        "n_modes": FieldSpec("int", default=6),
        "cells_per_tau": FieldSpec("int", default=32),
        "horizon_intervals": FieldSpec("int", default=10),
        "length": FieldSpec("float", default=1.0),
    },
    "illposed": {
        "mode": FieldSpec("str", required=True, choices=("scan-m1", "root-m2", "construct")),
        # scan-m1
        "alpha": FieldSpec("float", required=False),
        "eps": FieldSpec("float", required=False),
        "tau": FieldSpec("float", required=False),
        "lambdas": FieldSpec("float_list", required=False),
        "blowup_time": FieldSpec("float", default=None),
        # root-m2
        "lam": FieldSpec("float", required=False),
        # construct
        "m": FieldSpec("int", required=False),
        "k_max": FieldSpec("int", required=False),
    },
    "laser": {
        "eps": FieldSpec("float", default=1.0),
        "n_modes": FieldSpec("int", default=5),
        "T": FieldSpec("float", default=400e-15),
        "cells_per_tau": FieldSpec("int", default=40),
        "x_cells": FieldSpec("int", default=512),
        "x_out": FieldSpec("int", default=101),
        "gamma_heat": FieldSpec("float", default=None),
        "c_e": FieldSpec("float", default=None),
        "tau": FieldSpec("float", default=None),
        "lambda_th": FieldSpec("float", default=None),
        "G": FieldSpec("float", default=None),
        "r_f": FieldSpec("float", default=None),
        "t_p": FieldSpec("float", default=None),
        "alpha_pen": FieldSpec("float", default=None),
        "J_fluence": FieldSpec("float", default=None),
        "L": FieldSpec("float", default=None),
        "theta_l": FieldSpec("float", default=None),
        "theta0": FieldSpec("float", default=None),
    },
}

# per-mode requirements of the illposed subcommand, validated after parsing
_ILLPOSED_REQUIRED = {
    "scan-m1": ("alpha", "eps", "tau", "lambdas"),
    "root-m2": ("lam", "alpha"),
    "construct": ("m", "alpha", "eps", "tau", "k_max"),
}
_ILLPOSED_ALLOWED = {
    "scan-m1": {"mode", "alpha", "eps", "tau", "lambdas", "blowup_time"},
    "root-m2": {"mode", "lam", "alpha"},
    "construct": {"mode", "m", "alpha", "eps", "tau", "k_max"},
}

_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}


def _convert(key: str, raw: str, spec: FieldSpec, text: str, section: str,
             base_dir: Path | None):
    def fail(msg):
        raise ConfigError(f"{msg} (key {key!r}, line {_line_of(text, section, key)})")

    raw = raw.strip()
    if spec.kind == "float":
        try:
            return float(raw)
        except ValueError:
            fail(f"expected a number, got {raw!r}")
    if spec.kind == "int":
        try:
            return int(raw)
        except ValueError:
            fail(f"expected an integer, got {raw!r}")
    if spec.kind == "bool":
        if raw.lower() in _BOOL_WORDS:
            return _BOOL_WORDS[raw.lower()]
        fail(f"expected true/false, got {raw!r}")
    if spec.kind == "float_list":
        try:
            return tuple(float(p) for p in raw.split(",") if p.strip())
        except ValueError:
            fail(f"expected a comma-separated list of numbers, got {raw!r}")
    if spec.kind == "str":
        if spec.choices and raw not in spec.choices:
            fail(f"expected one of {spec.choices}, got {raw!r}")
        return raw
    if spec.kind == "func":
        try:
            return named_function(raw, base_dir)
        except ConfigError as exc:
            fail(str(exc))
    raise AssertionError(f"unhandled field kind {spec.kind}")


@dataclass
class RunConfig:
    """A validated run: subcommand, typed parameters, tolerance overrides."""

    subcommand: str
    parameters: dict = field(default_factory=dict)
    numerics: dict = field(default_factory=dict)
    output_dir: Path | None = None


def parse_config(text: str, subcommand: str, base_dir: Path | None = None) -> RunConfig:
    """Parse and validate the configuration text for one subcommand.

    The file must contain a ``[<subcommand>]`` section; an optional
    ``[numerics]`` section overrides solver tolerances.  Numbers use a ``.``
    decimal separator; scientific notation is accepted.
    """
    if subcommand not in SCHEMAS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # keys are case-sensitive
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc

    for section in parser.sections():
        if section not in (subcommand, "numerics"):
            raise ConfigError(
                f"unexpected section [{section}] (line {_line_of(text, section)})"
            )
    if not parser.has_section(subcommand):
        raise ConfigError(f"missing required section [{subcommand}]")

    schema = SCHEMAS[subcommand]
    params = {}
    for key, raw in parser.items(subcommand):
        if key not in schema:
            raise ConfigError(
                f"unknown key {key!r} in [{subcommand}] "
                f"(line {_line_of(text, subcommand, key)})"
            )
        params[key] = _convert(key, raw, schema[key], text, subcommand, base_dir)
    for key, spec in schema.items():
        if key not in params:
            if spec.required:
                raise ConfigError(f"missing required key {key!r} in [{subcommand}]")
            if spec.default is not None or spec.kind == "func":
                params[key] = spec.default

    if subcommand == "illposed":
        mode = params["mode"]
        for key in _ILLPOSED_REQUIRED[mode]:
            if params.get(key) is None:
                raise ConfigError(f"illposed mode {mode!r} requires key {key!r}")
        for key in set(params) - _ILLPOSED_ALLOWED[mode]:
            if params[key] is not None and params[key] != SCHEMAS["illposed"][key].default:
                raise ConfigError(f"key {key!r} does not apply to illposed mode {mode!r}")

    numerics = {k: s.default for k, s in _NUMERICS_SCHEMA.items()}
    if parser.has_section("numerics"):
        for key, raw in parser.items("numerics"):
            if key not in _NUMERICS_SCHEMA:
                raise ConfigError(
                    f"unknown key {key!r} in [numerics] "
                    f"(line {_line_of(text, 'numerics', key)})"
                )
            numerics[key] = _convert(key, raw, _NUMERICS_SCHEMA[key], text, "numerics", base_dir)
        for key in ("lambert_tol", "bisect_tol"):
            if not numerics[key] > 0 or not math.isfinite(numerics[key]):
                raise ConfigError(f"numerics key {key!r} must be a positive number")
    return RunConfig(subcommand=subcommand, parameters=params, numerics=numerics)
