"""Command-line front end.

Experiments are described by INI-style config files with typed,
strictly-validated sections; subcommands read a config, run one tool
and write plain-text results plus CSV traces into an output directory.
Every failure class maps to a distinct exit code, documented in the
command help.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import configparser
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .controller import FoPidController
from .fraccalc import ConvergenceError, DifferintegralSpec, gl_differint, ml_derivative
from .identify import IdentProblem, MeasuredResponse, identify
from .loopsim import (LoopConfig, LoopDivergedError, SimulationTrace,
                      compute_metrics, simulate_closed_loop)
from .plant import (FractionalPlant, PlantValidationError, TimeGrid,
                    simulate_plant, validate_plant)
from .synthesis import (NonPhysicalSolutionError, SynthesisConvergenceError,
                        SynthesisMode, min_gain, poles_from_measures,
                        solve_controller_params, verify_stability)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "run_command",
    "main",
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_DOMAIN",
    "EXIT_DIVERGED",
    "EXIT_NO_CONVERGENCE",
    "EXIT_IO",
]

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_DIVERGED = 4
EXIT_NO_CONVERGENCE = 5
EXIT_IO = 6

_EXIT_DOC = """\
exit codes:
  0  success
  2  configuration error (unknown key, type error, missing section)
  3  invalid domain value (plant or parameter validation failed)
  4  simulation diverged (the partial trace is still written)
  5  iterative solver failed (no convergence or non-physical solution)
  6  input or output file could not be accessed
"""


class ConfigError(Exception):
    """One or more configuration problems; ``errors`` lists them all."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


# value kinds: key -> (kind, default); None marks a required key and
# _OPTIONAL a key that may be absent with no default
_OPTIONAL = object()

_SCHEMA = {
    "plant": {
        "coeffs": ("floats", None),
        "orders": ("floats", None),
    },
    "controller": {
        "K": ("float", None),
        "Ti": ("float", 0.0),
        "lambda": ("nonneg_float", 0.0),
        "Td": ("float", 0.0),
        "delta": ("nonneg_float", 0.0),
    },
    "sim": {
        "h": ("pos_float", None),
        "T_final": ("pos_float", None),
        "L": ("duration", math.inf),
        "setpoint": ("float", 1.0),
        "step_time": ("nonneg_float", 0.0),
        "filter_coeff": ("pos_float", 0.5),
        "settle_band": ("pos_float", 2.0),
        "divergence_bound": ("pos_float", 1e6),
        "delay": ("bool", False),
    },
    "synthesis": {
        "S_t": ("pos_float", None),
        "T_l": ("pos_float", None),
        "K": ("float", _OPTIONAL),
        "E_t": ("pos_float", _OPTIONAL),
        "mode": ("choice:pd_delta,pi_lambda,pid_fixed_lambda", "pd_delta"),
        "Ti": ("float", 0.0),
        "lambda": ("nonneg_float", 0.0),
        "tol": ("pos_float", 1e-10),
        "max_iter": ("pos_int", 100),
        "grid_density": ("pos_int", 40),
    },
    "identify": {
        "data": ("str", None),
        "free": ("names", None),
        "budget": ("pos_int", 2000),
        "xatol": ("pos_float", 1e-6),
        "amplitude": ("float", 1.0),
    },
    "mleval": {
        "alpha": ("pos_float", None),
        "beta": ("pos_float", None),
        "z": ("complex", None),
        "n": ("nonneg_int", 0),
        "tol": ("pos_float", 1e-12),
    },
    "differint": {
        "data": ("str", None),
        "order": ("float", None),
        "L": ("duration", math.inf),
    },
}

_REQUIRED_SECTIONS = {
    "simulate": ("plant", "controller", "sim"),
    "synthesize": ("plant", "synthesis"),
    "identify": ("plant", "identify"),
    "mleval": ("mleval",),
    "differint": ("differint",),
}

_HOME_SECTION = {
    "simulate": "sim",
    "synthesize": "synthesis",
    "identify": "identify",
    "mleval": "mleval",
    "differint": "differint",
}

_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}


def _finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be a finite number")
    return value


def _parse_value(kind: str, text: str):
    text = text.strip()
    if not text:
        raise ValueError("empty value")
    if kind == "float":
        return _finite_float(text)
    if kind == "pos_float":
        value = _finite_float(text)
        if not value > 0:
            raise ValueError("must be positive")
        return value
    if kind == "nonneg_float":
        value = _finite_float(text)
        if value < 0:
            raise ValueError("must be non-negative")
        return value
    if kind == "duration":
        if text.lower() in ("inf", "unbounded"):
            return math.inf
        value = _finite_float(text)
        if not value > 0:
            raise ValueError("must be positive or 'unbounded'")
        return value
    if kind == "pos_int":
        value = int(text)
        if not value > 0:
            raise ValueError("must be a positive integer")
        return value
    if kind == "nonneg_int":
        value = int(text)
        if value < 0:
            raise ValueError("must be a non-negative integer")
        return value
    if kind == "bool":
        try:
            return _BOOL_WORDS[text.lower()]
        except KeyError:
            raise ValueError("must be true or false") from None
    if kind == "floats":
        return [_finite_float(part) for part in text.split(",")]
    if kind == "names":
        names = [part.strip() for part in text.split(",")]
        if any(not name.isidentifier() for name in names):
            raise ValueError("must be a comma-separated list of parameter names")
        return names
    if kind == "complex":
        value = complex(text.replace(" ", ""))
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ValueError("must be finite")
        return value
    if kind == "str":
        return text
    if kind.startswith("choice:"):
        choices = kind[len("choice:"):].split(",")
        if text not in choices:
            raise ValueError(f"must be one of {', '.join(choices)}")
        return text
    raise AssertionError(f"unhandled kind {kind}")


def _is_bound_key(section: str, key: str) -> bool:
    # identify sections carry per-parameter bounds as <name>_min/<name>_max
    if section != "identify":
        return False
    base, _, suffix = key.rpartition("_")
    return suffix in ("min", "max") and base.isidentifier()


def _apply_overrides(raw: dict, overrides, command: str | None) -> None:
    home = _HOME_SECTION.get(command) if command else None
    errors = []
    for item in overrides:
        if "=" not in item:
            errors.append(f"override {item!r}: expected KEY=VALUE")
            continue
        key, value = item.split("=", 1)
        key = key.strip()
        if "." in key:
            section, key = key.split(".", 1)
            key = key.strip()
        elif home is not None:
            section = home
        else:
            errors.append(f"override {item!r}: use SECTION.KEY=VALUE")
            continue
        raw.setdefault(section.strip(), {})[key] = value.strip()
    if errors:
        raise ConfigError(errors)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, typed view of one experiment description."""

    sections: dict

    def section(self, name: str) -> dict | None:
        return self.sections.get(name)

    def build_plant(self) -> FractionalPlant:
        sec = self.sections["plant"]
        try:
            return validate_plant(sec["coeffs"], sec["orders"])
        except PlantValidationError as exc:
            raise ConfigError([f"plant: {exc}"]) from exc

    def build_controller(self) -> FoPidController:
        sec = self.sections["controller"]
        try:
            return FoPidController(sec["K"], ti=sec["Ti"], lam=sec["lambda"],
                                   td=sec["Td"], delta=sec["delta"])
        except ValueError as exc:
            raise ConfigError([f"controller: {exc}"]) from exc

    def build_loop(self) -> LoopConfig:
        sec = self.sections["sim"]
        try:
            grid = TimeGrid(sec["h"], sec["T_final"])
            return LoopConfig(self.build_plant(), self.build_controller(), grid,
                              memory_length=sec["L"], setpoint=sec["setpoint"],
                              setpoint_time=sec["step_time"],
                              filter_coeff=sec["filter_coeff"],
                              divergence_bound=sec["divergence_bound"],
                              delayed_input=sec["delay"])
        except ValueError as exc:
            raise ConfigError([f"sim: {exc}"]) from exc


def parse_config(text: str, command: str | None = None,
                 overrides=()) -> ExperimentConfig:
    """Parse and validate an experiment description.

    Unknown sections or keys, type errors, and missing required keys are
    all collected and reported together in one ConfigError.  When
    ``command`` is given, its required sections are enforced too.
    Overrides are KEY=VALUE strings, optionally SECTION.KEY=VALUE;
    unqualified keys land in the command's own section.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"config syntax: {exc}"]) from exc
    raw = {name: dict(parser.items(name)) for name in parser.sections()}
    _apply_overrides(raw, overrides, command)
    errors = []
    sections = {}
    for name, entries in raw.items():
        spec = _SCHEMA.get(name)
        if spec is None:
            errors.append(f"unknown section [{name}]")
            continue
        parsed = {}
        for key, text_value in entries.items():
            if key in spec:
                kind = spec[key][0]
            elif _is_bound_key(name, key):
                kind = "float"
            else:
                errors.append(f"{name}.{key}: unknown key")
                continue
            try:
                parsed[key] = _parse_value(kind, text_value)
            except ValueError as exc:
                errors.append(f"{name}.{key}: {exc}")
        for key, (kind, default) in spec.items():
            if key in parsed or key in entries:
                continue
            if default is None:
                errors.append(f"{name}.{key}: required key missing")
            elif default is not _OPTIONAL:
                parsed[key] = default
        sections[name] = parsed
    if command is not None:
        for required in _REQUIRED_SECTIONS[command]:
            if required not in sections:
                errors.append(f"[{required}]: section required by '{command}'")
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(sections)


def _fmt(value: float) -> str:
    return format(float(value), ".10g")


def _fmt_complex(value: complex | None) -> str:
    if value is None:
        return "none"
    if value.imag == 0:
        return _fmt(value.real)
    return f"{value.real:.10g}{value.imag:+.10g}j"


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_lines(path: Path, lines) -> None:
    _atomic_write(path, "".join(line + "\n" for line in lines))


def _write_trace(path: Path, trace: SimulationTrace) -> None:
    lines = ["t,w,w_star,e,u,y"]
    for row in zip(trace.t, trace.w, trace.w_star, trace.e, trace.u, trace.y):
        lines.append(",".join(format(v, ".12g") for v in row))
    _write_lines(path, lines)


def _write_csv(path: Path, header: str, columns) -> None:
    lines = [header]
    for row in zip(*columns):
        lines.append(",".join(format(v, ".12g") for v in row))
    _write_lines(path, lines)


def _read_series(path: Path) -> tuple[np.ndarray, np.ndarray]:
    table = np.genfromtxt(path, delimiter=",", names=True)
    names = table.dtype.names
    if names is None or not {"t", "y"} <= set(names):
        raise ConfigError([f"{path}: need a CSV header with t and y columns"])
    table = np.atleast_1d(table)
    return table["t"].astype(float), table["y"].astype(float)


def _metric_lines(prefix: str, metrics) -> list[str]:
    return [
        f"{prefix}E_t={_fmt(metrics.static_deviation)}",
        f"{prefix}T_r={_fmt(metrics.control_time)}",
        f"{prefix}P_r={_fmt(metrics.overshoot)}",
        f"{prefix}absolute_deviation={str(metrics.absolute_deviation).lower()}",
    ]


def _cmd_simulate(config: ExperimentConfig, out: Path | None,
                  reference: ExperimentConfig | None) -> int:
    loop = config.build_loop()
    try:
        trace = simulate_closed_loop(loop)
    except LoopDivergedError as exc:
        if out:
            _write_trace(out / "trace.csv", exc.trace)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    lines = _metric_lines("", compute_metrics(trace, config.sections["sim"]["settle_band"]))
    if out:
        _write_trace(out / "trace.csv", trace)
    if reference is not None:
        try:
            ref_trace = simulate_closed_loop(reference.build_loop())
        except LoopDivergedError as exc:
            print(f"error: reference {exc}", file=sys.stderr)
            return EXIT_DIVERGED
        band = reference.sections["sim"]["settle_band"]
        lines += _metric_lines("reference.", compute_metrics(ref_trace, band))
        if out:
            _write_trace(out / "reference_trace.csv", ref_trace)
    if out:
        _write_lines(out / "metrics.txt", lines)
    for line in lines:
        print(line)
    return EXIT_OK


def _cmd_synthesize(config: ExperimentConfig, out: Path | None,
                    reference=None) -> int:
    sec = config.sections["synthesis"]
    plant = config.build_plant()
    pole_spec = poles_from_measures(sec["S_t"], sec["T_l"])
    if "K" in sec:
        gain = sec["K"]
    elif "E_t" in sec:
        gain = min_gain(sec["E_t"], plant.coeffs[0])
    else:
        raise ConfigError(["synthesis: either K or E_t is required"])
    mode = SynthesisMode(sec["mode"])
    try:
        result = solve_controller_params(
            plant, gain, pole_spec, mode, tol=sec["tol"],
            max_iter=sec["max_iter"], fixed_ti=sec["Ti"],
            fixed_lam=sec["lambda"], grid_density=sec["grid_density"])
    except (SynthesisConvergenceError, NonPhysicalSolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    report = verify_stability(plant, result.controller)
    ctrl = result.controller
    lines = [
        f"K={_fmt(ctrl.gain)}",
        f"Ti={_fmt(ctrl.ti)}",
        f"lambda={_fmt(ctrl.lam)}",
        f"Td={_fmt(ctrl.td)}",
        f"delta={_fmt(ctrl.delta)}",
        f"residual={_fmt(max(result.residuals))}",
        f"iterations={result.iterations}",
        f"dominance_verified={str(result.dominance_verified).lower()}",
        f"rightmost_root={_fmt_complex(result.rightmost_root)}",
        f"stable={str(report.stable).lower()}",
    ]
    if out:
        _write_lines(out / "synthesis.txt", lines)
    for line in lines:
        print(line)
    return EXIT_OK


def _cmd_identify(config: ExperimentConfig, out: Path | None,
                  reference=None) -> int:
    sec = config.sections["identify"]
    guess = config.build_plant()
    bounds = {}
    missing = []
    for name in sec["free"]:
        lo_key, hi_key = f"{name}_min", f"{name}_max"
        if lo_key not in sec or hi_key not in sec:
            missing.append(f"identify.{lo_key}/{hi_key}: bounds required "
                           f"for free parameter {name!r}")
            continue
        bounds[name] = (sec[lo_key], sec[hi_key])
    if missing:
        raise ConfigError(missing)
    problem = IdentProblem.from_plant(guess, sec["free"], bounds)
    t, values = _read_series(Path(sec["data"]))
    data = MeasuredResponse(t, values, sec["amplitude"])
    result = identify(data, problem, budget=sec["budget"], xatol=sec["xatol"])
    fitted = result.plant
    lines = [
        "coeffs=" + ",".join(_fmt(v) for v in fitted.coeffs),
        "orders=" + ",".join(_fmt(v) for v in fitted.orders),
        f"Q={_fmt(result.q)}",
        f"evaluations={result.evaluations}",
        f"converged={str(result.converged).lower()}",
    ]
    if out:
        _write_lines(out / "identified.txt", lines)
        grid = TimeGrid(data.step, float(t[-1]))
        fit = simulate_plant(fitted, np.full(len(data), data.amplitude), grid)
        _write_csv(out / "fit.csv", "t,measured,fitted", (t, values, fit))
    for line in lines:
        print(line)
    if not result.converged:
        print("warning: evaluation budget exhausted before convergence",
              file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _cmd_mleval(config: ExperimentConfig, out: Path | None,
                reference=None) -> int:
    sec = config.sections["mleval"]
    z = sec["z"]
    if z.imag == 0:
        z = z.real
    value = ml_derivative(sec["alpha"], sec["beta"], z, sec["n"], tol=sec["tol"])
    if isinstance(value, complex):
        rendered = _fmt_complex(value)
    else:
        rendered = format(value, ".12g")
    lines = [
        f"alpha={_fmt(sec['alpha'])}",
        f"beta={_fmt(sec['beta'])}",
        f"z={_fmt_complex(complex(z))}",
        f"n={sec['n']}",
        f"value={rendered}",
    ]
    if out:
        _write_lines(out / "mleval.txt", lines)
    print(f"value={rendered}")
    return EXIT_OK


def _cmd_differint(config: ExperimentConfig, out: Path | None,
                   reference=None) -> int:
    sec = config.sections["differint"]
    t, values = _read_series(Path(sec["data"]))
    if len(t) < 2:
        raise ConfigError([f"{sec['data']}: need at least two samples"])
    steps = np.diff(t)
    if steps[0] <= 0 or np.max(np.abs(steps - steps[0])) > 1e-6 * steps[0]:
        raise ConfigError([f"{sec['data']}: time column must be uniformly increasing"])
    spec = DifferintegralSpec(sec["order"], float(steps[0]), sec["L"])
    transformed = gl_differint(values, spec)
    if out:
        _write_csv(out / "differint.csv", "t,y", (t, transformed))
    print(f"n={len(transformed)}")
    print(f"y_last={_fmt(transformed[-1])}")
    return EXIT_OK


_HANDLERS = {
    "simulate": _cmd_simulate,
    "synthesize": _cmd_synthesize,
    "identify": _cmd_identify,
    "mleval": _cmd_mleval,
    "differint": _cmd_differint,
}


def run_command(command: str, config: ExperimentConfig,
                out_dir=None, *, reference: ExperimentConfig | None = None) -> int:
    """Execute one subcommand against a parsed config; returns the exit code.

    Domain, divergence, convergence and I/O failures are mapped to their
    exit codes with a diagnostic on stderr; configuration problems
    propagate as ConfigError.
    """
    try:
        handler = _HANDLERS[command]
    except KeyError:
        raise ValueError(f"unknown command {command!r}") from None
    out = Path(out_dir) if out_dir is not None else None
    try:
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
        return handler(config, out, reference)
    except (PlantValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def _setup_logging() -> None:
    level_name = os.environ.get("FRACCTL_LOG", "silent").lower()
    levels = {"silent": logging.CRITICAL + 10, "info": logging.INFO,
              "debug": logging.DEBUG}
    logging.basicConfig(stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s",
                        level=levels.get(level_name, logging.CRITICAL + 10))


def _build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracctl",
        description="Fractional-order control toolkit",
        epilog=_EXIT_DOC,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    commands = [
        ("simulate", "run a closed control loop and report its metrics"),
        ("synthesize", "solve controller parameters for target dominant roots"),
        ("identify", "fit plant parameters to measured step-response data"),
        ("mleval", "evaluate a Mittag-Leffler function or derivative"),
        ("differint", "differintegrate a sampled signal from a CSV file"),
    ]
    for name, help_text in commands:
        cmd = sub.add_parser(name, help=help_text, epilog=_EXIT_DOC,
                             formatter_class=argparse.RawDescriptionHelpFormatter)
        cmd.add_argument("--config", metavar="PATH",
                         help="experiment description file (INI format)")
        cmd.add_argument("--out", metavar="DIR",
                         help="output directory, created if missing")
        cmd.add_argument("--set", dest="overrides", action="append", default=[],
                         metavar="SECTION.KEY=VALUE",
                         help="override one config entry (repeatable)")
        if name == "simulate":
            cmd.add_argument("--reference", metavar="PATH",
                             help="second config simulated for side-by-side metrics")
        cmd.add_argument("params", nargs="*", metavar="KEY=VALUE",
                         help=f"shorthand overrides for the [{_HOME_SECTION[name]}] section")
    return parser


def main(argv=None) -> int:
    args = _build_arg_parser().parse_args(argv)
    _setup_logging()
    try:
        text = ""
        if args.config:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                raise ConfigError([f"config file: {exc}"]) from exc
        overrides = list(args.overrides) + list(args.params)
        config = parse_config(text, command=args.command, overrides=overrides)
        reference = None
        if getattr(args, "reference", None):
            try:
                ref_text = Path(args.reference).read_text()
            except OSError as exc:
                raise ConfigError([f"reference config file: {exc}"]) from exc
            reference = parse_config(ref_text, command=args.command)
        return run_command(args.command, config, args.out, reference=reference)
    except ConfigError as exc:
        for message in exc.errors:
            print(f"config error: {message}", file=sys.stderr)
        return EXIT_CONFIG
