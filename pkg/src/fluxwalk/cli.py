"""Command-line front end.

Four subcommands (evolve, sweep, surface, convergents) configure runs from
flags and an optional flat key-value config file, with flags taking
precedence over the file and the file over built-in defaults.  All results
are CSV files written atomically, so reruns are byte-identical and failed
runs leave nothing behind.  Exit codes: 0 success, 1 runtime failure,
2 bad configuration.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import analysis, csvio, observables
from .core import BlochAngles, BoundaryOverflowError, FluxRatio, evolve, new_state

_HALF_PI = math.pi / 2.0


def _cast_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def _cast_positive_float(text: str) -> float:
    value = _cast_float(text)
    if value <= 0.0:
        raise ValueError("must be positive")
    return value


def _cast_positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise ValueError("must be a positive integer")
    return value


def _cast_step_list(text: str) -> tuple[int, ...]:
    return tuple(_cast_positive_int(part) for part in text.split(","))


def _cast_bool(text: str) -> bool:
    key = text.strip().lower()
    if key in ("1", "true", "yes", "on"):
        return True
    if key in ("0", "false", "no", "off"):
        return False
    raise ValueError("must be a boolean (true/false)")


_OBSERVABLES = tuple(observables.ObservableSeries.FIELDS)


def _cast_observable(text: str) -> str:
    if text not in _OBSERVABLES:
        raise ValueError(f"must be one of {', '.join(_OBSERVABLES)}")
    return text


@dataclass(frozen=True)
class _Opt:
    key: str
    cast: object
    default: object = None
    required: bool = False
    flag: bool = False
    help: str = ""


_OPTIONS: dict[str, list[_Opt]] = {
    "evolve": [
        _Opt("alpha", FluxRatio.parse, required=True,
             help="flux ratio: 'p/q', a decimal (kept exact), or 'golden'"),
        _Opt("steps", _cast_positive_int, required=True, help="number of walk steps"),
        _Opt("theta", _cast_float, default=_HALF_PI, help="initial coin polar angle [0, pi]"),
        _Opt("phi", _cast_float, default=_HALF_PI, help="initial coin azimuth [0, 2*pi)"),
        _Opt("half-width", _cast_positive_int,
             help="preallocated lattice half-width (default: steps)"),
        _Opt("smooth-sigma", _cast_positive_float,
             help="add a column with the even-step origin-region probability "
                  "smoothed by a Gaussian of this width"),
        _Opt("map-out", str, help="also write the final probability map (n,m,p) here"),
        _Opt("output", str, required=True, help="output CSV path"),
    ],
    "sweep": [
        _Opt("alpha-min", _cast_float, default=0.0, help="first flux ratio of the grid"),
        _Opt("alpha-max", _cast_float, default=1.0, help="last flux ratio of the grid"),
        _Opt("alpha-count", _cast_positive_int, default=1000, help="grid points"),
        _Opt("steps", _cast_step_list, default=(2, 4, 8, 20, 60),
             help="comma-separated step counts, e.g. 2,4,8,20,60"),
        _Opt("observable", _cast_observable, default="variance",
             help=f"one of {', '.join(_OBSERVABLES)}"),
        _Opt("theta", _cast_float, default=_HALF_PI, help="initial coin polar angle"),
        _Opt("phi", _cast_float, default=_HALF_PI, help="initial coin azimuth"),
        _Opt("normalize", _cast_bool, flag=True,
             help="rescale each step-count column by its maximum"),
        _Opt("threads", _cast_positive_int, default=1,
             help="worker processes; results are identical for any count"),
        _Opt("output", str, required=True, help="output CSV path"),
    ],
    "surface": [
        _Opt("alpha", FluxRatio.parse, required=True, help="flux ratio"),
        _Opt("theta-min", _cast_float, default=0.0, help="theta grid start (inclusive)"),
        _Opt("theta-max", _cast_float, default=math.pi, help="theta grid end (inclusive)"),
        _Opt("theta-count", _cast_positive_int, default=21, help="theta grid points"),
        _Opt("phi-min", _cast_float, default=0.0, help="phi grid start (inclusive)"),
        _Opt("phi-max", _cast_float, default=2.0 * math.pi,
             help="phi grid end (exclusive)"),
        _Opt("phi-count", _cast_positive_int, default=21, help="phi grid points"),
        _Opt("steps", _cast_positive_int, default=500, help="steps per walk"),
        _Opt("avg-window", _cast_positive_int, default=50,
             help="trailing steps averaged into the reported value"),
        _Opt("threads", _cast_positive_int, default=1, help="accepted for symmetry; "
             "the surface run is cheap and single-process"),
        _Opt("output", str, required=True, help="output CSV path"),
    ],
    "convergents": [
        _Opt("alpha", FluxRatio.parse, required=True,
             help="number in (0, 1) to approximate, e.g. 'golden'"),
        _Opt("depth", _cast_positive_int, default=12, help="number of approximants"),
        _Opt("output", str, required=True, help="output CSV path"),
    ],
}

_COMMAND_HELP = {
    "evolve": "run one walk and record per-step observables",
    "sweep": "record an observable over a flux-ratio grid",
    "surface": "long-run entanglement over a grid of initial coin states",
    "convergents": "continued-fraction approximants of a flux ratio",
}


@dataclass
class RunConfig:
    """Fully resolved invocation: one command plus its validated settings."""

    command: str
    options: dict = field(default_factory=dict)

    def __getattr__(self, name: str):
        key = name.replace("_", "-")
        if key in self.options:
            return self.options[key]
        raise AttributeError(name)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxwalk",
        description="Two-dimensional quantum walks under an artificial magnetic field.")
    sub = parser.add_subparsers(dest="command", required=True)
    for command, opts in _OPTIONS.items():
        p = sub.add_parser(command, help=_COMMAND_HELP[command])
        p.add_argument("--config", default=None, metavar="PATH",
                       help="flat key-value file (key = value); flags win over it")
        for opt in opts:
            names = [f"--{opt.key}"]
            if opt.key == "output":
                names.append("-o")
            if opt.flag:
                p.add_argument(*names, action="store_const", const=True,
                               default=None, dest=opt.key, help=opt.help)
            else:
                p.add_argument(*names, default=None, dest=opt.key, metavar="V",
                               help=opt.help + (" [required]" if opt.required else ""))
    return parser


def _load_config_file(path: str, allowed: set[str], parser) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as exc:
        parser.error(f"cannot read config file {path!r}: {exc}")
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            parser.error(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in allowed:
            parser.error(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


def parse_config(argv=None) -> RunConfig:
    """Resolve argv plus an optional config file into a validated RunConfig.

    Precedence is command line over config file over defaults.  Any invalid
    or unknown key aborts with exit code 2 before anything runs.
    """
    parser = _build_parser()
    ns = parser.parse_args(argv)
    opts = _OPTIONS[ns.command]
    file_values = {}
    if ns.config is not None:
        file_values = _load_config_file(ns.config, {o.key for o in opts}, parser)
    resolved: dict[str, object] = {}
    for opt in opts:
        raw = getattr(ns, opt.key)
        if raw is None and opt.key in file_values:
            raw = file_values[opt.key]
        if raw is None:
            if opt.required:
                parser.error(f"{ns.command}: missing required option --{opt.key}")
            resolved[opt.key] = opt.default
            continue
        if isinstance(raw, str) and not opt.flag:
            try:
                resolved[opt.key] = opt.cast(raw)
            except (ValueError, TypeError) as exc:
                parser.error(f"invalid value for --{opt.key}: {raw!r} ({exc})")
        elif isinstance(raw, str) and opt.flag:
            try:
                resolved[opt.key] = _cast_bool(raw)
            except ValueError as exc:
                parser.error(f"invalid value for --{opt.key}: {raw!r} ({exc})")
        else:
            resolved[opt.key] = raw
    config = RunConfig(command=ns.command, options=resolved)
    _validate(config, parser)
    return config


def _validate(config: RunConfig, parser) -> None:
    opts = config.options
    if "theta" in opts:
        try:
            opts["coin"] = BlochAngles(opts["theta"], opts["phi"])
        except ValueError as exc:
            parser.error(str(exc))
    if config.command == "evolve" and opts.get("half-width") is None:
        opts["half-width"] = opts["steps"]
    if config.command == "sweep":
        if opts["alpha-max"] < opts["alpha-min"]:
            parser.error("--alpha-max must not be below --alpha-min")
        if opts["normalize"] is None:
            opts["normalize"] = False
    if config.command == "surface":
        if opts["theta-max"] < opts["theta-min"] or opts["phi-max"] < opts["phi-min"]:
            parser.error("grid maxima must not be below the corresponding minima")
        if opts["avg-window"] > opts["steps"]:
            parser.error("--avg-window cannot exceed --steps")


def _series_rows(config: RunConfig):
    state = new_state(config.coin, config.options["half-width"], config.alpha)
    records = [(0,) + observables.measure(state)]
    evolve(state, config.steps,
           lambda s: records.append((s.step,) + observables.measure(s)))
    return records, state


def _run_evolve(config: RunConfig) -> None:
    records, state = _series_rows(config)
    header = ["t", "variance", "origin_region_prob", "participation_ratio",
              "entanglement_entropy"]
    rows = [list(rec) for rec in records]
    sigma = config.options["smooth-sigma"]
    if sigma is not None:
        header.append("origin_region_prob_smooth")
        steps = np.array([rec[0] for rec in records])
        origin = np.array([rec[2] for rec in records])
        smooth = np.zeros_like(origin)
        even = steps % 2 == 0
        smooth[even] = analysis.gaussian_smooth(origin[even], sigma)
        for row, value in zip(rows, smooth):
            row.append(float(value))
    map_path = config.options["map-out"]
    if map_path is not None:
        pm = observables.probability_map(state)
        rows_nz, cols_nz = np.nonzero(pm.probs)
        map_rows = [(int(i) + pm.n_lo, int(j) + pm.m_lo, float(pm.probs[i, j]))
                    for i, j in zip(rows_nz, cols_nz)]
        csvio.write_csv(map_path, ["n", "m", "p"], map_rows)
    csvio.write_csv(config.output, header, rows)


def _run_sweep(config: RunConfig) -> None:
    grid = np.linspace(config.options["alpha-min"], config.options["alpha-max"],
                       config.options["alpha-count"])
    result = analysis.sweep_alpha(grid, config.steps, config.observable,
                                  init=config.coin, normalize=config.normalize,
                                  workers=config.threads)
    header = ["alpha"] + [f"t={t}" for t in result.step_counts]
    rows = [[result.alphas[i].value] + [float(v) for v in result.values[:, i]]
            for i in range(len(result.alphas))]
    csvio.write_csv(config.output, header, rows)


def _run_surface(config: RunConfig) -> None:
    opts = config.options
    thetas = np.linspace(opts["theta-min"], opts["theta-max"], opts["theta-count"])
    phis = np.linspace(opts["phi-min"], opts["phi-max"], opts["phi-count"],
                       endpoint=False)
    surface = analysis.entanglement_surface(thetas, phis, config.alpha,
                                            t_max=config.steps,
                                            avg_window=opts["avg-window"])
    header = ["theta"] + [f"phi={csvio.format_value(float(p))}" for p in phis]
    rows = [[float(thetas[i])] + [float(v) for v in surface[i]]
            for i in range(len(thetas))]
    csvio.write_csv(config.output, header, rows)


def _run_convergents(config: RunConfig) -> None:
    approx = analysis.convergents(config.alpha, config.depth)
    rows = [(i, c.p, c.q, c.err) for i, c in enumerate(approx)]
    csvio.write_csv(config.output, ["i", "p", "q", "err"], rows)


_RUNNERS = {
    "evolve": _run_evolve,
    "sweep": _run_sweep,
    "surface": _run_surface,
    "convergents": _run_convergents,
}


def run(config: RunConfig) -> int:
    """Execute a resolved configuration; returns the process exit code."""
    _RUNNERS[config.command](config)
    return 0


def main(argv=None) -> int:
    config = parse_config(argv)
    try:
        return run(config)
    except (BoundaryOverflowError, ValueError, ArithmeticError, MemoryError,
            OSError) as exc:
        print(f"fluxwalk: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
