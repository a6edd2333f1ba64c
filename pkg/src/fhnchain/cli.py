"""Command-line front end: simulate, sweep, map, wave.

Reads flat ``key = value`` config files (CLI flags override), writes
CSV/JSON outputs plus optional minimal SVG polyline renderings.  All
floating-point output is round-trip exact (17 significant digits in CSV).
Exit codes: 0 success (including scientific findings such as blocked
propagation), 1 validation, 2 I/O, 3 internal numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .analysis import (
    COMPLEX_MMO,
    SIMPLE_MMO,
    SIMPLE_PERIODIC,
    classify_regime,
    default_transient,
    filtering_report,
    locate_boundary,
    wave_diagnostics,
)
from .errors import (
    BoundaryInconsistencyError,
    FhnChainError,
    NoFixedPointError,
    ParameterError,
)
from .integrator import simulate
from .model import DEFAULTS, ModelParams, cubic
from .singular import FixedPointResult, fixed_point, return_map

SCHEMA_VERSION = 1

#: Option names accepted both in config files and as flags.
_FLOAT_KEYS = ("alpha", "epsilon", "c", "A", "K", "dt", "t_end", "transient",
               "alpha_min", "alpha_max", "alpha_step", "snapshot_t")
_INT_KEYS = ("cells", "sample_every", "workers", "map_points")
_BOOL_KEYS = ("svg", "locate_boundaries")
_STR_KEYS = ("out",)


def fmt(x) -> str:
    """Round-trip exact text for one CSV field."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % x


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(fmt(x) for x in row) for row in rows)
    _write_text(path, "\n".join(lines) + "\n")


def write_json(path: Path, payload: dict) -> None:
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_svg(path: Path, series, width=800, height=500) -> None:
    """Minimal polyline rendering: series is a list of (x, y, color)."""
    xs = np.concatenate([np.asarray(s[0], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    xspan = (x1 - x0) or 1.0
    yspan = (y1 - y0) or 1.0
    margin = 40.0
    sx = (width - 2 * margin) / xspan
    sy = (height - 2 * margin) / yspan
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for x, y, color in series:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        pts = " ".join(
            f"{margin + (xi - x0) * sx:.2f},{height - margin - (yi - y0) * sy:.2f}"
            for xi, yi in zip(x, y))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1"/>')
    parts.append("</svg>")
    _write_text(path, "\n".join(parts) + "\n")


_PALETTE = ("#c02020", "#2040c0", "#208040", "#806020", "#602080", "#206080")


def parse_config(path: str) -> dict:
    """Flat key = value pairs, '#' comments, blank lines ignored."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError("config", f"{path}:{lineno}: expected key = value")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        val = val.strip()
        if key in _FLOAT_KEYS:
            values[key] = float(val)
        elif key in _INT_KEYS:
            values[key] = int(val)
        elif key in _BOOL_KEYS:
            if val.lower() not in ("0", "1", "true", "false", "yes", "no"):
                raise ParameterError(key, f"expected a boolean, got {val!r}")
            values[key] = val.lower() in ("1", "true", "yes")
        elif key in _STR_KEYS:
            values[key] = val
        else:
            raise ParameterError("config", f"{path}:{lineno}: unknown key {key!r}")
    return values


def _add_shared_flags(sub):
    sub.add_argument("--config", default=None, help="flat key = value config file")
    sub.add_argument("--out", default=None, help="output directory (default .)")
    sub.add_argument("--alpha", type=float, default=None, help="forcing period")
    sub.add_argument("--cells", type=int, default=None, help="number of chain nodes")
    sub.add_argument("--t-end", dest="t_end", type=float, default=None)
    sub.add_argument("--dt", type=float, default=None)
    sub.add_argument("--epsilon", type=float, default=None)
    sub.add_argument("--c", type=float, default=None)
    sub.add_argument("--A", type=float, default=None)
    sub.add_argument("--K", type=float, default=None)
    sub.add_argument("--transient", type=float, default=None,
                     help="discard horizon (default: 200 for alpha<=10, else 4*alpha)")
    sub.add_argument("--sample-every", dest="sample_every", type=int, default=None)
    sub.add_argument("--svg", action="store_const", const=True, default=None,
                     help="also write minimal SVG renderings")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fhnchain",
        description="Kicked feedforward FitzHugh-Nagumo chains: simulation and analysis")
    subs = parser.add_subparsers(dest="command", required=True)

    p_sim = subs.add_parser("simulate", help="run one chain and classify each node")
    _add_shared_flags(p_sim)

    p_sweep = subs.add_parser("sweep", help="classify the front node over an alpha grid")
    _add_shared_flags(p_sweep)
    p_sweep.add_argument("--alpha-min", dest="alpha_min", type=float, default=None)
    p_sweep.add_argument("--alpha-max", dest="alpha_max", type=float, default=None)
    p_sweep.add_argument("--alpha-step", dest="alpha_step", type=float, default=None)
    p_sweep.add_argument("--locate-boundaries", dest="locate_boundaries",
                         action="store_const", const=True, default=None)
    p_sweep.add_argument("--workers", type=int, default=None,
                         help="concurrent classification workers (default 8)")

    p_map = subs.add_parser("map", help="tabulate the singular-limit return map")
    _add_shared_flags(p_map)

    p_wave = subs.add_parser("wave", help="traveling-wave delays, speed, and profile")
    _add_shared_flags(p_wave)
    p_wave.add_argument("--snapshot-t", dest="snapshot_t", type=float, default=None)

    return parser


_OPTION_DEFAULTS = {
    "out": ".", "alpha": None, "cells": 1, "t_end": 600.0, "dt": DEFAULTS["dt"],
    "epsilon": DEFAULTS["epsilon"], "c": DEFAULTS["c"], "A": DEFAULTS["A"],
    "K": DEFAULTS["K"], "transient": None, "sample_every": 10, "svg": False,
    "alpha_min": None, "alpha_max": None, "alpha_step": None,
    "locate_boundaries": False, "workers": 8, "snapshot_t": None,
    "map_points": 201,
}


def resolve_options(args: argparse.Namespace) -> dict:
    """Defaults, then config file, then explicit CLI flags."""
    options = dict(_OPTION_DEFAULTS)
    if getattr(args, "config", None):
        options.update(parse_config(args.config))
    for key in options:
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            options[key] = flag_val
    return options


def _params_from(options: dict, epsilon=None) -> ModelParams:
    if options["alpha"] is None:
        raise ParameterError("alpha", "required (set --alpha or a config value)")
    transient = options["transient"]
    if transient is None:
        transient = default_transient(options["alpha"])
    return ModelParams(
        alpha=options["alpha"],
        epsilon=options["epsilon"] if epsilon is None else epsilon,
        c=options["c"], A=options["A"], K=options["K"], dt=options["dt"],
        n_cells=options["cells"], t_end=options["t_end"], t_transient=transient)


def _params_payload(params: ModelParams, sample_every: int) -> dict:
    return {
        "alpha": params.alpha, "epsilon": params.epsilon, "c": params.c,
        "A": params.A, "K": params.K, "dt": params.dt,
        "n_cells": params.n_cells, "t_end": params.t_end,
        "t_transient": params.t_transient, "sample_every": sample_every,
    }


def _report_payload(report) -> dict:
    sig = report.signature
    payload = {
        "node": report.node,
        "label": report.label,
        "steady_period": report.steady_period,
    }
    if sig is not None:
        payload.update({
            "pattern": list(sig.pattern),
            "n_large": sig.n_large,
            "n_small": sig.n_small,
            "max_consecutive_large": sig.max_consecutive_large,
            "flutter_count": sig.flutter_count,
        })
    return payload


def cmd_simulate(options: dict) -> int:
    params = _params_from(options)
    sample_every = options["sample_every"]
    out = Path(options["out"])
    result = simulate(params, sample_every=sample_every)

    header = "t," + ",".join(f"u_{j},v_{j}" for j in range(1, params.n_cells + 1))
    rows = ([result.t[i]] + [x for j in range(params.n_cells)
                             for x in (result.u[i, j], result.v[i, j])]
            for i in range(len(result.t)))
    write_csv(out / "timeseries.csv", header, rows)

    kick_rows = ((node, n, t)
                 for node in range(1, params.n_cells + 1)
                 for n, t in enumerate(result.kicks.node_times(node)))
    write_csv(out / "kicks.csv", "node,n,t", kick_rows)

    reports = filtering_report(result)
    write_json(out / "summary.json", {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "backend": result.backend,
        "params": _params_payload(params, sample_every),
        "nodes": [_report_payload(r) for r in reports],
    })

    if options["svg"]:
        series = [(result.t, result.u[:, j], _PALETTE[j % len(_PALETTE)])
                  for j in range(params.n_cells)]
        write_svg(out / "timeseries.svg", series)
    return 0


def _sweep_grid(options: dict) -> list[float]:
    lo, hi, step = options["alpha_min"], options["alpha_max"], options["alpha_step"]
    for key, val in (("alpha_min", lo), ("alpha_max", hi), ("alpha_step", step)):
        if val is None:
            raise ParameterError(key, "required for sweep")
    if not lo < hi:
        raise ParameterError("alpha_min", f"must be < alpha_max, got {lo} >= {hi}")
    if step <= 0:
        raise ParameterError("alpha_step", f"must be > 0, got {step}")
    dt = options["dt"]
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    grid = []
    for k in range(count):
        alpha = round((lo + k * step) / dt) * dt
        if alpha not in grid:
            grid.append(alpha)
    return grid


_BOUNDARY_TRANSITIONS = {
    "alpha0": (COMPLEX_MMO, SIMPLE_PERIODIC),
    "alpha1": (SIMPLE_MMO, COMPLEX_MMO),
    "alpha2": (SIMPLE_PERIODIC, SIMPLE_MMO),
}


def cmd_sweep(options: dict) -> int:
    grid = _sweep_grid(options)
    out = Path(options["out"])
    params_list = []
    for alpha in grid:
        per_alpha = dict(options)
        per_alpha["alpha"] = alpha
        params_list.append(_params_from(per_alpha))
    workers = max(1, options["workers"])
    if workers > 1 and len(params_list) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(classify_regime, params_list))
    else:
        reports = [classify_regime(p) for p in params_list]

    rows = []
    for rep in reports:
        sig = rep.signature
        rows.append((rep.alpha, rep.label,
                     sig.n_large if sig else 0,
                     sig.n_small if sig else 0,
                     rep.steady_period if rep.steady_period is not None else math.nan))
    write_csv(out / "regimes.csv", "alpha,label,n_large,n_small,period", rows)

    boundaries = {"schema_version": SCHEMA_VERSION,
                  "alpha0": None, "alpha1": None, "alpha2": None,
                  "brackets": {}, "notes": []}
    if options["locate_boundaries"]:
        labels = [rep.label for rep in reports]
        for name, (lab_lo, lab_hi) in _BOUNDARY_TRANSITIONS.items():
            bracket = None
            for (a_lo, l_lo), (a_hi, l_hi) in zip(zip(grid, labels),
                                                  zip(grid[1:], labels[1:])):
                if (l_lo, l_hi) == (lab_lo, lab_hi):
                    bracket = (a_lo, a_hi)
                    break
            if bracket is None:
                continue
            boundaries["brackets"][name] = list(bracket)
            try:
                boundaries[name] = locate_boundary(
                    params_list[0], lab_lo, lab_hi, bracket)
            except BoundaryInconsistencyError as err:
                boundaries["notes"].append(str(err))
    write_json(out / "boundaries.json", boundaries)

    if options["svg"]:
        alphas = [r[0] for r in rows]
        periods = [r[4] for r in rows]
        finite = [(a, p) for a, p in zip(alphas, periods) if math.isfinite(p)]
        if finite:
            xs, ys = zip(*finite)
            write_svg(out / "regimes.svg", [(xs, ys, _PALETTE[0])])
    return 0


def cmd_map(options: dict) -> int:
    params = _params_from(options, epsilon=0.0)
    out = Path(options["out"])
    rest_v = cubic(params.c)
    v_grid = np.linspace(rest_v + 1e-9, params.A - 2.0, options["map_points"])
    samples = [return_map(float(v), params) for v in v_grid]
    write_csv(out / "fmap.csv", "v_in,v_out,defined",
              ((s.v_in, s.v_out, s.defined) for s in samples))

    payload = {"schema_version": SCHEMA_VERSION, "alpha": params.alpha,
               "epsilon": 0.0}
    try:
        fp: FixedPointResult = fixed_point(params)
        payload.update({
            "v_star": fp.v_star,
            "derivative": fp.derivative,
            "bracket": {"v_low": fp.v_low, "v_high": fp.v_high,
                        "gap_low": fp.gap_low, "gap_high": fp.gap_high},
        })
    except NoFixedPointError as err:
        payload.update({
            "v_star": None, "derivative": None, "bracket": None,
            "reason": str(err),
            "scan": {"v": err.scan_v, "gap": err.scan_gap},
        })
    write_json(out / "fixedpoint.json", payload)

    if options["svg"]:
        defined = [(s.v_in, s.v_out) for s in samples if s.defined]
        if defined:
            xs, ys = zip(*defined)
            write_svg(out / "fmap.svg", [
                (xs, ys, _PALETTE[0]),
                ((min(xs), max(xs)), (min(xs), max(xs)), _PALETTE[2]),
            ])
    return 0


def cmd_wave(options: dict) -> int:
    params = _params_from(options)
    if params.n_cells < 3:
        raise ParameterError("cells", f"wave needs >= 3 nodes, got {params.n_cells}")
    sample_every = options["sample_every"]
    out = Path(options["out"])
    result = simulate(params, sample_every=sample_every)
    report = wave_diagnostics(result)

    rows = ((n, j + 1, report.delays[n, j])
            for n in range(report.delays.shape[0])
            for j in range(report.delays.shape[1]))
    write_csv(out / "delays.csv", "pulse_n,node_j,delay", rows)

    snapshot_t = options["snapshot_t"]
    if snapshot_t is None:
        snapshot_t = params.t_end
    if not 0.0 <= snapshot_t <= params.t_end:
        raise ParameterError("snapshot_t", f"must lie in [0, t_end], got {snapshot_t}")
    idx = int(np.argmin(np.abs(result.t - snapshot_t)))
    write_csv(out / "profile.csv", "node,u",
              ((j + 1, result.u[idx, j]) for j in range(params.n_cells)))

    write_json(out / "wave.json", {
        "schema_version": SCHEMA_VERSION,
        "params": _params_payload(params, sample_every),
        "beta": report.beta,
        "speed": report.speed,
        "lag_estimate": report.lag_estimate,
        "relative_discrepancy": report.relative_discrepancy,
        "propagated": report.propagated,
        "first_silent_node": report.first_silent_node,
        "n_pulses": int(report.delays.shape[0]),
        "snapshot_t": float(result.t[idx]),
        "backend": result.backend,
    })

    if options["svg"]:
        nodes = np.arange(1, params.n_cells + 1)
        write_svg(out / "profile.svg", [(nodes, result.u[idx], _PALETTE[1])])
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "map": cmd_map,
    "wave": cmd_wave,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        options = resolve_options(args)
        return _COMMANDS[args.command](options)
    except ParameterError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2
    except FhnChainError as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
