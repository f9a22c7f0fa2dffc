"""Command-line surface for bands, brackets, and report generation.

Commands:

    envelope   certified band at (b, t): CSV columns x, y_lower, y_upper,
               u_lower, u_upper, width_y, width_u plus a JSON summary line
    shoot      bracketing trajectories y_RK+/- and the bracket error
    limit0     exponent bracket of the t=0 limiting problem
    blayer     boundary-layer verdict at (b, t)
    verify     re-run every certificate and the oracle containment
    report     CSV reproductions of the published tables plus figures

The delimited artifact goes to --out when given, else to stdout; data
commands additionally print a one-line JSON summary to stdout.  All
floats render with 17 significant digits, and JSON carries numbers as
decimal strings, so identical configurations produce byte-identical
output.  Certification and ordering failures exit with status 1 and a
machine-readable error record; invalid configurations exit with 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from .builders import (
    boundary_layer,
    build_band,
    derivative_bounds,
    max_band_width,
)
from .errors import (
    DomainError,
    HcrbandError,
    NoRootError,
    PreconditionError,
)
from .limitzero import bracket_r, u0_upper, w0_integrate
from .model import ProblemParams
from .shooting import default_steps, shoot
from .verification import certify, compare_to_oracle

COMMANDS = ("envelope", "shoot", "limit0", "blayer", "verify", "report")

REPORT_BRACKET_ROWS = ((10.0, 0.3), (55.0, 0.1), (30.0, 0.7))
REPORT_GAMMA_BS = (10.0, 30.0, 70.0, 100.0, 500.0, 1000.0, 5e4, 1e5)
REPORT_RBRACKET_BS = tuple(float(10**k) for k in range(1, 11))
REPORT_WIDTH_ROWS = (
    (500.0, 0.1),
    (700.0, 0.2),
    (5000.0, 0.01),
    (10000.0, 0.005),
    (1e6, 2e-4),
)
REPORT_DEPTHS = (1e-2, 1e-4, 1e-6, 1e-8, 1e-10)
REPORT_DEEP_PARAMS = (500.0, 0.1)
SEED_RHO_PAIR = (2.84, 2.8)


def fnum(x) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class RunConfig:
    command: str
    b: float | None
    t: float | None
    kind: str
    steps: int | None
    grid_points: int
    output_format: str
    output_path: str | None
    iteration_rule: str


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcrband",
        description="Certified envelopes and bracketed shooting for the"
        " radiating-conduction two-point problem.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--b", type=float, default=None, help="coupling strength b > 0")
    parser.add_argument("--t", type=float, default=None, help="cold-end temperature t in (0, 1)")
    parser.add_argument("--kind", choices=("global", "partial", "both"), default="global")
    parser.add_argument("--steps", type=int, default=None, help="integrator step count")
    parser.add_argument("--grid-points", type=int, default=201, dest="grid_points")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", dest="output_format")
    parser.add_argument("--out", default=None, dest="output_path")
    parser.add_argument(
        "--iteration-rule", choices=("text", "listing"), default="text", dest="iteration_rule"
    )
    return parser


def parse_config(argv) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    needs_b = args.command in ("envelope", "shoot", "limit0", "blayer", "verify")
    needs_t = args.command in ("envelope", "shoot", "blayer", "verify")
    if needs_b and args.b is None:
        parser.error(f"{args.command} requires --b")
    if needs_t and args.t is None:
        parser.error(f"{args.command} requires --t")
    if args.grid_points < 2:
        parser.error("--grid-points must be >= 2")
    if args.steps is not None and args.steps < 1:
        parser.error("--steps must be >= 1")
    return RunConfig(
        command=args.command,
        b=args.b,
        t=args.t,
        kind=args.kind,
        steps=args.steps,
        grid_points=args.grid_points,
        output_format=args.output_format,
        output_path=args.output_path,
        iteration_rule=args.iteration_rule,
    )


# ---------------------------------------------------------------------------
# emission helpers
# ---------------------------------------------------------------------------


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else fnum(v) for v in row])
    return buf.getvalue()


def _emit_primary(config: RunConfig, text: str):
    if config.output_path:
        with open(config.output_path, "w", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(record: dict):
    sys.stdout.write(json.dumps(record, sort_keys=True) + "\n")


def _emit_error(exc: Exception):
    _emit_json({"error": type(exc).__name__, "message": str(exc)})


def _subsample(n_total: int, wanted: int):
    if wanted >= n_total:
        return list(range(n_total))
    idx = {round(i * (n_total - 1) / (wanted - 1)) for i in range(wanted)}
    return sorted(idx)


def _certificate_record(cert) -> dict:
    r_min, r_max = cert.residue_profile
    return {
        "ok": True,
        "residue_min": fnum(r_min),
        "residue_max": fnum(r_max),
        "boundary_ok": cert.boundary_ok,
        "ordering_ok": cert.ordering_ok,
    }


def _band_certificates(params: ProblemParams, bands: dict) -> dict:
    cap = None
    if "partial" in bands:
        cap = derivative_bounds(params).delta_cap
    records = {}
    for scope, band in bands.items():
        delta_cap = cap if scope == "partial" else None
        for side, spec in (("lower", band.lower), ("upper", band.upper)):
            cert = certify(spec, delta_cap=delta_cap)
            records[f"{scope}-{side}"] = _certificate_record(cert)
    return records


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _build_bands(config: RunConfig, params: ProblemParams) -> dict:
    bands = {}
    if config.kind in ("global", "both"):
        bands["global"] = build_band(params, "global", iteration_rule=config.iteration_rule)
    if config.kind in ("partial", "both"):
        bands["partial"] = build_band(params, "partial", iteration_rule=config.iteration_rule)
    return bands


def _band_columns(bands: dict, xs: np.ndarray):
    """Tightest certified bounds at each abscissa (global off the layer,
    intersection where a partial band is also valid)."""
    if "global" in bands:
        y_lo = bands["global"].y_lower(xs).copy()
        y_up = bands["global"].y_upper(xs).copy()
        valid = np.ones_like(xs, dtype=bool)
    else:
        band = bands["partial"]
        valid = xs >= band.x_valid_min
        y_lo = np.full_like(xs, np.nan)
        y_up = np.full_like(xs, np.nan)
        y_lo[valid] = band.y_lower(xs[valid])
        y_up[valid] = band.y_upper(xs[valid])
    if "partial" in bands and "global" in bands:
        band = bands["partial"]
        mask = xs >= band.x_valid_min
        y_lo[mask] = np.maximum(y_lo[mask], band.y_lower(xs[mask]))
        y_up[mask] = np.minimum(y_up[mask], band.y_upper(xs[mask]))
    return y_lo, y_up, valid


def _run_envelope(config: RunConfig) -> int:
    params = ProblemParams(b=config.b, t=config.t)
    bands = _build_bands(config, params)
    certificates = _band_certificates(params, bands)

    x_min = 0.0 if "global" in bands else bands["partial"].x_valid_min
    xs = np.linspace(x_min, 1.0, config.grid_points)
    y_lo, y_up, _ = _band_columns(bands, xs)
    t = params.t
    rows = []
    for x, lo, up in zip(xs, y_lo, y_up):
        width = up - lo
        rows.append((x, lo, up, t * lo, t * up, width, t * width))

    widths = {
        scope: max_band_width(band) for scope, band in bands.items()
    }

    def width_field(i: int):
        if len(widths) == 1:
            return fnum(next(iter(widths.values()))[i])
        return {scope: fnum(w[i]) for scope, w in widths.items()}

    layer = boundary_layer(params)
    summary = {
        "params": {"b": fnum(params.b), "t": fnum(params.t)},
        "B": fnum(params.B),
        "T": fnum(params.T),
        "bt025": fnum(layer.strength),
        "has_layer": layer.has_layer,
        "max_width_y": width_field(0),
        "max_width_u": width_field(1),
        "certificates": certificates,
    }

    header = ("x", "y_lower", "y_upper", "u_lower", "u_upper", "width_y", "width_u")
    if config.output_format == "csv":
        _emit_primary(config, _csv_text(header, rows))
        _emit_json(summary)
    else:
        doc = dict(summary)
        doc["columns"] = list(header)
        doc["rows"] = [[fnum(v) for v in row] for row in rows]
        text = json.dumps(doc, sort_keys=True) + "\n"
        _emit_primary(config, text)
        if config.output_path:
            _emit_json(summary)
    return 0


def _run_shoot(config: RunConfig) -> int:
    params = ProblemParams(b=config.b, t=config.t)
    cap = derivative_bounds(params).delta_cap
    upper = shoot(params, 0.0, config.steps)
    lower = shoot(params, cap, config.steps)
    err = upper.ys - lower.ys
    max_err = float(np.max(err))
    log_ratio = math.log(max_err) / params.B if max_err > 0.0 else -math.inf

    idx = _subsample(len(upper.xs), config.grid_points)
    rows = [(upper.xs[i], upper.ys[i], lower.ys[i], err[i]) for i in idx]
    summary = {
        "params": {"b": fnum(params.b), "t": fnum(params.t)},
        "B": fnum(params.B),
        "delta_cap": fnum(cap),
        "max_err": fnum(max_err),
        "log_ratio": fnum(log_ratio),
        "steps": upper.steps,
    }

    header = ("x", "y_plus", "y_minus", "err")
    if config.output_format == "csv":
        _emit_primary(config, _csv_text(header, rows))
        _emit_json(summary)
    else:
        doc = dict(summary)
        doc["columns"] = list(header)
        doc["rows"] = [[fnum(v) for v in row] for row in rows]
        _emit_primary(config, json.dumps(doc, sort_keys=True) + "\n")
        if config.output_path:
            _emit_json(summary)
    return 0


def _run_limit0(config: RunConfig) -> int:
    res = bracket_r(config.b, steps=config.steps)
    _, above = w0_integrate(config.b, res.r_lower, config.steps)
    _, below = w0_integrate(config.b, res.r_upper, config.steps)

    idx = _subsample(len(above), config.grid_points)
    rows = [(above[i][0], below[i][1], above[i][1]) for i in idx]
    summary = {
        "b": fnum(res.b),
        "gamma": fnum(res.gamma),
        "r_lower": fnum(res.r_lower),
        "r_upper": fnum(res.r_upper),
        "w_terminal_lower": fnum(res.w_terminal_lower),
        "w_terminal_upper": fnum(res.w_terminal_upper),
        "u0p_terminal": fnum(res.u0p_terminal),
    }

    header = ("x", "w_lower", "w_upper")
    if config.output_format == "csv":
        _emit_primary(config, _csv_text(header, rows))
        _emit_json(summary)
    else:
        doc = dict(summary)
        doc["columns"] = list(header)
        doc["rows"] = [[fnum(v) for v in row] for row in rows]
        _emit_primary(config, json.dumps(doc, sort_keys=True) + "\n")
        if config.output_path:
            _emit_json(summary)
    return 0


def _run_blayer(config: RunConfig) -> int:
    params = ProblemParams(b=config.b, t=config.t)
    layer = boundary_layer(params)
    _emit_json(
        {
            "params": {"b": fnum(params.b), "t": fnum(params.t)},
            "strength": fnum(layer.strength),
            "has_layer": layer.has_layer,
            "xi": fnum(layer.xi),
            "variation_ratio": fnum(layer.variation_ratio),
        }
    )
    return 0


def _run_verify(config: RunConfig) -> int:
    params = ProblemParams(b=config.b, t=config.t)
    bands = _build_bands(config, params)
    certificates = _band_certificates(params, bands)
    oracle = {}
    for scope, band in bands.items():
        report = compare_to_oracle(band, steps=config.steps, grid_points=config.grid_points)
        oracle[scope] = {
            "delta_star": fnum(report.delta_star),
            "lower_margin": fnum(report.lower_margin),
            "upper_margin": fnum(report.upper_margin),
            "max_width_y": fnum(report.max_width_y),
            "points_checked": report.points_checked,
        }
    _emit_json(
        {
            "params": {"b": fnum(params.b), "t": fnum(params.t)},
            "certificates": certificates,
            "oracle": oracle,
        }
    )
    return 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def _exact_decimals(a: float, b: float) -> int:
    sa, sb = format(a, ".15f"), format(b, ".15f")
    da, db = sa.split(".")[1], sb.split(".")[1]
    if sa.split(".")[0] != sb.split(".")[0]:
        return 0
    count = 0
    for ca, cb in zip(da, db):
        if ca != cb:
            break
        count += 1
    return count


def _run_report(config: RunConfig) -> int:
    out_dir = config.output_path or "report"
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def emit(name: str, header, rows):
        path = os.path.join(out_dir, name)
        with open(path, "w", newline="") as f:
            f.write(_csv_text(header, rows))
        written.append(path)

    rows = []
    for b, t in REPORT_BRACKET_ROWS:
        p = ProblemParams(b=b, t=t)
        cap = derivative_bounds(p).delta_cap
        upper = shoot(p, 0.0, config.steps)
        lower = shoot(p, cap, config.steps)
        max_err = float(np.max(upper.ys - lower.ys))
        rows.append((b, t, p.B, max_err, math.log(max_err) / p.B))
    emit("table_bracket_error.csv", ("b", "t", "B", "max_err_y", "ln_err_over_B"), rows)

    rows = []
    for b in REPORT_GAMMA_BS:
        term, _ = w0_integrate(b, -10.0 / 3.0, config.steps)
        rows.append((b, term, u0_upper(b, 1.0) - term))
    emit("table_gamma_terminal.csv", ("b", "w0_gamma_1", "u0p_minus_w"), rows)

    rows = []
    rho_minus, rho_plus = SEED_RHO_PAIR
    for b in REPORT_RBRACKET_BS:
        log_b = math.log(b)
        t_minus, _ = w0_integrate(b, -10.0 / 3.0 + rho_minus / log_b, config.steps)
        t_plus, _ = w0_integrate(b, -10.0 / 3.0 + rho_plus / log_b, config.steps)
        rows.append((b, t_minus, t_plus, u0_upper(b, 1.0)))
    emit(
        "table_r_bracket.csv",
        ("b", "w_terminal_rho_2.84", "w_terminal_rho_2.8", "u0p_terminal"),
        rows,
    )

    rows = []
    for b, t in REPORT_WIDTH_ROWS:
        p = ProblemParams(b=b, t=t)
        for scope in ("global", "partial"):
            band = build_band(p, scope, iteration_rule=config.iteration_rule)
            w_y, w_u, x_at = max_band_width(band)
            rows.append((b, t, p.B, scope, w_y, w_u, x_at))
    emit(
        "table_band_widths.csv",
        ("b", "t", "B", "scope", "max_width_y", "max_width_u", "x_at_max"),
        rows,
    )

    b, t = REPORT_DEEP_PARAMS
    band = build_band(ProblemParams(b=b, t=t), "partial", iteration_rule=config.iteration_rule)
    rows = []
    for depth in REPORT_DEPTHS:
        u_up = float(band.u_upper(depth))
        u_lo = float(band.u_lower(depth))
        rows.append((depth, u_up, u_lo, str(_exact_decimals(u_up, u_lo))))
    emit(
        "table_deep_bounds.csv",
        ("depth", "u_upper", "u_lower", "exact_decimals"),
        rows,
    )

    from .plots import render_band_figure, render_bracket_figure, render_limit_figure

    p = ProblemParams(b=REPORT_DEEP_PARAMS[0], t=REPORT_DEEP_PARAMS[1])
    band_g = build_band(p, "global", iteration_rule=config.iteration_rule)
    band_p = build_band(p, "partial", iteration_rule=config.iteration_rule)
    path = os.path.join(out_dir, "fig_band.png")
    render_band_figure(path, band_g, band_p)
    written.append(path)

    pw = ProblemParams(b=10.0, t=0.3)
    cap = derivative_bounds(pw).delta_cap
    path = os.path.join(out_dir, "fig_bracket.png")
    render_bracket_figure(path, shoot(pw, 0.0, config.steps), shoot(pw, cap, config.steps))
    written.append(path)

    b_limit = 100.0
    res = bracket_r(b_limit, steps=config.steps)
    _, above = w0_integrate(b_limit, res.r_lower, config.steps)
    _, below = w0_integrate(b_limit, res.r_upper, config.steps)
    u0p = [u0_upper(b_limit, s[0]) for s in above]
    path = os.path.join(out_dir, "fig_limit0.png")
    render_limit_figure(path, b_limit, above, below, u0p)
    written.append(path)

    _emit_json({"written": sorted(written)})
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


_RUNNERS = {
    "envelope": _run_envelope,
    "shoot": _run_shoot,
    "limit0": _run_limit0,
    "blayer": _run_blayer,
    "verify": _run_verify,
    "report": _run_report,
}


def run(config: RunConfig) -> int:
    if config.steps is None and config.command in ("shoot", "verify"):
        # resolve once so the summary reports the effective count
        config = replace(config, steps=default_steps())
    return _RUNNERS[config.command](config)


def main(argv=None) -> int:
    try:
        config = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return run(config)
    except NoRootError as exc:
        # existence failure at runtime, not a malformed configuration
        _emit_error(exc)
        return 1
    except (DomainError, PreconditionError) as exc:
        _emit_error(exc)
        return 2
    except HcrbandError as exc:
        _emit_error(exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
