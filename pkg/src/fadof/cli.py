"""Command-line entry points and result serialization.

Subcommands: spectrum | sweep | optimize | calibrate | oracle-check.
All outputs are plot-ready CSV or JSON files written at full double
precision; running the same command twice (with any worker count) produces
byte-identical files.

Exit codes: 0 success, 1 I/O failure, 2 config or usage error, 3 numeric or
convergence failure, 4 infeasible design / no usable peak.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import design
from .calibrate import fit_lines, read_absorption_csv
from .config import RunConfig, parse_config
from .constants import ghz_to_rad_s, mm_to_m
from .errors import (
    ConfigError,
    FadofError,
    FitNumericError,
    GridTooNarrowError,
    InfeasibleError,
    InsufficientDataError,
    NoPeakError,
)
from .transfer import DetuningGrid, jones_oracle, reference_frequency, spectrum
from .workers import resolve_workers

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_INFEASIBLE = 4

SPECTRUM_CSV_HEADER = "detuning_ghz,transmission,rotation_rad,depth_h,depth_v,n_h,n_v"
SWEEP_CSV_HEADER = "field_t,length_mm,t_max,bandwidth_ghz,enbw_ghz,peak_count,peak_detunings_ghz,error"

ORACLE_THRESHOLD = 1e-10


def _fmt(value: float) -> str:
    """Full-precision, round-trippable decimal form of a double."""
    return format(float(value), ".17g")


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _write_json(path: Path, payload: dict):
    _write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _summary_path(out: Path) -> Path:
    return out.with_name(out.stem + "_summary.json")


def _fom_payload(fom: design.FigureOfMerit) -> dict:
    return {
        "t_max": fom.t_max,
        "peak_detunings_ghz": list(fom.peak_detunings_ghz),
        "peak_count": fom.peak_count,
        "bandwidth_ghz": fom.bandwidth_ghz,
        "enbw_ghz": fom.enbw_ghz,
    }


def _grid_from_args(run: RunConfig, args) -> DetuningGrid:
    span = args.grid_span_ghz
    points = args.grid_points
    if span is None and points is None:
        return run.grid
    base = run.grid
    return DetuningGrid.centered(
        span if span is not None else 0.5 * (base.max_ghz - base.min_ghz),
        points if points is not None else base.points,
    )


def _say(args, message: str):
    if not args.quiet:
        print(message)


def cmd_spectrum(args) -> int:
    run = parse_config(args.config)
    grid = _grid_from_args(run, args)
    workers = resolve_workers(args.workers)
    spec = spectrum(run.filter, grid, workers=workers)

    rows = [SPECTRUM_CSV_HEADER]
    for i in range(len(spec)):
        rows.append(",".join(_fmt(col[i]) for col in (
            spec.detuning_ghz,
            spec.transmission,
            spec.rotation_rad,
            spec.depth_h,
            spec.depth_v,
            spec.index_h,
            spec.index_v,
        )))
    out = Path(args.out)
    _write_text(out, "\n".join(rows) + "\n")
    _say(args, f"wrote {len(spec)} spectrum points to {out}")

    summary = _summary_path(out)
    try:
        fom = design.figures_of_merit(spec)
    except (NoPeakError, GridTooNarrowError) as exc:
        _write_json(summary, {"error": str(exc)})
        _say(args, f"figure-of-merit extraction failed: {exc}")
        return EXIT_INFEASIBLE
    _write_json(summary, _fom_payload(fom))
    _say(args, f"wrote summary to {summary}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    run = parse_config(args.config)
    if run.sweep is None:
        raise ConfigError("config has no [sweep] table")
    grid = _grid_from_args(run, args)
    workers = resolve_workers(args.workers)
    result = design.sweep(
        run.filter,
        (run.sweep.field_min_t, run.sweep.field_max_t),
        run.sweep.field_steps,
        (mm_to_m(run.sweep.length_min_mm), mm_to_m(run.sweep.length_max_mm)),
        run.sweep.length_steps,
        grid=grid,
        workers=workers,
    )
    rows = [SWEEP_CSV_HEADER]
    for cell in result.cells:
        if cell.fom is None:
            rows.append(",".join((
                _fmt(cell.field_t), _fmt(cell.length_m * 1e3), "", "", "", "", "", cell.error,
            )))
        else:
            fom = cell.fom
            rows.append(",".join((
                _fmt(cell.field_t),
                _fmt(cell.length_m * 1e3),
                _fmt(fom.t_max),
                _fmt(fom.bandwidth_ghz),
                _fmt(fom.enbw_ghz),
                str(fom.peak_count),
                ";".join(_fmt(p) for p in fom.peak_detunings_ghz),
                "",
            )))
    out = Path(args.out)
    _write_text(out, "\n".join(rows) + "\n")
    _say(args, f"wrote {len(result.cells)} sweep cells to {out}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    run = parse_config(args.config)
    if run.optimize is None:
        raise ConfigError("config has no [optimize] table")
    grid = _grid_from_args(run, args)
    workers = resolve_workers(args.workers)
    out = Path(args.out)
    spec = run.optimize
    try:
        solution = design.optimize(
            run.filter,
            (spec.field_min_t, spec.field_max_t),
            (mm_to_m(spec.length_min_mm), mm_to_m(spec.length_max_mm)),
            grid=grid,
            max_bandwidth_ghz=spec.max_bandwidth_ghz,
            coarse_steps=spec.coarse_steps,
            workers=workers,
        )
    except InfeasibleError as exc:
        payload = {"infeasible": True, "message": str(exc)}
        if exc.best_infeasible is not None:
            best = dict(exc.best_infeasible)
            best["length_mm"] = best.pop("length_m") * 1e3
            payload["best_infeasible"] = best
        _write_json(out, payload)
        _say(args, f"infeasible: {exc}")
        return EXIT_INFEASIBLE

    payload = {
        "field_t": solution.field_t,
        "length_mm": solution.length_m * 1e3,
        "objective": solution.objective,
        "figure_of_merit": _fom_payload(solution.figure_of_merit),
        "max_bandwidth_ghz": solution.max_bandwidth_ghz,
        "constraint_satisfied": solution.constraint_satisfied,
        "evaluations": solution.evaluations,
    }
    _write_json(out, payload)
    _say(
        args,
        f"optimum T_max={solution.objective:.4f} at "
        f"B={solution.field_t:.4f} T, L={solution.length_m * 1e3:.4f} mm",
    )
    return EXIT_OK


def cmd_calibrate(args) -> int:
    run = parse_config(args.config)
    samples = read_absorption_csv(args.samples)
    result = fit_lines(
        samples,
        run.filter.zeeman,
        run.filter.crystal,
        run.filter.lines,
        fit_zeeman=run.calibrate.fit_zeeman,
        max_iterations=run.calibrate.max_iterations,
    )
    payload = {
        "converged": result.converged,
        "iterations": result.iterations,
        "residual_rms": result.residual_rms,
        "initial_values": result.initial_values,
        "fitted_values": result.fitted_values,
    }
    _write_json(Path(args.out), payload)
    _say(
        args,
        f"fit {'converged' if result.converged else 'did not converge'} after "
        f"{result.iterations} iterations, residual RMS {result.residual_rms:.3e}",
    )
    return EXIT_OK if result.converged else EXIT_NUMERIC


def cmd_oracle_check(args) -> int:
    run = parse_config(args.config)
    grid = _grid_from_args(run, args)
    workers = resolve_workers(args.workers)
    spec = spectrum(run.filter, grid, workers=workers)
    omega = reference_frequency(run.filter) + ghz_to_rad_s(spec.detuning_ghz)
    oracle = jones_oracle(run.filter, omega)
    deviation = float(max(abs(oracle - spec.transmission)))
    payload = {
        "max_abs_deviation": deviation,
        "threshold": ORACLE_THRESHOLD,
        "grid_points": grid.points,
        "grid_min_ghz": grid.min_ghz,
        "grid_max_ghz": grid.max_ghz,
        "passed": deviation <= ORACLE_THRESHOLD,
    }
    _write_json(Path(args.out), payload)
    _say(args, f"max |transmission - oracle| = {deviation:.3e}")
    return EXIT_OK if deviation <= ORACLE_THRESHOLD else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fadof",
        description="Solid-state Faraday anomalous-dispersion optical filter toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_out=True):
        p.add_argument("--config", required=True, help="run-configuration TOML file")
        if needs_out:
            p.add_argument("--out", required=True, help="output file path")
        p.add_argument("--grid-span-ghz", type=float, default=None,
                       help="override: half-span of the detuning grid")
        p.add_argument("--grid-points", type=int, default=None,
                       help="override: number of grid points")
        p.add_argument("--workers", type=int, default=None,
                       help="worker threads (default: FADOF_WORKERS or all cores)")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")

    p = sub.add_parser("spectrum", help="sample transmission/rotation/absorption spectra")
    add_common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="figures of merit over a (field, length) lattice")
    add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="maximize peak transmission under a bandwidth cap")
    add_common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("calibrate", help="fit line parameters to absorption-depth data")
    add_common(p)
    p.add_argument("--samples", required=True,
                   help="CSV of detuning_ghz,depth,polarization samples")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("oracle-check", help="cross-check transmission against Jones propagation")
    add_common(p)
    p.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FitNumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NoPeakError, GridTooNarrowError, InfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except FadofError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
