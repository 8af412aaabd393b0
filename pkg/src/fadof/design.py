"""Figures of merit and (field, length) design-space search.

Peak transmission generally grows with the applied field, but so does the
passband width, so a useful design maximizes peak transmission subject to a
bandwidth cap.  The search here is fully deterministic: a coarse lattice
scan followed by coordinate-wise golden-section refinement, re-verified on a
denser spectrum before a solution is declared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GridTooNarrowError, InfeasibleError, NoPeakError
from .physics import FilterConfig
from .transfer import DetuningGrid, Spectrum, spectrum
from .workers import deterministic_map, resolve_workers

_PEAK_FLOOR = 1e-9
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# Density multiplier for the confirmation spectrum behind every declared solution.
_VERIFY_REFINEMENT = 4

ERROR_NO_PEAK = "no-peak"
ERROR_GRID_TOO_NARROW = "grid-too-narrow"


@dataclass(frozen=True)
class FigureOfMerit:
    """Headline observables extracted from one transmission spectrum."""

    t_max: float
    peak_detunings_ghz: tuple
    bandwidth_ghz: float   # span between the outermost half-of-max crossings
    enbw_ghz: float        # equivalent-noise bandwidth, integral(T)/T_max

    @property
    def peak_count(self) -> int:
        return len(self.peak_detunings_ghz)


def _local_maxima(detunings: np.ndarray, values: np.ndarray):
    """Strict three-point local maxima; equal-value runs merge to one peak.

    A run of equal samples counts as a single peak located at the run
    midpoint.  Runs touching the grid boundary are not peaks.
    """
    peaks = []
    n = len(values)
    i = 1
    while i < n - 1:
        if values[i] <= values[i - 1]:
            i += 1
            continue
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        if j < n - 1 and values[j + 1] < values[i]:
            peaks.append(0.5 * (detunings[i] + detunings[j]))
        i = j + 1
    return peaks


def _crossing(x0, y0, x1, y1, level):
    if y1 == y0:
        return x1
    return x0 + (level - y0) / (y1 - y0) * (x1 - x0)


def figures_of_merit(spec: Spectrum) -> FigureOfMerit:
    """Extract peak transmission, peak positions, bandwidth, and ENBW.

    Raises NoPeakError when the whole spectrum sits below the detection
    floor, and GridTooNarrowError when the outermost half-maximum crossings
    are not bracketed inside the grid.
    """
    t = spec.transmission
    d = spec.detuning_ghz
    t_max = float(np.max(t))
    if t_max < _PEAK_FLOOR:
        raise NoPeakError(f"peak transmission {t_max:.3e} below floor {_PEAK_FLOOR:.0e}")

    half = 0.5 * t_max
    above = t >= half
    if above[0] or above[-1]:
        raise GridTooNarrowError("half-maximum crossings extend beyond the sampled grid")
    first = int(np.argmax(above))
    last = len(t) - 1 - int(np.argmax(above[::-1]))
    left = _crossing(d[first - 1], t[first - 1], d[first], t[first], half)
    right = _crossing(d[last], t[last], d[last + 1], t[last + 1], half)

    enbw = float(0.5 * np.sum((t[1:] + t[:-1]) * np.diff(d)) / t_max)
    return FigureOfMerit(
        t_max=t_max,
        peak_detunings_ghz=tuple(float(p) for p in _local_maxima(d, t)),
        bandwidth_ghz=float(right - left),
        enbw_ghz=enbw,
    )


@dataclass(frozen=True)
class SweepCell:
    field_t: float
    length_m: float
    fom: Optional[FigureOfMerit]
    error: Optional[str]   # ERROR_NO_PEAK / ERROR_GRID_TOO_NARROW when fom is None


@dataclass(frozen=True)
class SweepResult:
    field_values_t: tuple
    length_values_m: tuple
    cells: tuple          # row-major: index = i_field * len(lengths) + i_length
    grid: DetuningGrid

    def cell(self, i_field: int, i_length: int) -> SweepCell:
        return self.cells[i_field * len(self.length_values_m) + i_length]


def _evaluate_cell(config, field_t, length_m, grid) -> SweepCell:
    cfg = config.with_field_t(field_t).with_length_m(length_m)
    try:
        fom = figures_of_merit(spectrum(cfg, grid, workers=1))
    except NoPeakError:
        return SweepCell(field_t, length_m, None, ERROR_NO_PEAK)
    except GridTooNarrowError:
        return SweepCell(field_t, length_m, None, ERROR_GRID_TOO_NARROW)
    return SweepCell(field_t, length_m, fom, None)


def _lattice(lo, hi, steps):
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi < lo:
        raise ValueError(f"invalid range [{lo}, {hi}]")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if steps == 1:
        return [float(lo)]
    return [float(v) for v in np.linspace(lo, hi, steps)]


def sweep(
    config: FilterConfig,
    field_range_t,
    field_steps: int,
    length_range_m,
    length_steps: int,
    grid: DetuningGrid = None,
    workers=None,
) -> SweepResult:
    """Evaluate figures of merit on a (field, length) lattice.

    Cells whose extraction fails are recorded with an error token rather
    than aborting the sweep.  Cells are independent and run on a worker
    pool; the output ordering is the lattice ordering regardless.
    """
    grid = grid if grid is not None else DetuningGrid.centered(60.0, 2048)
    fields = _lattice(*field_range_t, field_steps)
    lengths = _lattice(*length_range_m, length_steps)
    pairs = [(b, l) for b in fields for l in lengths]
    cells = deterministic_map(
        lambda bl: _evaluate_cell(config, bl[0], bl[1], grid),
        pairs,
        resolve_workers(workers),
    )
    return SweepResult(tuple(fields), tuple(lengths), tuple(cells), grid)


@dataclass(frozen=True)
class TradeoffPoint:
    field_t: float
    t_max: Optional[float]
    bandwidth_ghz: Optional[float]
    error: Optional[str]


def tradeoff_curve(
    config: FilterConfig,
    field_values_t,
    length_m: float,
    grid: DetuningGrid = None,
    workers=None,
):
    """Peak transmission and bandwidth versus field at fixed crystal length."""
    field_values_t = [float(b) for b in field_values_t]
    if len(field_values_t) < 2:
        raise ValueError("trade-off curve needs at least 2 field samples")
    grid = grid if grid is not None else DetuningGrid.centered(60.0, 2048)
    cells = deterministic_map(
        lambda b: _evaluate_cell(config, b, length_m, grid),
        field_values_t,
        resolve_workers(workers),
    )
    return tuple(
        TradeoffPoint(
            c.field_t,
            c.fom.t_max if c.fom else None,
            c.fom.bandwidth_ghz if c.fom else None,
            c.error,
        )
        for c in cells
    )


@dataclass(frozen=True)
class DesignSolution:
    field_t: float
    length_m: float
    figure_of_merit: FigureOfMerit   # from the dense verification spectrum
    objective: float                 # verified peak transmission
    max_bandwidth_ghz: Optional[float]
    constraint_satisfied: bool       # True only if verified on the dense spectrum
    evaluations: int


class _Objective:
    """Feasibility-aware objective with best-point bookkeeping."""

    def __init__(self, config, grid, max_bandwidth_ghz):
        self.config = config
        self.grid = grid
        self.max_bandwidth_ghz = max_bandwidth_ghz
        self.evaluations = 0
        self.best = None            # (value, field, length, fom)
        self.best_infeasible = None

    def __call__(self, field_t, length_m):
        self.evaluations += 1
        cell = _evaluate_cell(self.config, field_t, length_m, self.grid)
        if cell.fom is None:
            return -math.inf
        fom = cell.fom
        feasible = (
            self.max_bandwidth_ghz is None
            or fom.bandwidth_ghz <= self.max_bandwidth_ghz
        )
        if not feasible:
            if self.best_infeasible is None or fom.t_max > self.best_infeasible[0]:
                self.best_infeasible = (fom.t_max, field_t, length_m, fom)
            return -math.inf
        if self.best is None or fom.t_max > self.best[0]:
            self.best = (fom.t_max, field_t, length_m, fom)
        return fom.t_max


def _golden_max(f, lo, hi, tol):
    """Deterministic golden-section maximization of f on [lo, hi]."""
    a, b = lo, hi
    h = b - a
    c = b - _GOLDEN * h
    d = a + _GOLDEN * h
    fc = f(c)
    fd = f(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)


def optimize(
    config: FilterConfig,
    field_bounds_t,
    length_bounds_m,
    grid: DetuningGrid = None,
    max_bandwidth_ghz: Optional[float] = None,
    coarse_steps: int = 32,
    workers=None,
) -> DesignSolution:
    """Maximize verified peak transmission over (field, length) bounds.

    A coarse lattice scan locates the best feasible cell; coordinate-wise
    golden-section refinement then shrinks each parameter interval below
    1e-4 of its bound span.  The returned point is re-verified on a spectrum
    four times denser than the search grid, and the constraint flag reflects
    that dense evaluation.  Raises InfeasibleError (carrying the best
    constraint-violating candidate) when no feasible point exists.
    """
    grid = grid if grid is not None else DetuningGrid.centered(60.0, 2048)
    b_lo, b_hi = (float(v) for v in field_bounds_t)
    l_lo, l_hi = (float(v) for v in length_bounds_m)
    if not all(map(math.isfinite, (b_lo, b_hi, l_lo, l_hi))):
        raise ValueError("bounds must be finite")
    if b_hi < b_lo or l_hi < l_lo:
        raise ValueError("bounds must be nonempty")

    objective = _Objective(config, grid, max_bandwidth_ghz)
    b_span = b_hi - b_lo
    l_span = l_hi - l_lo
    n_b = coarse_steps if b_span > 0.0 else 1
    n_l = coarse_steps if l_span > 0.0 else 1
    b_values = _lattice(b_lo, b_hi, n_b)
    l_values = _lattice(l_lo, l_hi, n_l)

    pairs = [(b, l) for b in b_values for l in l_values]
    cells = deterministic_map(
        lambda bl: _evaluate_cell(config, bl[0], bl[1], grid),
        pairs,
        resolve_workers(workers),
    )
    objective.evaluations += len(cells)
    for cell in cells:
        if cell.fom is None:
            continue
        feasible = (
            max_bandwidth_ghz is None or cell.fom.bandwidth_ghz <= max_bandwidth_ghz
        )
        record = (cell.fom.t_max, cell.field_t, cell.length_m, cell.fom)
        if feasible:
            if objective.best is None or cell.fom.t_max > objective.best[0]:
                objective.best = record
        elif objective.best_infeasible is None or cell.fom.t_max > objective.best_infeasible[0]:
            objective.best_infeasible = record

    if objective.best is None:
        detail = None
        if objective.best_infeasible is not None:
            t_max, b, l, fom = objective.best_infeasible
            detail = {
                "field_t": b,
                "length_m": l,
                "t_max": t_max,
                "bandwidth_ghz": fom.bandwidth_ghz,
            }
        raise InfeasibleError(
            "no point in bounds satisfies the bandwidth constraint", detail
        )

    b_cell = b_span / (n_b - 1) if n_b > 1 else b_span
    l_cell = l_span / (n_l - 1) if n_l > 1 else l_span
    for _ in range(3):
        before = objective.best[0]
        _, b_star, l_star, _ = objective.best
        if b_span > 0.0:
            _golden_max(
                lambda b: objective(b, l_star),
                max(b_lo, b_star - b_cell),
                min(b_hi, b_star + b_cell),
                1e-4 * b_span,
            )
        _, b_star, l_star, _ = objective.best
        if l_span > 0.0:
            _golden_max(
                lambda l: objective(b_star, l),
                max(l_lo, l_star - l_cell),
                min(l_hi, l_star + l_cell),
                1e-4 * l_span,
            )
        if objective.best[0] == before:
            break

    _, b_star, l_star, _ = objective.best
    dense = grid.refined(_VERIFY_REFINEMENT)
    verified = figures_of_merit(
        spectrum(config.with_field_t(b_star).with_length_m(l_star), dense, workers=workers)
    )
    constraint_ok = (
        max_bandwidth_ghz is None or verified.bandwidth_ghz <= max_bandwidth_ghz
    )
    return DesignSolution(
        field_t=b_star,
        length_m=l_star,
        figure_of_merit=verified,
        objective=verified.t_max,
        max_bandwidth_ghz=max_bandwidth_ghz,
        constraint_satisfied=constraint_ok,
        evaluations=objective.evaluations,
    )
