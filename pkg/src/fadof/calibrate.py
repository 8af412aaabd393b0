"""Fit line parameters to measured absorption-depth spectra.

The simulator is only as good as its line table, and the strengths and
widths of the four Zeeman components are experimental quantities.  This
module recovers them from digitized absorption-depth data (both polarization
axes) by least squares: model depths come from the same susceptibility ->
wavenumber -> depth chain the simulator uses, and a derivative-free simplex
descent runs on log-parameters so positivity can never be violated.

Zeeman splitting coefficients are fixed by default; they can be unlocked,
but on narrow data they trade off against the line centers, so leave them
locked unless the data spans well-separated components.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .constants import C_VACUUM, angular_to_wavelength_um, ghz_to_rad_s, rad_s_to_ghz
from .errors import ConfigError, FitNumericError, InsufficientDataError
from .physics import (
    POL_H,
    POL_V,
    HostCrystal,
    LineStrengths,
    ZeemanConfig,
    sellmeier_index,
    susceptibility,
    zeeman_transitions,
)

_LABELS = ("a", "b", "c", "d")

# Standard simplex coefficients: reflection, expansion, contraction, shrink.
_REFLECT = 1.0
_EXPAND = 2.0
_CONTRACT = 0.5
_SHRINK = 0.5


@dataclass(frozen=True)
class AbsorptionSample:
    """One digitized point: depth at a detuning from the reference line b."""

    detuning_ghz: float
    depth: float
    polarization: str

    def __post_init__(self):
        if not math.isfinite(self.detuning_ghz):
            raise ValueError("sample detuning must be finite")
        if not (math.isfinite(self.depth) and self.depth >= 0.0):
            raise ValueError("sample depth must be finite and non-negative")
        if self.polarization not in (POL_H, POL_V):
            raise ValueError(f"polarization must be H or V, got {self.polarization!r}")


@dataclass(frozen=True)
class FitResult:
    lines: LineStrengths
    zeeman: ZeemanConfig
    residual_rms: float
    iterations: int
    converged: bool
    initial_values: dict
    fitted_values: dict


def read_absorption_csv(path) -> list:
    """Read samples from a CSV with header detuning_ghz,depth,polarization."""
    expected = ["detuning_ghz", "depth", "polarization"]
    samples = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != expected:
            raise ConfigError(
                f"{path}: expected CSV header {','.join(expected)}, got {header}"
            )
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ConfigError(f"{path}:{row_number}: expected 3 columns, got {len(row)}")
            try:
                samples.append(
                    AbsorptionSample(float(row[0]), float(row[1]), row[2].strip())
                )
            except ValueError as exc:
                raise ConfigError(f"{path}:{row_number}: {exc}") from exc
    return samples


def model_depths(zeeman: ZeemanConfig, crystal: HostCrystal, strengths: LineStrengths,
                 detuning_ghz, polarization: str):
    """Absorption depth the physics chain predicts at detunings from line b."""
    lines = zeeman_transitions(zeeman, strengths)
    omega = lines[1].frequency_rad_s + ghz_to_rad_s(np.asarray(detuning_ghz, dtype=float))
    sel = crystal.extraordinary if polarization == POL_H else crystal.ordinary
    n = sellmeier_index(sel, angular_to_wavelength_um(omega))
    k0 = n * omega / C_VACUUM
    chi = susceptibility(lines, polarization, omega, k0)
    return k0 * np.imag(chi) * crystal.length_m


def _spectroscopy_dict(strengths: LineStrengths, zeeman: ZeemanConfig, fit_zeeman: bool) -> dict:
    values = {}
    for label, alpha, delta in zip(_LABELS, strengths.absorption_m1, strengths.half_width_rad_s):
        values[f"alpha_{label}_cm1"] = alpha / 100.0
        values[f"fwhm_{label}_ghz"] = 2.0 * rad_s_to_ghz(delta)
    if fit_zeeman:
        values["ground_splitting_ghz_per_t"] = zeeman.ground_ghz_per_t
        values["excited_splitting_ghz_per_t"] = zeeman.excited_ghz_per_t
    return values


def _nelder_mead(objective, x0, max_iterations, improvement_tol):
    """Simplex descent with the standard 1 / 2 / 0.5 / 0.5 coefficients.

    Convergence: the relative improvement of the best residual, measured
    over a sliding window of 2*(dim+1) iterations, falls below
    ``improvement_tol``.  Returns (x_best, f_best, iterations, converged).
    The best value never increases between iterations.
    """
    n = len(x0)
    step = 0.1
    simplex = [np.array(x0, dtype=float)]
    for i in range(n):
        vertex = np.array(x0, dtype=float)
        vertex[i] += step
        simplex.append(vertex)
    values = [objective(v) for v in simplex]
    if not math.isfinite(min(values)):
        raise FitNumericError("residual is non-finite at the initial simplex")

    window = 2 * (n + 1)
    history = [min(values)]
    iterations = 0
    converged = False
    while iterations < max_iterations:
        iterations += 1
        order = sorted(range(len(simplex)), key=lambda i: (values[i], i))
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        centroid = np.mean(simplex[:-1], axis=0)

        reflected = centroid + _REFLECT * (centroid - simplex[-1])
        f_reflected = objective(reflected)
        if f_reflected < values[0]:
            expanded = centroid + _EXPAND * (reflected - centroid)
            f_expanded = objective(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
        else:
            if f_reflected < values[-1]:
                contracted = centroid + _CONTRACT * (reflected - centroid)
            else:
                contracted = centroid + _CONTRACT * (simplex[-1] - centroid)
            f_contracted = objective(contracted)
            if f_contracted < min(f_reflected, values[-1]):
                simplex[-1], values[-1] = contracted, f_contracted
            else:
                best = simplex[0]
                simplex = [best] + [best + _SHRINK * (v - best) for v in simplex[1:]]
                values = [values[0]] + [objective(v) for v in simplex[1:]]

        best_now = min(values)
        history.append(best_now)
        if len(history) > window:
            reference = history[-window - 1]
            improvement = (reference - best_now) / max(reference, 1e-300)
            if improvement < improvement_tol:
                converged = True
                break

    order = sorted(range(len(simplex)), key=lambda i: (values[i], i))
    return simplex[order[0]], values[order[0]], iterations, converged


def fit_lines(
    samples,
    zeeman: ZeemanConfig,
    crystal: HostCrystal,
    initial: LineStrengths,
    fit_zeeman: bool = False,
    max_iterations: int = 10_000,
    improvement_tol: float = 1e-8,
) -> FitResult:
    """Least-squares fit of line strengths and widths to depth samples.

    Requires samples on both polarization axes, since each axis constrains a
    disjoint pair of lines.  Splitting coefficients join the parameter
    vector only when ``fit_zeeman`` is set.  Deterministic given inputs.
    """
    samples = list(samples)
    if not samples:
        raise InsufficientDataError("no absorption samples given")
    present = {s.polarization for s in samples}
    if present != {POL_H, POL_V}:
        missing = sorted({POL_H, POL_V} - present)
        raise InsufficientDataError(
            f"need samples for both polarizations; missing {', '.join(missing)}"
        )
    if any(a <= 0.0 for a in initial.absorption_m1):
        raise ValueError("initial absorption guesses must be positive for log fitting")
    if fit_zeeman and (zeeman.ground_ghz_per_t <= 0.0 or zeeman.excited_ghz_per_t <= 0.0):
        raise ValueError("initial splitting coefficients must be positive for log fitting")

    detunings = {
        pol: np.array([s.detuning_ghz for s in samples if s.polarization == pol])
        for pol in (POL_H, POL_V)
    }
    depths = {
        pol: np.array([s.depth for s in samples if s.polarization == pol])
        for pol in (POL_H, POL_V)
    }
    total = len(samples)

    def unpack(x):
        alphas = tuple(math.exp(v) for v in x[0:4])
        deltas = tuple(math.exp(v) for v in x[4:8])
        strengths = LineStrengths(alphas, deltas)
        zee = zeeman
        if fit_zeeman:
            zee = replace(
                zeeman,
                ground_ghz_per_t=math.exp(x[8]),
                excited_ghz_per_t=math.exp(x[9]),
            )
        return strengths, zee

    def objective(x):
        try:
            strengths, zee = unpack(x)
        except (OverflowError, ValueError):
            # exp overflow, or a width that underflowed to zero
            return math.inf
        sse = 0.0
        for pol in (POL_H, POL_V):
            model = model_depths(zee, crystal, strengths, detunings[pol], pol)
            residual = model - depths[pol]
            sse += float(np.sum(residual * residual))
        return sse if math.isfinite(sse) else math.inf

    x0 = [math.log(a) for a in initial.absorption_m1]
    x0 += [math.log(d) for d in initial.half_width_rad_s]
    if fit_zeeman:
        x0 += [math.log(zeeman.ground_ghz_per_t), math.log(zeeman.excited_ghz_per_t)]

    x_best, f_best, iterations, converged = _nelder_mead(
        objective, x0, max_iterations, improvement_tol
    )
    if not math.isfinite(f_best):
        raise FitNumericError("fit residual is non-finite")
    fitted_lines, fitted_zeeman = unpack(x_best)
    return FitResult(
        lines=fitted_lines,
        zeeman=fitted_zeeman,
        residual_rms=math.sqrt(f_best / total),
        iterations=iterations,
        converged=converged,
        initial_values=_spectroscopy_dict(initial, zeeman, fit_zeeman),
        fitted_values=_spectroscopy_dict(fitted_lines, fitted_zeeman, fit_zeeman),
    )
