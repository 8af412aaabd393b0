"""Filter observables: rotation angle, transmission, sampled spectra.

The cell is a doped birefringent crystal followed by an identical undoped one
whose c-axis is rotated by 90 degrees, placed between crossed polarizers.
The undoped crystal swaps the roles of the two principal indices, so the
intrinsic birefringent phases k0_H*L and k0_V*L cancel exactly; the phase
that survives is the dopant contribution kappa_P = k0_P * chi_P / 2 per
polarization axis.  The compensation is applied analytically here, which
both matches the idealized optics and avoids subtracting ~1e5 rad base
phases numerically.

``jones_oracle`` deliberately does NOT use that simplification: it pushes a
Jones vector through the full per-element matrices, large base phases
included, and serves as an independent cross-check of ``transmission``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import C_VACUUM, ghz_to_rad_s
from .physics import (
    POL_H,
    POL_V,
    FilterConfig,
    absorption_depth,
    refractive_indices,
    susceptibility,
    wavenumber,
)
from .workers import deterministic_map, resolve_workers

# Grids are evaluated in fixed-size chunks regardless of worker count, so the
# same chunk boundaries (and therefore the same bits) come out either way.
_CHUNK_POINTS = 1024


@dataclass(frozen=True)
class DetuningGrid:
    """Uniform sampling grid in detuning from the reference line b, in GHz."""

    min_ghz: float
    max_ghz: float
    points: int

    def __post_init__(self):
        if not (np.isfinite(self.min_ghz) and np.isfinite(self.max_ghz)):
            raise ValueError("grid range must be finite")
        if not self.max_ghz > self.min_ghz:
            raise ValueError("grid range must be a nonempty interval")
        if self.points < 2:
            raise ValueError("grid needs at least 2 points")

    @classmethod
    def centered(cls, span_ghz: float, points: int) -> "DetuningGrid":
        return cls(-span_ghz, span_ghz, points)

    def values(self) -> np.ndarray:
        return np.linspace(self.min_ghz, self.max_ghz, self.points)

    def refined(self, factor: int) -> "DetuningGrid":
        return DetuningGrid(self.min_ghz, self.max_ghz, self.points * factor)


DEFAULT_GRID = DetuningGrid.centered(60.0, 8192)


@dataclass(frozen=True)
class SpectrumPoint:
    detuning_ghz: float
    transmission: float
    rotation_rad: float
    depth_h: float
    depth_v: float
    index_h: float
    index_v: float


@dataclass(frozen=True)
class Spectrum:
    """Column-oriented record of filter observables on an increasing grid."""

    detuning_ghz: np.ndarray
    transmission: np.ndarray
    rotation_rad: np.ndarray
    depth_h: np.ndarray
    depth_v: np.ndarray
    index_h: np.ndarray
    index_v: np.ndarray
    config: FilterConfig

    def __post_init__(self):
        if len(self.detuning_ghz) < 2:
            raise ValueError("spectrum needs at least 2 points")
        if not np.all(np.diff(self.detuning_ghz) > 0.0):
            raise ValueError("detuning grid must be strictly increasing")

    def __len__(self) -> int:
        return len(self.detuning_ghz)

    def __getitem__(self, i: int) -> SpectrumPoint:
        return SpectrumPoint(
            float(self.detuning_ghz[i]),
            float(self.transmission[i]),
            float(self.rotation_rad[i]),
            float(self.depth_h[i]),
            float(self.depth_v[i]),
            float(self.index_h[i]),
            float(self.index_v[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))


def reference_frequency(config: FilterConfig) -> float:
    """Frequency of line b, the origin of all reported detunings."""
    return config.transitions()[1].frequency_rad_s


def rotation_angle(k_h, k_v, length_m):
    """Polarization rotation accumulated over the cell.

    k_h and k_v are the compensated differential wavenumbers (the intrinsic
    birefringent phases have already cancelled).  The value is continuous in
    frequency, not reduced mod pi.
    """
    return 0.5 * length_m * np.real(k_h - k_v)


def _differential_wavenumbers(config: FilterConfig, omega):
    """kappa_P = k0_P * chi_P / 2 for both axes, plus the intrinsic indices."""
    n_h, n_v = refractive_indices(config, omega)
    k0_h = n_h * omega / C_VACUUM
    k0_v = n_v * omega / C_VACUUM
    lines = config.transitions()
    kappa_h = 0.5 * k0_h * susceptibility(lines, POL_H, omega, k0_h)
    kappa_v = 0.5 * k0_v * susceptibility(lines, POL_V, omega, k0_v)
    return kappa_h, kappa_v, n_h, n_v


def _observables(config: FilterConfig, omega):
    length = config.crystal.length_m
    kappa_h, kappa_v, n_h, n_v = _differential_wavenumbers(config, omega)
    depth_h = absorption_depth(kappa_h, length)
    depth_v = absorption_depth(kappa_v, length)
    phi = rotation_angle(kappa_h, kappa_v, length)
    diff = np.exp(1j * kappa_h * length) - np.exp(1j * kappa_v * length)
    trans = 0.25 * np.abs(diff) ** 2
    return trans, phi, depth_h, depth_v, n_h, n_v


def transmission(config: FilterConfig, omega_rad_s: float) -> float:
    """Crossed-polarizer transmission at one frequency, in [0, 1].

    Computed as T = |exp(i*kappa_H*L) - exp(i*kappa_V*L)|^2 / 4 with the
    compensated differential wavenumbers; algebraically this equals
    exp(-d_H)/4 + exp(-d_V)/4 - cos(2*Phi)*exp(-(d_H+d_V)/2)/2.
    """
    return float(_observables(config, np.asarray(omega_rad_s, dtype=float))[0])


def jones_oracle(config: FilterConfig, omega_rad_s, compensate: bool = True):
    """Brute-force Jones propagation through the full element matrices.

    The input field (1, 1)/sqrt(2) passes the doped crystal
    diag(exp(i*k_H*L), exp(i*k_V*L)) with the full complex wavenumbers
    k_P = k0_P*(1 + chi_P/2), then the lossless 90-degree-rotated undoped
    compensator diag(exp(i*k0_V*L), exp(i*k0_H*L)), and is finally projected
    onto the crossed analyzer axis (1, -1)/sqrt(2).  Returns transmitted
    power over input power.  With ``compensate=False`` the second crystal is
    replaced by the identity, exposing the raw birefringent phase beating.
    """
    omega = np.asarray(omega_rad_s, dtype=float)
    length = config.crystal.length_m
    n_h, n_v = refractive_indices(config, omega)
    k0_h = n_h * omega / C_VACUUM
    k0_v = n_v * omega / C_VACUUM
    lines = config.transitions()
    chi_h = susceptibility(lines, POL_H, omega, k0_h)
    chi_v = susceptibility(lines, POL_V, omega, k0_v)
    k_h = wavenumber(omega, n_h, chi_h)
    k_v = wavenumber(omega, n_v, chi_v)

    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    e_h = inv_sqrt2 * np.exp(1j * k_h * length)
    e_v = inv_sqrt2 * np.exp(1j * k_v * length)
    if compensate:
        e_h = e_h * np.exp(1j * k0_v * length)
        e_v = e_v * np.exp(1j * k0_h * length)
    out = inv_sqrt2 * (e_h - e_v)
    power = np.abs(out) ** 2
    return float(power) if np.isscalar(omega_rad_s) else power


def spectrum(config: FilterConfig, grid: DetuningGrid, workers=None) -> Spectrum:
    """Sample all observables over a detuning grid around line b.

    Points are independent; the grid is processed in fixed 1024-point chunks
    fanned out over ``workers`` threads, and the assembled spectrum does not
    depend on the worker count.
    """
    detunings = grid.values()
    omega = reference_frequency(config) + ghz_to_rad_s(detunings)
    slices = [slice(i, i + _CHUNK_POINTS) for i in range(0, grid.points, _CHUNK_POINTS)]
    parts = deterministic_map(
        lambda sl: _observables(config, omega[sl]), slices, resolve_workers(workers)
    )
    columns = [np.concatenate([np.atleast_1d(part[j]) for part in parts]) for j in range(6)]
    return Spectrum(detunings, *columns, config=config)
