"""Run-configuration files: strict TOML schema with unit-suffixed keys.

Every physical quantity carries its unit in the key name (length_mm,
field_t, linewidth_fwhm_ghz, ...) and is converted to SI exactly once, here.
Unknown keys anywhere in the file are rejected: silent unit or spelling
mistakes are the dominant failure mode in this kind of tooling, so the
schema is deliberately unforgiving.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .physics import (
    FilterConfig,
    HostCrystal,
    LineStrengths,
    SellmeierSet,
    ZeemanConfig,
)
from .transfer import DetuningGrid

LINE_LABELS = ("a", "b", "c", "d")


@dataclass(frozen=True)
class SweepSpec:
    field_min_t: float
    field_max_t: float
    field_steps: int
    length_min_mm: float
    length_max_mm: float
    length_steps: int


@dataclass(frozen=True)
class OptimizeSpec:
    field_min_t: float
    field_max_t: float
    length_min_mm: float
    length_max_mm: float
    max_bandwidth_ghz: Optional[float]
    coarse_steps: int


@dataclass(frozen=True)
class CalibrateSpec:
    fit_zeeman: bool = False
    max_iterations: int = 10_000


@dataclass(frozen=True)
class RunConfig:
    filter: FilterConfig
    grid: DetuningGrid
    sweep: Optional[SweepSpec]
    optimize: Optional[OptimizeSpec]
    calibrate: CalibrateSpec


class _Table:
    """One TOML table plus its key path, with strict extraction."""

    def __init__(self, data, path):
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a table")
        self.data = dict(data)
        self.path = path

    def table(self, key) -> "_Table":
        if key not in self.data:
            raise ConfigError(f"{self.path}: missing required table [{key}]")
        return _Table(self.data.pop(key), f"{self.path}.{key}")

    def optional_table(self, key) -> Optional["_Table"]:
        if key not in self.data:
            return None
        return _Table(self.data.pop(key), f"{self.path}.{key}")

    def _value(self, key, required, default):
        if key not in self.data:
            if required:
                raise ConfigError(f"{self.path}: missing required key '{key}'")
            return default
        return self.data.pop(key)

    def number(self, key, *, positive=False, nonnegative=False, required=True, default=None):
        raw = self._value(key, required, default)
        if raw is default and raw is None:
            return None
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ConfigError(f"{self.path}.{key}: expected a number, got {raw!r}")
        value = float(raw)
        if not math.isfinite(value):
            raise ConfigError(f"{self.path}.{key}: must be finite")
        if positive and not value > 0.0:
            raise ConfigError(f"{self.path}.{key}: must be positive, got {value}")
        if nonnegative and value < 0.0:
            raise ConfigError(f"{self.path}.{key}: must be non-negative, got {value}")
        return value

    def integer(self, key, *, minimum=None, required=True, default=None):
        raw = self._value(key, required, default)
        if raw is default and raw is None:
            return None
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ConfigError(f"{self.path}.{key}: expected an integer, got {raw!r}")
        if minimum is not None and raw < minimum:
            raise ConfigError(f"{self.path}.{key}: must be >= {minimum}, got {raw}")
        return raw

    def boolean(self, key, *, required=True, default=None):
        raw = self._value(key, required, default)
        if raw is None:
            return default
        if not isinstance(raw, bool):
            raise ConfigError(f"{self.path}.{key}: expected true/false, got {raw!r}")
        return raw

    def pair(self, key):
        raw = self._value(key, True, None)
        if (
            not isinstance(raw, list)
            or len(raw) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw)
        ):
            raise ConfigError(f"{self.path}.{key}: expected a pair of numbers")
        return float(raw[0]), float(raw[1])

    def close(self):
        if self.data:
            key = sorted(self.data)[0]
            raise ConfigError(f"{self.path}: unknown key '{key}'")


def _parse_sellmeier(table: _Table) -> SellmeierSet:
    a = table.number("a", positive=True)
    b = table.number("b", nonnegative=True)
    c_um2 = table.number("c_um2", nonnegative=True)
    d_per_um2 = table.number("d_per_um2", nonnegative=True)
    lo, hi = table.pair("valid_range_um")
    table.close()
    if not (0.0 < lo < hi):
        raise ConfigError(f"{table.path}.valid_range_um: must be a positive interval")
    return SellmeierSet(a, b, c_um2, d_per_um2, lo, hi)


def _parse_filter(root: _Table) -> FilterConfig:
    crystal = root.table("crystal")
    length_mm = crystal.number("length_mm", positive=True)
    ordinary = _parse_sellmeier(crystal.table("sellmeier_ordinary"))
    extraordinary = _parse_sellmeier(crystal.table("sellmeier_extraordinary"))
    crystal.close()

    transition = root.table("transition")
    wavelength_nm = transition.number("wavelength_nm", positive=True)
    transition.close()

    zeeman_table = root.table("zeeman")
    field_t = zeeman_table.number("field_t", nonnegative=True)
    ground = zeeman_table.number("ground_splitting_ghz_per_t", nonnegative=True)
    excited = zeeman_table.number("excited_splitting_ghz_per_t", nonnegative=True)
    zeeman_table.close()

    lines_table = root.table("lines")
    absorption_cm1 = []
    fwhm_ghz = []
    for label in LINE_LABELS:
        line = lines_table.table(label)
        absorption_cm1.append(line.number("absorption_cm1", nonnegative=True))
        fwhm_ghz.append(line.number("linewidth_fwhm_ghz", positive=True))
        line.close()
    lines_table.close()

    try:
        return FilterConfig(
            crystal=HostCrystal.from_length_mm(ordinary, extraordinary, length_mm),
            zeeman=ZeemanConfig.from_wavelength_nm(wavelength_nm, ground, excited, field_t),
            lines=LineStrengths.from_spectroscopy_units(absorption_cm1, fwhm_ghz),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_grid(root: _Table) -> DetuningGrid:
    table = root.optional_table("grid")
    if table is None:
        return DetuningGrid.centered(60.0, 8192)
    span = table.number("span_ghz", positive=True, required=False)
    points = table.integer("points", minimum=2, required=False)
    table.close()
    return DetuningGrid.centered(
        span if span is not None else 60.0,
        points if points is not None else 8192,
    )


def _parse_sweep(root: _Table) -> Optional[SweepSpec]:
    table = root.optional_table("sweep")
    if table is None:
        return None
    spec = SweepSpec(
        field_min_t=table.number("field_min_t", nonnegative=True),
        field_max_t=table.number("field_max_t", nonnegative=True),
        field_steps=table.integer("field_steps", minimum=1),
        length_min_mm=table.number("length_min_mm", positive=True),
        length_max_mm=table.number("length_max_mm", positive=True),
        length_steps=table.integer("length_steps", minimum=1),
    )
    table.close()
    if spec.field_max_t < spec.field_min_t or spec.length_max_mm < spec.length_min_mm:
        raise ConfigError(f"{table.path}: range maxima must not be below minima")
    return spec


def _parse_optimize(root: _Table) -> Optional[OptimizeSpec]:
    table = root.optional_table("optimize")
    if table is None:
        return None
    spec = OptimizeSpec(
        field_min_t=table.number("field_min_t", nonnegative=True),
        field_max_t=table.number("field_max_t", nonnegative=True),
        length_min_mm=table.number("length_min_mm", positive=True),
        length_max_mm=table.number("length_max_mm", positive=True),
        max_bandwidth_ghz=table.number("max_bandwidth_ghz", positive=True, required=False),
        coarse_steps=table.integer("coarse_steps", minimum=1, required=False, default=32),
    )
    table.close()
    if spec.field_max_t < spec.field_min_t or spec.length_max_mm < spec.length_min_mm:
        raise ConfigError(f"{table.path}: bound maxima must not be below minima")
    return spec


def _parse_calibrate(root: _Table) -> CalibrateSpec:
    table = root.optional_table("calibrate")
    if table is None:
        return CalibrateSpec()
    spec = CalibrateSpec(
        fit_zeeman=table.boolean("fit_zeeman", required=False, default=False),
        max_iterations=table.integer("max_iterations", minimum=1, required=False, default=10_000),
    )
    table.close()
    return spec


def parse_config(path) -> RunConfig:
    """Parse and validate a run-configuration file.

    Raises ConfigError (with the offending key path) on any missing or
    unknown key, malformed value, non-positive physical quantity, or a
    transition wavelength outside the Sellmeier validity windows.
    """
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc

    root = _Table(data, "config")
    filter_config = _parse_filter(root)
    grid = _parse_grid(root)
    sweep = _parse_sweep(root)
    optimize = _parse_optimize(root)
    calibrate = _parse_calibrate(root)
    root.close()
    return RunConfig(
        filter=filter_config,
        grid=grid,
        sweep=sweep,
        optimize=optimize,
        calibrate=calibrate,
    )
