"""Microscopic model of the magneto-optical medium.

A rare-earth-doped uniaxial crystal sits in a homogeneous axial magnetic
field.  The working optical transition connects two Kramers doublets; the
field splits each doublet linearly, producing four transition lines (labelled
a, b, c, d).  Selection rules fix the linear polarization of each line: the
inner pair (b, c) couples to light polarized along the crystal c-axis (H),
the outer pair (a, d) to the orthogonal axis (V).

Each line is an independent Lorentzian oscillator.  Summing the matching
lines gives the complex susceptibility per polarization axis, from which the
complex wavenumber and the intensity absorption depth follow.

Everything in this module is a pure function of its inputs; no caching, no
shared mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import (
    C_VACUUM,
    TWO_PI,
    angular_to_wavelength_um,
    ghz_to_rad_s,
    mm_to_m,
    per_cm_to_per_m,
    wavelength_nm_to_angular,
)
from .errors import InvalidCoefficientsError

POL_H = "H"  # parallel to the doped crystal's c-axis (extraordinary index)
POL_V = "V"  # perpendicular (ordinary index)

LINE_LABELS = ("a", "b", "c", "d")

# b, c form the inner Zeeman doublet and couple to H; a, d the outer, to V.
LINE_POLARIZATIONS = {"a": POL_V, "b": POL_H, "c": POL_H, "d": POL_V}


@dataclass(frozen=True)
class SellmeierSet:
    """Dispersion formula n^2 = a + b/(lam^2 - c) - d*lam^2, lam in um."""

    a: float
    b: float
    c_um2: float        # pole position, um^2
    d_per_um2: float    # infrared correction, um^-2
    valid_min_um: float
    valid_max_um: float

    def __post_init__(self):
        if not (0.0 < self.valid_min_um < self.valid_max_um):
            raise ValueError(
                "Sellmeier valid range must be a nonempty interval with "
                f"positive endpoints, got [{self.valid_min_um}, {self.valid_max_um}]"
            )


def sellmeier_index(sellmeier: SellmeierSet, wavelength_um):
    """Real refractive index at a vacuum wavelength inside the valid range.

    Accepts a scalar or array wavelength.  Raises ValueError outside the
    declared validity window and InvalidCoefficientsError if the formula
    yields n^2 <= 0.
    """
    lam = np.asarray(wavelength_um, dtype=float)
    if np.any(lam < sellmeier.valid_min_um) or np.any(lam > sellmeier.valid_max_um):
        raise ValueError(
            f"wavelength {wavelength_um} um outside Sellmeier validity "
            f"[{sellmeier.valid_min_um}, {sellmeier.valid_max_um}] um"
        )
    lam2 = lam * lam
    n2 = sellmeier.a + sellmeier.b / (lam2 - sellmeier.c_um2) - sellmeier.d_per_um2 * lam2
    if np.any(n2 <= 0.0):
        raise InvalidCoefficientsError(f"Sellmeier set yields n^2 <= 0 at {wavelength_um} um")
    n = np.sqrt(n2)
    return float(n) if np.isscalar(wavelength_um) else n


@dataclass(frozen=True)
class HostCrystal:
    """Birefringent host: two principal Sellmeier sets and the doped length."""

    ordinary: SellmeierSet
    extraordinary: SellmeierSet
    length_m: float

    def __post_init__(self):
        if not self.length_m > 0.0:
            raise ValueError(f"crystal length must be positive, got {self.length_m} m")

    @classmethod
    def from_length_mm(cls, ordinary, extraordinary, length_mm):
        return cls(ordinary, extraordinary, mm_to_m(length_mm))


@dataclass(frozen=True)
class ZeemanConfig:
    """Zero-field line center plus the linear splitting model.

    The ground and excited doublets split by ground_ghz_per_t * field_t and
    excited_ghz_per_t * field_t respectively; the splittings are exactly
    linear in the field within this model.
    """

    center_rad_s: float       # zero-field transition frequency omega_0
    ground_ghz_per_t: float
    excited_ghz_per_t: float
    field_t: float

    def __post_init__(self):
        if not self.center_rad_s > 0.0:
            raise ValueError("center frequency must be positive")
        if self.field_t < 0.0 or self.ground_ghz_per_t < 0.0 or self.excited_ghz_per_t < 0.0:
            raise ValueError("field and splitting coefficients must be non-negative")

    @classmethod
    def from_wavelength_nm(cls, wavelength_nm, ground_ghz_per_t, excited_ghz_per_t, field_t):
        return cls(
            wavelength_nm_to_angular(wavelength_nm),
            ground_ghz_per_t,
            excited_ghz_per_t,
            field_t,
        )

    @property
    def wavelength_um(self) -> float:
        return angular_to_wavelength_um(self.center_rad_s)


@dataclass(frozen=True)
class LineStrengths:
    """Per-line oscillator parameters, ordered (a, b, c, d).

    absorption_m1 holds on-resonance absorption coefficients in 1/m;
    half_width_rad_s holds Lorentzian half-widths (HWHM) in rad/s.
    """

    absorption_m1: tuple[float, float, float, float]
    half_width_rad_s: tuple[float, float, float, float]

    def __post_init__(self):
        if len(self.absorption_m1) != 4 or len(self.half_width_rad_s) != 4:
            raise ValueError("need exactly four absorption and four width entries")
        if any(a < 0.0 for a in self.absorption_m1):
            raise ValueError("absorption coefficients must be non-negative")
        if any(d <= 0.0 for d in self.half_width_rad_s):
            raise ValueError("half-widths must be positive")

    @classmethod
    def from_spectroscopy_units(cls, absorption_cm1, fwhm_ghz):
        """Build from tabulated units: alpha in 1/cm, full width at half maximum in GHz."""
        return cls(
            tuple(per_cm_to_per_m(a) for a in absorption_cm1),
            tuple(ghz_to_rad_s(w) / 2.0 for w in fwhm_ghz),
        )


@dataclass(frozen=True)
class TransitionLine:
    """One Zeeman component of the working transition."""

    label: str              # one of 'a', 'b', 'c', 'd'
    polarization: str       # POL_H or POL_V
    frequency_rad_s: float  # omega_q
    detuning_rad_s: float   # omega_q - omega_0, exactly linear in the field
    absorption_m1: float    # on-resonance absorption coefficient alpha_q
    half_width_rad_s: float  # HWHM delta_q


def zeeman_transitions(zeeman: ZeemanConfig, strengths: LineStrengths):
    """Split the zero-field line into its four Zeeman components.

    Labels a..d take detunings -(dg+de)/2, -(dg-de)/2, +(dg-de)/2, +(dg+de)/2
    from the line center, where dg and de are the ground and excited doublet
    splittings.  The inner pair (b, c) is H-polarized, the outer (a, d)
    V-polarized.
    """
    dg = ghz_to_rad_s(zeeman.ground_ghz_per_t * zeeman.field_t)
    de = ghz_to_rad_s(zeeman.excited_ghz_per_t * zeeman.field_t)
    outer = 0.5 * (dg + de)
    inner = 0.5 * (dg - de)
    detunings = (-outer, -inner, inner, outer)
    return tuple(
        TransitionLine(
            label=label,
            polarization=LINE_POLARIZATIONS[label],
            frequency_rad_s=zeeman.center_rad_s + det,
            detuning_rad_s=det,
            absorption_m1=alpha,
            half_width_rad_s=delta,
        )
        for label, det, alpha, delta in zip(
            LINE_LABELS, detunings, strengths.absorption_m1, strengths.half_width_rad_s
        )
    )


def susceptibility(lines, polarization, omega_rad_s, k0_rad_m):
    """Complex susceptibility of the lines matching one polarization axis.

    chi(omega) = -sum_q alpha_q * delta_q / (k0 * ((omega - omega_q) + i*delta_q))

    restricted to lines with the requested polarization.  Im(chi) >= 0 for
    any passive line set.  omega and k0 may be scalars or same-shape arrays.
    """
    omega = np.asarray(omega_rad_s, dtype=float)
    chi = np.zeros(np.broadcast(omega, np.asarray(k0_rad_m)).shape, dtype=complex)
    for line in lines:
        if line.polarization != polarization:
            continue
        chi -= (line.absorption_m1 * line.half_width_rad_s) / (
            k0_rad_m * ((omega - line.frequency_rad_s) + 1j * line.half_width_rad_s)
        )
    return complex(chi) if np.isscalar(omega_rad_s) and np.isscalar(k0_rad_m) else chi


def wavenumber(omega_rad_s, n0, chi):
    """Complex wavenumber under the weak-susceptibility dispersion relation.

    k = k0 * (1 + chi/2) with k0 = n0 * omega / c.  Valid for |chi| << 1;
    the caller is responsible for staying in that regime.
    """
    k0 = n0 * omega_rad_s / C_VACUUM
    return k0 * (1.0 + 0.5 * chi)


def absorption_depth(k, length_m):
    """Intensity attenuation exponent d = 2*Im(k)*L; transmission is exp(-d)."""
    return 2.0 * np.imag(k) * length_m


@dataclass(frozen=True)
class FilterConfig:
    """Complete physical description of one filter cell."""

    crystal: HostCrystal
    zeeman: ZeemanConfig
    lines: LineStrengths

    def __post_init__(self):
        lam = self.zeeman.wavelength_um
        for name, sel in (("ordinary", self.crystal.ordinary),
                          ("extraordinary", self.crystal.extraordinary)):
            if not (sel.valid_min_um <= lam <= sel.valid_max_um):
                raise ValueError(
                    f"transition wavelength {lam:.4f} um outside {name} Sellmeier "
                    f"validity [{sel.valid_min_um}, {sel.valid_max_um}] um"
                )

    def transitions(self):
        return zeeman_transitions(self.zeeman, self.lines)

    def with_field_t(self, field_t: float) -> "FilterConfig":
        return replace(self, zeeman=replace(self.zeeman, field_t=field_t))

    def with_length_m(self, length_m: float) -> "FilterConfig":
        return replace(self, crystal=replace(self.crystal, length_m=length_m))


def refractive_indices(config: FilterConfig, omega_rad_s):
    """Intrinsic (undoped) indices seen by H- and V-polarized light.

    H lies along the c-axis and sees the extraordinary index; V sees the
    ordinary one.  Evaluated at each sample's own frequency.
    """
    lam_um = angular_to_wavelength_um(omega_rad_s)
    n_h = sellmeier_index(config.crystal.extraordinary, lam_um)
    n_v = sellmeier_index(config.crystal.ordinary, lam_um)
    return n_h, n_v
