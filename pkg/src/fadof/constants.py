"""Physical constants and unit conversions.

All model code works in SI: angular frequency in rad/s, lengths in meters,
absorption coefficients in 1/m, magnetic flux density in tesla.  Human-facing
units (nm, um, mm, GHz, cm^-1) are converted exactly once, at ingest, using
the helpers below.  Every helper works on scalars and numpy arrays alike.
"""

import math

C_VACUUM = 299_792_458.0  # speed of light in vacuum, m/s (exact)

TWO_PI = 2.0 * math.pi


def wavelength_nm_to_angular(wavelength_nm):
    """Vacuum wavelength in nm -> angular frequency in rad/s."""
    return TWO_PI * C_VACUUM / (wavelength_nm * 1e-9)


def angular_to_wavelength_um(omega_rad_s):
    """Angular frequency in rad/s -> vacuum wavelength in um."""
    return TWO_PI * C_VACUUM / omega_rad_s * 1e6


def ghz_to_rad_s(frequency_ghz):
    """Ordinary frequency in GHz -> angular frequency in rad/s."""
    return TWO_PI * 1e9 * frequency_ghz


def rad_s_to_ghz(omega_rad_s):
    """Angular frequency in rad/s -> ordinary frequency in GHz."""
    return omega_rad_s / (TWO_PI * 1e9)


def per_cm_to_per_m(alpha_cm1):
    """Absorption coefficient in 1/cm -> 1/m."""
    return alpha_cm1 * 100.0


def mm_to_m(length_mm):
    """Length in mm -> m."""
    return length_mm * 1e-3
