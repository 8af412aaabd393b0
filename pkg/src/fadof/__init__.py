"""Solid-state Faraday anomalous-dispersion optical filter (FADOF) toolkit.

Models a rare-earth-doped birefringent crystal between crossed polarizers:
Zeeman-split Lorentzian transition lines give each linear polarization axis
its own complex susceptibility, the relative dispersion rotates the
polarization of light passing through, and narrow transmission windows open
where the rotation nears odd multiples of pi/2 outside the absorption bands.
"""

from .calibrate import AbsorptionSample, FitResult, fit_lines, read_absorption_csv
from .config import RunConfig, parse_config
from .design import (
    DesignSolution,
    FigureOfMerit,
    SweepResult,
    TradeoffPoint,
    figures_of_merit,
    optimize,
    sweep,
    tradeoff_curve,
)
from .errors import (
    ConfigError,
    FadofError,
    FitNumericError,
    GridTooNarrowError,
    InfeasibleError,
    InsufficientDataError,
    InvalidCoefficientsError,
    NoPeakError,
)
from .physics import (
    POL_H,
    POL_V,
    FilterConfig,
    HostCrystal,
    LineStrengths,
    SellmeierSet,
    TransitionLine,
    ZeemanConfig,
    absorption_depth,
    sellmeier_index,
    susceptibility,
    wavenumber,
    zeeman_transitions,
)
from .transfer import (
    DEFAULT_GRID,
    DetuningGrid,
    Spectrum,
    SpectrumPoint,
    jones_oracle,
    reference_frequency,
    rotation_angle,
    spectrum,
    transmission,
)

__version__ = "0.1.0"
