"""Exception types shared across the package."""


class FadofError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(FadofError):
    """Invalid run configuration: bad key, bad unit, unparseable file."""


class InvalidCoefficientsError(FadofError):
    """Sellmeier coefficients produce a non-physical index (n^2 <= 0)."""


class NoPeakError(FadofError):
    """Spectrum carries no usable transmission peak (max below floor)."""


class GridTooNarrowError(FadofError):
    """Half-maximum crossings are not bracketed inside the sampled grid."""


class InfeasibleError(FadofError):
    """No point in the search space satisfies the design constraint.

    Carries the best constraint-violating candidate found, for diagnostics.
    """

    def __init__(self, message, best_infeasible=None):
        super().__init__(message)
        self.best_infeasible = best_infeasible


class InsufficientDataError(FadofError):
    """Calibration input lacks the samples needed to constrain the fit."""


class FitNumericError(FadofError):
    """Calibration residual became non-finite."""
