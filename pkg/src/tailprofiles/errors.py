"""Exception classes shared across the package.

The CLI maps these onto exit codes: configuration problems -> 2,
data problems -> 3, numerical problems -> 4.
"""


class TailProfilesError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(TailProfilesError, ValueError):
    """An argument violates a structural precondition (non-finite, wrong shape)."""


class ParameterError(TailProfilesError, ValueError):
    """A model parameter (variogram, covariance, law) fails validation."""


class SampleSizeError(TailProfilesError, ValueError):
    """Too few observations to carry out the requested operation."""


class DegenerateMarginError(TailProfilesError, ValueError):
    """A data column is constant and cannot be rank-standardized."""


class NumericError(TailProfilesError, RuntimeError):
    """A numerical routine failed (eigen solver, quadrature floor)."""


class DegenerateLawError(NumericError):
    """A tabulated law is too degenerate for the requested transform."""


class GridResolutionError(NumericError):
    """Grid too coarse: output violates monotonicity/normalization tolerances."""


class InefficiencyError(NumericError):
    """Rejection sampler acceptance fell below the configured floor."""


class ConfigError(TailProfilesError, ValueError):
    """A run configuration is malformed or references missing files."""
