"""Multivariate extremal dependence via profile random vectors.

Asymptotically dependent tails are summarized by a random vector on the
hyperplane perpendicular to the diagonal. The package provides the linear
algebra of that hyperplane, exact simulation of mean-thresholded tail
models, diagonal peaks-over-threshold estimation, the Gaussian (variogram)
parameterization, max-law transforms between the generator and profile
scales, and principal component analysis of tail dependence.
"""

__version__ = "0.1.0"

from .constructions import (
    GevExponentResult,
    RejectionResult,
    SamplerHandle,
    TiltingResult,
    derive_seed,
    exponential_draws,
    gev_exponent,
    profile_from_spectral,
    sample_T_from_U,
    sample_U_from_T,
    sample_X_from_U,
    sample_Z,
    sample_Zstar_from_U,
    spectral_from_profile,
)
from .errors import (
    ConfigError,
    DegenerateLawError,
    DegenerateMarginError,
    GridResolutionError,
    InefficiencyError,
    InvalidInputError,
    NumericError,
    ParameterError,
    SampleSizeError,
    TailProfilesError,
)
from .husler_reiss import (
    GaussianProfileLaw,
    gamma_to_sigma,
    mu_from_sigma,
    sample_gaussian_profile,
    sigma_to_gamma,
    variogram_of_covariance,
)
from .hyperplane import (
    Validation,
    apply_projector,
    as_profile_vector,
    center,
    center_rows,
    hyperplane_basis,
    is_valid_hyperplane_covariance,
    is_valid_variogram,
)
from .inference import (
    ExceedanceSet,
    HRFit,
    extract_exceedances,
    fit_hr,
    standardize_margins,
    threshold_stability,
)
from .max_link import (
    MomentIdentityReport,
    TabulatedCDF,
    TabulatedDensity,
    check_moment_identity,
    density_transform,
    expected_exp_max,
    expected_exp_neg_max,
    maxT_cdf_from_maxU,
    maxU_cdf_from_maxT,
    uniform_grid,
)
from .pca import (
    ProfileEigensystem,
    TruncationResult,
    profile_pca,
    reconstruction_error,
    truncate_to_rank,
)

__all__ = [
    "__version__",
    "ConfigError",
    "DegenerateLawError",
    "DegenerateMarginError",
    "ExceedanceSet",
    "GaussianProfileLaw",
    "GevExponentResult",
    "GridResolutionError",
    "HRFit",
    "InefficiencyError",
    "InvalidInputError",
    "MomentIdentityReport",
    "NumericError",
    "ParameterError",
    "ProfileEigensystem",
    "RejectionResult",
    "SampleSizeError",
    "SamplerHandle",
    "TabulatedCDF",
    "TabulatedDensity",
    "TailProfilesError",
    "TiltingResult",
    "TruncationResult",
    "Validation",
    "apply_projector",
    "as_profile_vector",
    "center",
    "center_rows",
    "check_moment_identity",
    "density_transform",
    "derive_seed",
    "expected_exp_max",
    "expected_exp_neg_max",
    "exponential_draws",
    "extract_exceedances",
    "fit_hr",
    "gamma_to_sigma",
    "gev_exponent",
    "hyperplane_basis",
    "is_valid_hyperplane_covariance",
    "is_valid_variogram",
    "maxT_cdf_from_maxU",
    "maxU_cdf_from_maxT",
    "mu_from_sigma",
    "profile_from_spectral",
    "profile_pca",
    "reconstruction_error",
    "sample_T_from_U",
    "sample_U_from_T",
    "sample_X_from_U",
    "sample_Z",
    "sample_Zstar_from_U",
    "sample_gaussian_profile",
    "sigma_to_gamma",
    "spectral_from_profile",
    "standardize_margins",
    "threshold_stability",
    "truncate_to_rank",
    "uniform_grid",
    "variogram_of_covariance",
]
