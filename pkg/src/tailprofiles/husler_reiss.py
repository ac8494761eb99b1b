"""Gaussian laws on the zero-sum hyperplane and the variogram correspondence.

A d-dimensional Husler-Reiss dependence structure is parameterized either by
a variogram ``gamma`` or, equivalently, by the Gaussian law ``N(mu, sigma)``
of its profile vector, with ``sigma = -P gamma P / 2`` and ``mu`` a fixed
function of ``diag(sigma)``. Setting ``extended=True`` decouples ``mu`` from
``sigma`` and covers arbitrary Gaussian profile laws.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, ParameterError
from .hyperplane import (
    TOL_CENTER,
    apply_projector,
    as_profile_vector,
    center,
    is_valid_hyperplane_covariance,
    is_valid_variogram,
    psd_tolerance,
)

# Maximum allowed deviation of mu from its value implied by sigma when the
# law is not flagged as extended.
EQ8_TOL = 1e-10


def gamma_to_sigma(gamma, tol_psd: float | None = None) -> np.ndarray:
    """Hyperplane covariance of the Gaussian profile law for variogram ``gamma``.

    Computes ``-P gamma P / 2``; the result is symmetric PSD and annihilates
    the diagonal vector.

    Raises
    ------
    ParameterError
        If ``gamma`` is not a valid variogram (the message names the
        violated condition).
    """
    check = is_valid_variogram(gamma, tol_psd)
    if not check:
        raise ParameterError(f"invalid variogram: {check.reason}")
    gamma = np.asarray(gamma, dtype=float)
    sigma = -0.5 * apply_projector(gamma)
    return 0.5 * (sigma + sigma.T)


def sigma_to_gamma(sigma, tol_psd: float | None = None) -> np.ndarray:
    """Variogram of a Gaussian vector with covariance ``sigma``.

    ``gamma[i, j] = sigma[i, i] + sigma[j, j] - 2 sigma[i, j]``; exact
    left-inverse of :func:`gamma_to_sigma`.
    """
    check = is_valid_hyperplane_covariance(sigma, tol_psd)
    if not check:
        raise ParameterError(f"invalid hyperplane covariance: {check.reason}")
    return variogram_of_covariance(np.asarray(sigma, dtype=float))


def variogram_of_covariance(cov) -> np.ndarray:
    """Variogram ``E(W_i - W_j)^2`` of any centered Gaussian covariance.

    Unlike :func:`sigma_to_gamma` this accepts a general covariance matrix;
    variograms are invariant under diagonal centering of the generating
    vector, so ``variogram_of_covariance(C) == sigma_to_gamma(P C P)``.
    """
    cov = np.asarray(cov, dtype=float)
    d = np.diag(cov)
    return d[:, None] + d[None, :] - 2.0 * cov


def mu_from_sigma(sigma) -> np.ndarray:
    """Location implied by ``sigma`` for a non-extended law.

    Equals ``-(diag(sigma) - mean(diag(sigma)) * 1) / 2``; always sums to
    zero.
    """
    sigma = np.asarray(sigma, dtype=float)
    return -0.5 * center(np.diag(sigma))


@dataclass(frozen=True)
class GaussianProfileLaw:
    """Gaussian law ``N(mu, sigma)`` supported on the zero-sum hyperplane.

    ``extended=False`` (the plain Husler-Reiss case) requires ``mu`` to match
    :func:`mu_from_sigma`; ``extended=True`` allows any zero-sum ``mu``.
    """

    mu: np.ndarray
    sigma: np.ndarray
    extended: bool = False
    tol_psd: float | None = field(default=None, repr=False)

    def __post_init__(self):
        mu = as_profile_vector(self.mu)
        sigma = np.asarray(self.sigma, dtype=float)
        check = is_valid_hyperplane_covariance(sigma, self.tol_psd)
        if not check:
            raise ParameterError(f"invalid hyperplane covariance: {check.reason}")
        if sigma.shape[0] != mu.size:
            raise ParameterError(
                f"mu has length {mu.size} but sigma is {sigma.shape[0]}x{sigma.shape[1]}"
            )
        if not self.extended:
            dev = float(np.max(np.abs(mu - mu_from_sigma(sigma))))
            if dev > EQ8_TOL:
                raise ParameterError(
                    f"mu deviates from the value implied by sigma by {dev:.3e}; "
                    "use extended=True for a decoupled location"
                )
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", 0.5 * (sigma + sigma.T))

    @property
    def d(self) -> int:
        return self.mu.size

    @classmethod
    def from_variogram(cls, gamma, tol_psd: float | None = None) -> "GaussianProfileLaw":
        """Law of the profile vector for the model with variogram ``gamma``."""
        sigma = gamma_to_sigma(gamma, tol_psd)
        return cls(mu=mu_from_sigma(sigma), sigma=sigma, extended=False, tol_psd=tol_psd)

    def variogram(self) -> np.ndarray:
        return sigma_to_gamma(self.sigma, self.tol_psd)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "mu": self.mu.tolist(),
            "sigma": self.sigma.tolist(),
            "extended": self.extended,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "GaussianProfileLaw":
        law = cls(
            mu=np.asarray(obj["mu"], dtype=float),
            sigma=np.asarray(obj["sigma"], dtype=float),
            extended=bool(obj.get("extended", False)),
        )
        if "d" in obj and int(obj["d"]) != law.d:
            raise ParameterError(f"declared d={obj['d']} but mu/sigma have d={law.d}")
        return law


def sample_gaussian_profile(law: GaussianProfileLaw, n: int, seed) -> np.ndarray:
    """Draw ``n`` profile vectors from ``law``; deterministic given ``seed``.

    Sampling is by symmetric eigendecomposition: eigenvalues below the PSD
    tolerance are clamped to zero and the corresponding directions (always
    including the diagonal) are excluded, so every draw lies in the
    hyperplane by construction.
    """
    if n < 0:
        raise ParameterError(f"n must be nonnegative, got {n}")
    if n == 0:
        return np.empty((0, law.d))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    evals, vecs = np.linalg.eigh(law.sigma)
    tol = max(psd_tolerance(law.sigma, law.tol_psd), np.finfo(float).eps)
    keep = evals > tol
    factor = vecs[:, keep] * np.sqrt(evals[keep])
    draws = rng.standard_normal((n, int(keep.sum()))) @ factor.T + law.mu
    sums = np.abs(draws.sum(axis=1))
    if sums.size and sums.max() > law.d * max(TOL_CENTER, 1e-9 * np.abs(draws).max()):
        raise NumericError("sampled vectors left the zero-sum hyperplane")
    return draws
