"""Principal component analysis of profile random vectors.

The covariance of a profile law annihilates the diagonal, so its last
eigenpair is always (0, 1/sqrt(d)). The eigenproblem is therefore solved on
the zero-sum hyperplane (in an orthonormal Helmert basis) and the diagonal
eigenpair appended, which pins the null direction even for degenerate or
tied spectra.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, NumericError, ParameterError
from .husler_reiss import mu_from_sigma
from .hyperplane import (
    apply_projector,
    hyperplane_basis,
    is_valid_hyperplane_covariance,
    psd_tolerance,
)

SIGN_EPS = 1e-12


@dataclass(frozen=True)
class ProfileEigensystem:
    """Eigenstructure of a profile-law covariance.

    Eigenvalues are sorted descending with ``eigenvalues[-1]`` the diagonal
    direction's (essentially zero); eigenvector k is ``eigenvectors[:, k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source: str
    mean: np.ndarray | None = None
    samples: np.ndarray | None = field(default=None, repr=False)
    n_samples: int | None = None

    @property
    def d(self) -> int:
        return self.eigenvalues.size

    def to_dict(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.eigenvectors.tolist(),
            "source": self.source,
        }


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the first nonzero coordinate of each column positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        nz = np.flatnonzero(np.abs(col) > SIGN_EPS)
        if nz.size and col[nz[0]] < 0:
            out[:, k] = -col
    return out


def profile_pca(data, source: str | None = None) -> ProfileEigensystem:
    """Eigendecomposition of a hyperplane covariance or of profile samples.

    ``data`` is either a valid (d, d) hyperplane covariance (``source=
    "model"``) or an (n, d) matrix of profile vectors with n >= d
    (``source="sample"``; rows are centered by their sample mean and the
    projected sample covariance is decomposed). When ``source`` is omitted
    a symmetric square matrix that validates as a covariance is treated as
    the model case.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise InvalidInputError(f"expected a 2-D array, got shape {data.shape}")
    if source is None:
        is_cov = data.shape[0] == data.shape[1] and bool(
            is_valid_hyperplane_covariance(data)
        )
        source = "model" if is_cov else "sample"
    if source == "model":
        check = is_valid_hyperplane_covariance(data)
        if not check:
            raise ParameterError(f"invalid hyperplane covariance: {check.reason}")
        return _decompose(data, source="model", mean=None, samples=None, n_samples=None)
    if source != "sample":
        raise InvalidInputError(f"source must be 'model' or 'sample', got {source!r}")
    n, d = data.shape
    if n < d:
        raise InvalidInputError(f"need at least d={d} samples, got {n}")
    mean = data.mean(axis=0)
    centered = data - mean
    cov = centered.T @ centered / max(n - 1, 1)
    sigma = apply_projector(cov)
    evals = np.linalg.eigvalsh(sigma)
    sigma = _clamp_psd(sigma, evals)
    return _decompose(sigma, source="sample", mean=mean, samples=data, n_samples=n)


def _clamp_psd(sigma: np.ndarray, evals: np.ndarray) -> np.ndarray:
    if evals[0] >= 0:
        return sigma
    w, v = np.linalg.eigh(sigma)
    sigma = (v * np.maximum(w, 0.0)) @ v.T
    return 0.5 * (sigma + sigma.T)


def _decompose(sigma, source, mean, samples, n_samples) -> ProfileEigensystem:
    d = sigma.shape[0]
    basis = hyperplane_basis(d)
    reduced = basis.T @ sigma @ basis
    try:
        evals, w = np.linalg.eigh(0.5 * (reduced + reduced.T))
    except np.linalg.LinAlgError as err:  # pragma: no cover - LAPACK failure
        raise NumericError(f"eigendecomposition failed: {err}") from err
    order = np.argsort(evals)[::-1]
    evals = np.maximum(evals[order], 0.0)
    vectors = basis @ w[:, order]
    # Rayleigh quotient along 1/sqrt(d); completes the trace identity exactly.
    diag_val = max(float(sigma.sum()) / d, 0.0)
    eigenvalues = np.concatenate([evals, [diag_val]])
    eigenvectors = np.column_stack([vectors, np.full(d, 1.0 / np.sqrt(d))])
    return ProfileEigensystem(
        eigenvalues=eigenvalues,
        eigenvectors=_fix_signs(eigenvectors),
        source=source,
        mean=mean,
        samples=samples,
        n_samples=n_samples,
    )


@dataclass(frozen=True)
class TruncationResult:
    """Rank-p approximation of a profile law.

    ``mu_projected`` is the carried mean projected onto the kept subspace;
    ``mu_recomputed`` is the location a non-extended law would imply from
    the truncated covariance. Both are reported, along with the mean mass
    discarded by the projection.
    """

    sigma: np.ndarray
    rank: int
    projected_samples: np.ndarray | None = None
    mu_projected: np.ndarray | None = None
    mu_recomputed: np.ndarray | None = None
    discarded_mean_norm: float | None = None


def truncate_to_rank(eig: ProfileEigensystem, p: int) -> TruncationResult:
    """Keep the top ``p`` principal directions (p = 0 is complete dependence).

    Returns the truncated covariance; for sample-sourced eigensystems also
    the samples projected onto the kept subspace.
    """
    d = eig.d
    if not 0 <= p <= d - 1:
        raise ParameterError(f"rank must satisfy 0 <= p <= d - 1 = {d - 1}, got {p}")
    vp = eig.eigenvectors[:, :p]
    sigma_p = (vp * eig.eigenvalues[:p]) @ vp.T
    sigma_p = 0.5 * (sigma_p + sigma_p.T)
    projector = vp @ vp.T
    projected = None
    if eig.samples is not None:
        projected = eig.samples @ projector.T
    mu_projected = None
    mu_recomputed = mu_from_sigma(sigma_p)
    discarded = None
    if eig.mean is not None:
        mu_projected = projector @ eig.mean
        discarded = float(np.linalg.norm(eig.mean - mu_projected))
    return TruncationResult(
        sigma=sigma_p,
        rank=p,
        projected_samples=projected,
        mu_projected=mu_projected,
        mu_recomputed=mu_recomputed,
        discarded_mean_norm=discarded,
    )


def reconstruction_error(eig: ProfileEigensystem, p: int) -> float:
    """Expected squared distance to the rank-p projection.

    For a model eigensystem this is the sum of the discarded eigenvalues;
    for a sample eigensystem, the mean squared residual norm of the
    centered samples (the two agree up to Monte Carlo error).
    """
    d = eig.d
    if not 0 <= p <= d - 1:
        raise ParameterError(f"rank must satisfy 0 <= p <= d - 1 = {d - 1}, got {p}")
    if eig.samples is None:
        return float(eig.eigenvalues[p:].sum())
    centered = eig.samples - eig.samples.mean(axis=0)
    vp = eig.eigenvectors[:, :p]
    residual = centered - (centered @ vp) @ vp.T
    return float(np.mean(np.sum(residual * residual, axis=1)))
