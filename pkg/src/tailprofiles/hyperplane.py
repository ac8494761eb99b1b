"""Linear algebra on the hyperplane perpendicular to the diagonal.

Profile vectors live in ``{v : sum(v) = 0}``. Everything here is dense and
assumes modest dimension (d up to a few hundred): the centering projector
``P = I - 11'/d`` is applied functionally rather than materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

# Absolute tolerance for "components sum to zero", per unit dimension.
TOL_CENTER = 1e-12
# Relative eigenvalue tolerance for PSD / conditional-negative-definite checks,
# scaled by the largest matrix entry so large variograms are not rejected.
TOL_PSD_REL = 1e-10


@dataclass(frozen=True)
class Validation:
    """Outcome of a matrix validity check; falsy when invalid."""

    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    return m


def psd_tolerance(m: np.ndarray, tol_psd: float | None = None) -> float:
    """Scale-relative eigenvalue tolerance for the matrix ``m``."""
    if tol_psd is not None:
        return tol_psd
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    return TOL_PSD_REL * scale


def center(x) -> np.ndarray:
    """Project a vector onto the zero-sum hyperplane: ``x - mean(x) * 1``.

    Raises
    ------
    InvalidInputError
        If ``x`` is not a finite vector of length >= 2.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise InvalidInputError(f"expected a vector of length >= 2, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("input vector has non-finite entries")
    return x - x.mean()


def center_rows(x) -> np.ndarray:
    """Row-wise :func:`center` for an (n, d) sample matrix."""
    x = np.ascontiguousarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise InvalidInputError(f"expected an (n, d) matrix with d >= 2, got shape {x.shape}")
    from . import _kernels

    return _kernels.row_center(x)


def apply_projector(m) -> np.ndarray:
    """Apply the centering projector on both sides: ``P m P`` with ``P = I - 11'/d``.

    Computed as ``m`` minus its row/column means plus its grand mean, so the
    projector is never materialized.
    """
    m = _as_matrix(m)
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("input matrix has non-finite entries")
    col_means = m.mean(axis=0, keepdims=True)
    row_means = m.mean(axis=1, keepdims=True)
    return m - col_means - row_means + m.mean()


def is_profile_vector(x, tol_center: float = TOL_CENTER) -> bool:
    """Whether ``x`` is finite with components summing to zero (within d*tol)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        return False
    return abs(float(x.sum())) <= x.size * tol_center


def as_profile_vector(x, tol_center: float = TOL_CENTER) -> np.ndarray:
    """Validate and return a profile vector (zero component sum)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise InvalidInputError(f"expected a vector of length >= 2, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("profile vector has non-finite entries")
    s = float(x.sum())
    if abs(s) > x.size * tol_center:
        raise InvalidInputError(f"profile vector components sum to {s:.3e}, not zero")
    return x


def is_valid_variogram(gamma, tol_psd: float | None = None) -> Validation:
    """Check the variogram conditions; the diagnostic names the first failure.

    A valid variogram is symmetric with zero diagonal, nonnegative entries,
    and is conditionally negative definite on the zero-sum hyperplane
    (equivalently ``-P @ gamma @ P / 2`` is PSD).
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
        return Validation(False, f"not a square matrix (shape {gamma.shape})")
    if gamma.shape[0] < 2:
        return Validation(False, "dimension must be at least 2")
    if not np.all(np.isfinite(gamma)):
        return Validation(False, "non-finite entries")
    tol = psd_tolerance(gamma, tol_psd)
    if np.max(np.abs(gamma - gamma.T)) > tol:
        return Validation(False, "not symmetric")
    if np.max(np.abs(np.diag(gamma))) > tol:
        return Validation(False, "nonzero diagonal")
    if gamma.min() < -tol:
        return Validation(False, "negative entry")
    sigma = -0.5 * apply_projector(gamma)
    min_eig = float(np.linalg.eigvalsh(sigma)[0])
    if min_eig < -tol:
        return Validation(
            False,
            f"not conditionally negative definite (min eigenvalue {min_eig:.3e})",
        )
    return Validation(True)


def is_valid_hyperplane_covariance(sigma, tol_psd: float | None = None) -> Validation:
    """Check that ``sigma`` is symmetric PSD with zero row sums."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        return Validation(False, f"not a square matrix (shape {sigma.shape})")
    if sigma.shape[0] < 2:
        return Validation(False, "dimension must be at least 2")
    if not np.all(np.isfinite(sigma)):
        return Validation(False, "non-finite entries")
    tol = psd_tolerance(sigma, tol_psd)
    if np.max(np.abs(sigma - sigma.T)) > tol:
        return Validation(False, "not symmetric")
    row_sums = sigma.sum(axis=1)
    if np.max(np.abs(row_sums)) > max(tol * sigma.shape[0], TOL_CENTER):
        return Validation(False, "row sums not zero (sigma @ 1 != 0)")
    min_eig = float(np.linalg.eigvalsh(0.5 * (sigma + sigma.T))[0])
    if min_eig < -tol:
        return Validation(False, f"not positive semidefinite (min eigenvalue {min_eig:.3e})")
    return Validation(True)


def hyperplane_basis(d: int) -> np.ndarray:
    """Deterministic orthonormal basis of the zero-sum hyperplane.

    Returns a (d, d-1) matrix ``B`` with orthonormal columns, each summing
    to zero (Helmert construction), so ``B.T @ B = I`` and ``B.T @ 1 = 0``.
    """
    if d < 2:
        raise InvalidInputError("dimension must be at least 2")
    b = np.zeros((d, d - 1))
    for k in range(1, d):
        b[:k, k - 1] = 1.0
        b[k, k - 1] = -float(k)
        b[:, k - 1] /= np.sqrt(k * (k + 1.0))
    return b
