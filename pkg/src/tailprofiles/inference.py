"""Diagonal peaks-over-threshold estimation.

Pipeline: rank-standardize margins to the exponential scale, keep rows
whose component mean exceeds a quantile threshold, center the surviving
rows, and fit a Gaussian profile law to the centered profiles by the
method of moments.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import DegenerateMarginError, InvalidInputError, SampleSizeError
from .husler_reiss import mu_from_sigma, sigma_to_gamma
from .hyperplane import apply_projector, center_rows, psd_tolerance


def validate_data_matrix(data, min_rows: int | None = None) -> np.ndarray:
    """Check an (n, d) observation matrix: finite, d >= 2, n > d."""
    data = np.ascontiguousarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] < 2:
        raise InvalidInputError(f"expected an (n, d) matrix with d >= 2, got shape {data.shape}")
    if not np.all(np.isfinite(data)):
        raise InvalidInputError("data matrix has non-finite entries")
    n, d = data.shape
    need = max(d + 1, min_rows or 0)
    if n < need:
        raise SampleSizeError(f"need at least {need} rows for d={d}, got {n}")
    return data


def standardize_margins(data) -> np.ndarray:
    """Rank-transform each column to the standard exponential scale.

    Column entry with average rank j among n observations maps to
    ``-log(1 - j / (n + 1))``. Monotone transforms of a column leave the
    output unchanged; ties get average ranks.

    Raises
    ------
    DegenerateMarginError
        If a column is constant.
    """
    data = validate_data_matrix(data)
    n, d = data.shape
    out = np.empty_like(data)
    for j in range(d):
        col = data[:, j]
        if np.ptp(col) == 0.0:
            raise DegenerateMarginError(f"column {j} is constant and cannot be standardized")
        u = rankdata(col, method="average") / (n + 1.0)
        out[:, j] = -np.log1p(-u)
    return out


@dataclass(frozen=True)
class ExceedanceSet:
    """Rows exceeding a diagonal threshold, with their centered profiles.

    ``exceedances`` holds ``x - r * 1`` for surviving rows (nonnegative row
    means); ``profiles`` are the same rows centered to the zero-sum
    hyperplane.
    """

    threshold: float
    exceedances: np.ndarray
    profiles: np.ndarray
    source_quantile: float

    @property
    def k(self) -> int:
        return self.exceedances.shape[0]

    @property
    def d(self) -> int:
        return self.exceedances.shape[1]


def extract_exceedances(data_exp, q: float) -> ExceedanceSet:
    """Threshold on the row mean at its empirical ``q``-quantile.

    ``data_exp`` must already be on the exponential scale (see
    :func:`standardize_margins`).

    Raises
    ------
    SampleSizeError
        If fewer than d + 1 rows exceed the threshold.
    """
    data = validate_data_matrix(data_exp)
    if not 0.0 < q < 1.0:
        raise InvalidInputError(f"quantile must be in (0, 1), got {q}")
    d = data.shape[1]
    means = data.mean(axis=1)
    r = float(np.quantile(means, q))
    mask = means >= r
    k = int(mask.sum())
    if k < d + 1:
        raise SampleSizeError(
            f"quantile {q} leaves only {k} exceedances; need at least {d + 1}"
        )
    exceedances = data[mask] - r
    return ExceedanceSet(
        threshold=r,
        exceedances=exceedances,
        profiles=center_rows(exceedances),
        source_quantile=q,
    )


@dataclass(frozen=True)
class HRFit:
    """Method-of-moments fit of a Gaussian profile law to exceedance profiles."""

    gamma_hat: np.ndarray
    sigma_hat: np.ndarray
    mu_hat: np.ndarray
    k: int
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "gamma_hat": self.gamma_hat.tolist(),
            "sigma_hat": self.sigma_hat.tolist(),
            "mu_hat": self.mu_hat.tolist(),
            "k": self.k,
            "diagnostics": self.diagnostics,
        }


def fit_hr(exc: ExceedanceSet, extended: bool = False) -> HRFit:
    """Estimate (gamma, sigma, mu) from exceedance profiles.

    ``sigma_hat`` is the projected sample covariance with small negative
    eigenvalues clamped to zero; ``gamma_hat`` is its variogram and
    ``mu_hat`` the profile sample mean. For a non-extended law the sup-norm
    gap between ``mu_hat`` and the location implied by ``sigma_hat`` is
    reported as a model check.
    """
    profiles = exc.profiles
    k, d = profiles.shape
    if k <= d:
        raise SampleSizeError(f"need more than d={d} exceedances to fit, got {k}")
    warnings_list: list[str] = []
    mu_hat = profiles.mean(axis=0)
    cov = np.cov(profiles, rowvar=False, ddof=1)
    sigma_raw = apply_projector(cov)
    tol = psd_tolerance(sigma_raw)
    evals, vecs = np.linalg.eigh(0.5 * (sigma_raw + sigma_raw.T))
    min_eig = float(evals[0])
    if min_eig < -tol:
        msg = (
            f"projected sample covariance has eigenvalue {min_eig:.3e} below "
            f"-{tol:.1e}; clamped to zero (data quality warning)"
        )
        warnings_list.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    evals = np.maximum(evals, 0.0)
    sigma_hat = (vecs * evals) @ vecs.T
    sigma_hat = 0.5 * (sigma_hat + sigma_hat.T)
    rank = int((evals > max(tol, np.finfo(float).eps)).sum())
    if rank < d - 1:
        msg = f"fitted covariance has rank {rank} < d - 1 = {d - 1}"
        warnings_list.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    diagnostics = {
        "rank": rank,
        "min_eigenvalue_before_clamp": min_eig,
        "warnings": warnings_list,
    }
    if not extended:
        diagnostics["eq8_discrepancy"] = float(
            np.max(np.abs(mu_hat - mu_from_sigma(sigma_hat)))
        )
    return HRFit(
        gamma_hat=sigma_to_gamma(sigma_hat),
        sigma_hat=sigma_hat,
        mu_hat=mu_hat,
        k=k,
        diagnostics=diagnostics,
    )


def threshold_stability(data_exp, q_list, extended: bool = False) -> list[dict]:
    """One diagonal-POT fit per quantile; a standard stability diagnostic.

    Returns one row per quantile, sorted by quantile, each with the
    threshold, exceedance count and fitted variogram; failures are recorded
    in-row and the run continues.
    """
    rows = []
    for q in sorted(float(q) for q in q_list):
        row: dict = {"q": q}
        try:
            exc = extract_exceedances(data_exp, q)
            fit = fit_hr(exc, extended=extended)
            row.update(
                r=exc.threshold,
                k=exc.k,
                gamma_hat=fit.gamma_hat,
                eq8_discrepancy=fit.diagnostics.get("eq8_discrepancy"),
                error=None,
            )
        except (InvalidInputError, SampleSizeError) as err:
            row.update(r=None, k=None, gamma_hat=None, eq8_discrepancy=None, error=str(err))
        rows.append(row)
    return rows
