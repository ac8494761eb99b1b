"""Numerical transforms between the laws of max(T) and max(U).

Both laws live on [0, inf) and are carried on grids as tabulated CDFs or
densities. The CDF transforms are evaluated after exact integration by
parts, as Riemann-Stieltjes sums

    numerator(s) = F(0) + integral_0^s exp(-+t) dF(t),

with the exponential weight integrated exactly over each cell (equivalent
quadrature order to the composite trapezoid rule, O(step^2), but free of
the catastrophic cancellation the raw ``exp(s) F(s) - integral`` form
suffers at the right edge of the grid). Increments are nonnegative, so the
outputs are monotone by construction; an isotonic cleanup still runs and
its magnitude is reported as a quality diagnostic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateLawError, GridResolutionError, InvalidInputError

DEFAULT_STEP = 1e-3
DEFAULT_TAIL_TOL = 1e-8
# Tolerance on a tabulated density integrating to one.
DEFAULT_NORM_TOL = 1e-3
# Maximum tolerated isotonic correction of a transformed CDF.
CLEANUP_TOL = 1e-6
# Floor for E[exp(-max(T))] below which Eq. 6 is considered degenerate.
DENOMINATOR_FLOOR = 1e-12
# Share of the truncation remainder in E[exp(max(U))] that triggers a warning.
REMAINDER_WARN_SHARE = 0.01

T_TO_U = "TtoU"
U_TO_T = "UtoT"


def uniform_grid(s_max: float, step: float = DEFAULT_STEP) -> np.ndarray:
    """Uniform grid 0 = s_0 < ... < s_m = s_max with spacing ``step``."""
    if s_max <= 0 or step <= 0:
        raise InvalidInputError("s_max and step must be positive")
    m = int(round(s_max / step))
    if m < 1:
        raise InvalidInputError("grid must contain at least two points")
    return np.linspace(0.0, m * step, m + 1)


def _validate_grid(grid: np.ndarray) -> np.ndarray:
    grid = np.ascontiguousarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise InvalidInputError("grid must be a 1-D array with at least two points")
    if not np.all(np.isfinite(grid)):
        raise InvalidInputError("grid has non-finite entries")
    if grid[0] != 0.0:
        raise InvalidInputError(f"grid must start at 0, got {grid[0]}")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError("grid must be strictly increasing")
    return grid


@dataclass(frozen=True)
class TabulatedCDF:
    """A distribution function on [0, inf) tabulated on a grid.

    ``values[j]`` is F(grid[j]); mass beyond the last grid point must not
    exceed ``tail_mass_tol``. ``meta`` carries transform diagnostics.
    """

    grid: np.ndarray
    values: np.ndarray
    tail_mass_tol: float = DEFAULT_TAIL_TOL
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        grid = _validate_grid(self.grid)
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.shape != grid.shape:
            raise InvalidInputError(
                f"values shape {values.shape} does not match grid shape {grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("CDF values have non-finite entries")
        if values.min() < -1e-12 or values.max() > 1.0 + 1e-12:
            raise InvalidInputError("CDF values must lie in [0, 1]")
        if np.diff(values).min(initial=0.0) < -1e-12:
            raise InvalidInputError("CDF values must be nondecreasing")
        values = np.maximum.accumulate(np.clip(values, 0.0, 1.0))
        if 1.0 - values[-1] > self.tail_mass_tol:
            raise InvalidInputError(
                f"tail mass {1.0 - values[-1]:.3e} exceeds tail_mass_tol "
                f"{self.tail_mass_tol:.1e}; extend the grid"
            )
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @classmethod
    def from_function(
        cls,
        fn,
        s_max: float,
        step: float = DEFAULT_STEP,
        tail_mass_tol: float = DEFAULT_TAIL_TOL,
    ) -> "TabulatedCDF":
        grid = uniform_grid(s_max, step)
        return cls(grid=grid, values=np.asarray(fn(grid), dtype=float), tail_mass_tol=tail_mass_tol)

    @classmethod
    def from_samples(
        cls,
        samples,
        s_max: float | None = None,
        step: float = DEFAULT_STEP,
        tail_mass_tol: float = DEFAULT_TAIL_TOL,
    ) -> "TabulatedCDF":
        """Empirical CDF of nonnegative draws (e.g. per-draw maxima)."""
        x = np.sort(np.asarray(samples, dtype=float).ravel())
        if x.size == 0:
            raise InvalidInputError("cannot tabulate an empty sample")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("sample has non-finite entries")
        if x[0] < -1e-12:
            raise InvalidInputError("samples must be nonnegative")
        if s_max is None:
            s_max = max(float(np.ceil((x[-1] + step) / step)) * step, step)
        grid = uniform_grid(s_max, step)
        values = np.searchsorted(x, grid, side="right") / x.size
        return cls(grid=grid, values=values, tail_mass_tol=tail_mass_tol)


@dataclass(frozen=True)
class TabulatedDensity:
    """A probability density on [0, inf) tabulated on a grid."""

    grid: np.ndarray
    values: np.ndarray
    norm_tol: float = DEFAULT_NORM_TOL
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        grid = _validate_grid(self.grid)
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.shape != grid.shape:
            raise InvalidInputError(
                f"values shape {values.shape} does not match grid shape {grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("density values have non-finite entries")
        if values.min() < 0.0:
            raise InvalidInputError("density values must be nonnegative")
        total = float(np.trapezoid(values, grid))
        if abs(total - 1.0) > self.norm_tol:
            raise InvalidInputError(
                f"density integrates to {total:.6f}, outside 1 +- {self.norm_tol:.1e}"
            )
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


def _stieltjes_numerator(cdf: TabulatedCDF, sign: float) -> tuple[np.ndarray, float]:
    """Cumulative F(0) + integral_0^s exp(sign * t) dF(t) and the edge term.

    The edge term places the residual tail mass at the last grid point,
    extending the integral to infinity for the denominator.
    """
    t = cdf.grid
    f = cdf.values
    dt = np.diff(t)
    df = np.diff(f)
    # Exact cell integral of exp(sign*t) against a linear-in-cell F.
    if sign < 0:
        w = (np.exp(-t[:-1]) - np.exp(-t[1:])) / dt
    else:
        w = (np.exp(t[1:]) - np.exp(t[:-1])) / dt
    cumulative = np.empty_like(f)
    cumulative[0] = f[0]
    np.cumsum(w * df, out=cumulative[1:])
    cumulative[1:] += f[0]
    edge = (1.0 - f[-1]) * float(np.exp(sign * t[-1]))
    return cumulative, edge


def _finalize_cdf(
    raw: np.ndarray,
    grid: np.ndarray,
    tail_mass_tol: float,
    meta: dict,
) -> TabulatedCDF:
    """Clip to [0, 1], isotonically clean, and wrap as a TabulatedCDF.

    The cleanup magnitude goes into ``meta``; beyond :data:`CLEANUP_TOL` it
    signals an under-resolved grid.
    """
    clipped = np.clip(raw, 0.0, 1.0)
    iso = _kernels.pava_nondecreasing(np.ascontiguousarray(clipped))
    cleanup = float(np.max(np.abs(iso - clipped)))
    meta = dict(meta, cleanup_magnitude=cleanup)
    if cleanup > CLEANUP_TOL:
        raise GridResolutionError(
            f"transformed CDF violates monotonicity by {cleanup:.3e}; refine the grid"
        )
    tail = 1.0 - float(iso[-1])
    tol = max(tail_mass_tol, tail * (1.0 + 1e-12) + 1e-15)
    return TabulatedCDF(grid=grid, values=iso, tail_mass_tol=tol, meta=meta)


def maxU_cdf_from_maxT(f_t: TabulatedCDF) -> TabulatedCDF:
    """Law of max(U) from the law of max(T).

    Implements the damping transform: the numerator is
    ``integral_0^s F_T(t) e^{-t} dt + e^{-s} F_T(s)`` and the denominator
    is ``E[exp(-max(T))]``, evaluated in by-parts form.
    """
    cumulative, edge = _stieltjes_numerator(f_t, sign=-1.0)
    denom = float(cumulative[-1]) + edge
    if denom < DENOMINATOR_FLOOR:
        raise DegenerateLawError(
            f"E[exp(-max(T))] = {denom:.3e} is below the floor {DENOMINATOR_FLOOR:.1e}; "
            "the max(T) law is too heavy for this transform"
        )
    meta = {"denominator": denom, "direction": T_TO_U}
    return _finalize_cdf(cumulative / denom, f_t.grid, f_t.tail_mass_tol, meta)


def maxT_cdf_from_maxU(f_u: TabulatedCDF) -> TabulatedCDF:
    """Law of max(T) from the law of max(U) (inverse of :func:`maxU_cdf_from_maxT`).

    The numerator is ``e^{s} F_U(s) - integral_0^s F_U(t) e^{t} dt`` in
    by-parts form and the denominator is ``E[exp(max(U))]`` truncated at
    the end of the grid; the truncation remainder share is reported and a
    non-decaying integrand (diverging moment) is flagged.
    """
    cumulative, edge = _stieltjes_numerator(f_u, sign=1.0)
    denom = float(cumulative[-1]) + edge
    if denom < DENOMINATOR_FLOOR:
        raise DegenerateLawError("E[exp(max(U))] evaluated to zero; empty law")
    remainder_share = edge / denom
    divergent = _tail_divergent(cumulative, f_u.grid)
    if remainder_share > REMAINDER_WARN_SHARE or divergent:
        warnings.warn(
            f"E[exp(max(U))] truncation remainder carries {remainder_share:.2%} of the "
            f"total{' and the integrand is not decaying' if divergent else ''}; "
            "the moment may be infinite or the grid too short",
            RuntimeWarning,
            stacklevel=2,
        )
    meta = {
        "denominator": denom,
        "direction": U_TO_T,
        "remainder_share": remainder_share,
        "tail_divergent": divergent,
    }
    return _finalize_cdf(cumulative / denom, f_u.grid, f_u.tail_mass_tol, meta)


def _tail_divergent(cumulative: np.ndarray, grid: np.ndarray) -> bool:
    """Whether the increments of the moment integral stop decaying."""
    n = cumulative.size
    if n < 20:
        return False
    rate = np.diff(cumulative) / np.diff(grid)
    anchor = rate[int(0.9 * (n - 1)) - 1]
    last = rate[-1]
    return bool(last > 0.0 and last >= 0.9 * anchor and anchor > 0.0)


def expected_exp_neg_max(f_t: TabulatedCDF) -> float:
    """E[exp(-max(T))] from a tabulated CDF (by-parts quadrature)."""
    cumulative, edge = _stieltjes_numerator(f_t, sign=-1.0)
    return float(cumulative[-1]) + edge


def expected_exp_max(f_u: TabulatedCDF) -> tuple[float, float, bool]:
    """E[exp(max(U))] from a tabulated CDF.

    Returns (value, truncation remainder share, divergent flag).
    """
    cumulative, edge = _stieltjes_numerator(f_u, sign=1.0)
    value = float(cumulative[-1]) + edge
    share = edge / value if value > 0 else 0.0
    return value, share, _tail_divergent(cumulative, f_u.grid)


def density_transform(f_in: TabulatedDensity, direction: str) -> TabulatedDensity:
    """Exponentially tilt a max-law density between the T and U scales.

    ``TtoU`` multiplies by ``exp(-s)``, ``UtoT`` by ``exp(s)``; the result
    is renormalized by the trapezoid integral of the tilted values.
    """
    if direction not in (T_TO_U, U_TO_T):
        raise InvalidInputError(f"direction must be {T_TO_U!r} or {U_TO_T!r}, got {direction!r}")
    s = f_in.grid
    tilt = np.exp(-s) if direction == T_TO_U else np.exp(s)
    g = f_in.values * tilt
    z = float(np.trapezoid(g, s))
    if z < DENOMINATOR_FLOOR:
        raise DegenerateLawError(f"tilting constant {z:.3e} below floor; degenerate law")
    meta = {"direction": direction, "tilting_constant": z}
    if direction == U_TO_T:
        cell = 0.5 * (g[:-1] + g[1:]) * np.diff(s)
        last_share = float(cell[-1] / z)
        meta["last_cell_share"] = last_share
        if last_share > REMAINDER_WARN_SHARE:
            warnings.warn(
                f"last grid cell carries {last_share:.2%} of E[exp(max(U))]; "
                "the moment may be infinite or the grid too short",
                RuntimeWarning,
                stacklevel=2,
            )
    out = g / z
    total = float(np.trapezoid(out, s))
    if abs(total - 1.0) > f_in.norm_tol:
        raise GridResolutionError(
            f"transformed density integrates to {total:.6f}; refine the grid"
        )
    return TabulatedDensity(grid=s, values=out, norm_tol=f_in.norm_tol, meta=meta)


@dataclass(frozen=True)
class MomentIdentityReport:
    """Check of E[exp(-max(T))] * E[exp(max(U))] = 1 for an associated pair."""

    e_minus_max_t: float
    e_plus_max_u: float
    product: float
    passed: bool
    tol: float
    remainder_share: float
    tail_divergent: bool

    def to_dict(self) -> dict:
        return {
            "e_minus_maxT": self.e_minus_max_t,
            "e_plus_maxU": self.e_plus_max_u,
            "product": self.product,
            "pass": self.passed,
            "tol": self.tol,
            "remainder_share": self.remainder_share,
            "tail_divergent": self.tail_divergent,
        }


def check_moment_identity(
    f_t: TabulatedCDF,
    f_u: TabulatedCDF,
    tol_identity: float = 1e-3,
) -> MomentIdentityReport:
    """Verify the reciprocal-moment identity for a candidate (T, U) pair."""
    a = expected_exp_neg_max(f_t)
    b, share, divergent = expected_exp_max(f_u)
    product = a * b
    passed = bool(abs(product - 1.0) <= tol_identity and not divergent)
    return MomentIdentityReport(
        e_minus_max_t=a,
        e_plus_max_u=b,
        product=product,
        passed=passed,
        tol=tol_identity,
        remainder_share=share,
        tail_divergent=divergent,
    )
