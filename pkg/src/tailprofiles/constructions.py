"""Stochastic representations linking tail samples and their summaries.

Three vector summaries of extremal dependence appear here:

* spectral vectors ``s`` with ``max(s) = 0``;
* generators ``t = s - mean(s) * 1`` on the zero-sum hyperplane;
* profile vectors ``u``, distributed as ``t`` conditioned on
  ``max(t) <= E`` for an independent unit exponential ``E``.

Tail samples are assembled as ``e * 1 + s`` (threshold on the max) or
``e * 1 + u`` (threshold on the component mean). Moving between the ``t``
and ``u`` laws uses rejection in one direction and exponential tilting of
the maximum (importance resampling with weights ``exp(max(u))``) in the
other.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .errors import InefficiencyError, InvalidInputError, NumericError
from .husler_reiss import GaussianProfileLaw, sample_gaussian_profile
from .hyperplane import TOL_CENTER, as_profile_vector

# A single tilting weight carrying more than this share of the total weight
# suggests exp(max(U)) has no finite mean (running-mean jump heuristic).
WEIGHT_SHARE_WARN = 0.01

SPECTRAL_MAX_TOL = 1e-12


def derive_seed(seed: int, index: int) -> int:
    """Deterministic per-chunk/per-worker seed: ``SeedSequence([seed, index])``."""
    ss = np.random.SeedSequence([int(seed), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def exponential_draws(rng: np.random.Generator, n: int) -> np.ndarray:
    """Unit exponential draws via inverse CDF (-log of uniform)."""
    return -np.log1p(-rng.random(n))


def spectral_from_profile(t) -> np.ndarray:
    """Map generator(s) to spectral scale: subtract the max, giving max = 0."""
    t = np.asarray(t, dtype=float)
    if t.ndim == 1:
        as_profile_vector(t)
        return t - t.max()
    return t - _kernels.row_max(np.ascontiguousarray(t))[:, None]


def profile_from_spectral(s) -> np.ndarray:
    """Map spectral vector(s) to the zero-sum hyperplane: subtract the mean."""
    s = np.asarray(s, dtype=float)
    if s.ndim == 1:
        if not np.all(np.isfinite(s)):
            raise InvalidInputError("spectral vector has non-finite entries")
        if abs(float(s.max())) > SPECTRAL_MAX_TOL:
            raise InvalidInputError(f"spectral vector max is {s.max():.3e}, not zero")
        return s - s.mean()
    return _kernels.row_center(np.ascontiguousarray(s))


@dataclass(frozen=True)
class SamplerHandle:
    """A seeded generator of i.i.d. draws from a stated vector law.

    ``kind`` is ``"profile"`` (zero-sum rows) or ``"spectral"`` (zero-max
    rows). ``sample(n, seed)`` is a pure function of the seed; passing a
    live ``numpy.random.Generator`` instead draws from that stream.
    """

    law: str
    kind: str
    d: int
    draw_fn: Callable[[int, np.random.Generator], np.ndarray] = field(repr=False)
    normalize: bool = False

    def __post_init__(self):
        if self.kind not in ("profile", "spectral"):
            raise InvalidInputError(f"unknown sampler kind {self.kind!r}")
        if self.d < 2:
            raise InvalidInputError("dimension must be at least 2")

    def sample(self, n: int, seed) -> np.ndarray:
        if n < 0:
            raise InvalidInputError(f"n must be nonnegative, got {n}")
        if n == 0:
            return np.empty((0, self.d))
        rng = _as_rng(seed)
        draws = np.ascontiguousarray(self.draw_fn(int(n), rng), dtype=float)
        if draws.shape != (n, self.d):
            raise NumericError(
                f"sampler {self.law!r} returned shape {draws.shape}, expected {(n, self.d)}"
            )
        if self.normalize:
            if self.kind == "profile":
                draws = _kernels.row_center(draws)
            else:
                draws = draws - _kernels.row_max(draws)[:, None]
        self._verify(draws)
        return draws

    def _verify(self, draws: np.ndarray) -> None:
        scale = max(1.0, float(np.abs(draws).max(initial=0.0)))
        if self.kind == "profile":
            worst = float(np.abs(draws.sum(axis=1)).max(initial=0.0))
            if worst > self.d * max(TOL_CENTER, 1e-9 * scale):
                raise NumericError(
                    f"profile draws from {self.law!r} have row sum up to {worst:.3e}"
                )
        else:
            worst = float(np.abs(_kernels.row_max(draws)).max(initial=0.0))
            if worst > max(SPECTRAL_MAX_TOL, 1e-12 * scale):
                raise NumericError(
                    f"spectral draws from {self.law!r} have row max up to {worst:.3e}"
                )

    @classmethod
    def degenerate(cls, values, kind: str = "profile") -> "SamplerHandle":
        """Point mass at a fixed vector (complete dependence when zero)."""
        values = np.asarray(values, dtype=float)
        if kind == "profile":
            values = as_profile_vector(values)
        else:
            values = np.atleast_1d(values)
            if abs(float(values.max())) > SPECTRAL_MAX_TOL:
                raise InvalidInputError("degenerate spectral vector must have max 0")

        def draw(n, rng):
            return np.tile(values, (n, 1))

        return cls(law="degenerate", kind=kind, d=values.size, draw_fn=draw)

    @classmethod
    def gaussian_profile(cls, law: GaussianProfileLaw) -> "SamplerHandle":
        """Profile draws from a Gaussian law on the hyperplane."""

        def draw(n, rng):
            return sample_gaussian_profile(law, n, rng)

        return cls(law="gaussian_profile", kind="profile", d=law.d, draw_fn=draw)

    @classmethod
    def empirical(cls, rows, kind: str = "profile") -> "SamplerHandle":
        """Resample rows of a fixed sample (rows are normalized to the kind)."""
        rows = np.ascontiguousarray(rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 2:
            raise InvalidInputError(f"expected an (m, d) sample, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise InvalidInputError("empirical sample has non-finite entries")
        if kind == "profile":
            rows = _kernels.row_center(rows)
        else:
            rows = rows - _kernels.row_max(rows)[:, None]
        m = rows.shape[0]

        def draw(n, rng):
            return rows[rng.integers(0, m, size=n)]

        return cls(law="empirical", kind=kind, d=rows.shape[1], draw_fn=draw)

    @classmethod
    def from_function(cls, fn, d: int, kind: str = "profile", law: str = "custom") -> "SamplerHandle":
        """Wrap ``fn(n, rng) -> (n, d)``; draws are projected onto the kind's support."""
        return cls(law=law, kind=kind, d=d, draw_fn=fn, normalize=True)

    @classmethod
    def tilted_spectral_from_profile(cls, u_handle: "SamplerHandle", oversample: int = 8) -> "SamplerHandle":
        """Spectral-law sampler derived from a profile law.

        Draws ``oversample * n`` profile vectors, importance-resamples them
        with weights ``exp(max(u))`` to the generator law, then shifts to
        zero max.
        """
        if u_handle.kind != "profile":
            raise InvalidInputError("tilting requires a profile-law sampler")
        if oversample < 1:
            raise InvalidInputError("oversample must be >= 1")

        def draw(n, rng):
            u = u_handle.sample(oversample * n, rng)
            idx = _tilt_resample_indices(u, n, rng)
            t = u[idx]
            return t - _kernels.row_max(np.ascontiguousarray(t))[:, None]

        return cls(
            law=f"tilted({u_handle.law})",
            kind="spectral",
            d=u_handle.d,
            draw_fn=draw,
        )


def _check_weight_stability(weights_sum: float, weights_max: float, n: int, context: str) -> None:
    if n >= 1000 and weights_sum > 0 and weights_max / weights_sum > WEIGHT_SHARE_WARN:
        share = weights_max / weights_sum
        warnings.warn(
            f"{context}: largest exp(max) weight carries {share:.1%} of the total over "
            f"{n} draws; E[exp(max(U))] may be infinite and results unstable",
            RuntimeWarning,
            stacklevel=3,
        )


def _tilt_resample_indices(u: np.ndarray, m: int, rng: np.random.Generator) -> np.ndarray:
    w = np.exp(_kernels.row_max(np.ascontiguousarray(u)))
    total = float(w.sum())
    _check_weight_stability(total, float(w.max()), u.shape[0], "tilting")
    cum = np.cumsum(w)
    cum /= cum[-1]
    return np.searchsorted(cum, rng.random(m), side="left")


def sample_Z(s_sampler: SamplerHandle, n: int, seed) -> np.ndarray:
    """Max-thresholded tail samples ``z = e * 1 + s``; ``max(z) = e >= 0``."""
    if s_sampler.kind != "spectral":
        raise InvalidInputError("sample_Z requires a spectral-law sampler")
    rng = _as_rng(seed)
    s = s_sampler.sample(n, rng)
    e = exponential_draws(rng, n)
    return s + e[:, None]


def sample_X_from_U(u_sampler: SamplerHandle, n: int, seed) -> np.ndarray:
    """Exact tail model ``x = e * 1 + u``: the profile law of its tail is the U-law.

    The component mean of each row equals its exponential draw, so
    thresholding on the row mean at any level r >= 0 leaves the centered
    rows distributed exactly as U.
    """
    if u_sampler.kind != "profile":
        raise InvalidInputError("sample_X_from_U requires a profile-law sampler")
    rng = _as_rng(seed)
    u = u_sampler.sample(n, rng)
    w = np.exp(_kernels.row_max(u))
    _check_weight_stability(float(w.sum()), float(w.max()), n, "sample_X_from_U")
    e = exponential_draws(rng, n)
    return u + e[:, None]


def sample_Zstar_from_U(u_sampler: SamplerHandle, n: int, seed) -> np.ndarray:
    """Mean-thresholded tail samples ``z* = e * 1 + u``; component sums are >= 0."""
    if u_sampler.kind != "profile":
        raise InvalidInputError("sample_Zstar_from_U requires a profile-law sampler")
    return sample_X_from_U(u_sampler, n, seed)


@dataclass(frozen=True)
class RejectionResult:
    """Accepted profile draws plus the observed acceptance rate.

    ``acceptance_rate`` estimates ``E[exp(-max(T))]``; its standard error
    treats attempts as Bernoulli trials.
    """

    samples: np.ndarray
    acceptance_rate: float
    attempts: int
    accepted: int

    @property
    def acceptance_se(self) -> float:
        p = self.acceptance_rate
        return float(np.sqrt(p * (1.0 - p) / self.attempts))


def sample_U_from_T(
    t_sampler: SamplerHandle,
    n: int,
    seed,
    acceptance_floor: float = 1e-6,
    draw_budget: int = 10**9,
    initial_batch: int = 8192,
    max_batch: int = 4_000_000,
) -> RejectionResult:
    """Rejection sampler for the profile law: accept ``t`` when ``max(t) <= e``.

    Draws (t, e) pairs in batches from a single deterministic stream and
    keeps the first ``n`` accepted. Raises :class:`InefficiencyError` if the
    draw budget is exhausted first; when the observed acceptance is below
    ``acceptance_floor`` the message points at the tilting sampler
    (:func:`sample_T_from_U`) instead.
    """
    if t_sampler.kind != "profile":
        raise InvalidInputError("sample_U_from_T requires a profile-law (generator) sampler")
    if n < 1:
        raise InvalidInputError(f"n must be positive, got {n}")
    rng = _as_rng(seed)
    pieces = []
    accepted = 0
    attempts = 0
    batch = max(int(initial_batch), 1)
    while accepted < n and attempts < draw_budget:
        batch = min(batch, draw_budget - attempts)
        t = t_sampler.sample(batch, rng)
        e = exponential_draws(rng, batch)
        mask = _kernels.row_max(t) <= e
        hits = int(mask.sum())
        if hits:
            pieces.append(t[mask])
        accepted += hits
        attempts += batch
        if accepted < n:
            rate_guess = max(accepted, 1) / attempts
            deficit = n - accepted
            batch = int(np.clip(1.25 * deficit / rate_guess, initial_batch, max_batch))
    rate = accepted / attempts
    if accepted < n:
        advice = (
            " acceptance is below the floor; use the tilting sampler "
            "sample_T_from_U on profile draws instead"
            if rate < acceptance_floor
            else ""
        )
        raise InefficiencyError(
            f"rejection sampler accepted {accepted}/{n} after {attempts} attempts "
            f"(rate {rate:.3e}, floor {acceptance_floor:.1e});{advice}"
        )
    samples = np.concatenate(pieces, axis=0)[:n]
    return RejectionResult(samples=samples, acceptance_rate=rate, attempts=attempts, accepted=accepted)


@dataclass(frozen=True)
class TiltingResult:
    """Importance-resampled generator draws with weight diagnostics.

    ``mean_weight`` estimates ``E[exp(max(U))]`` (the reciprocal of the
    rejection sampler's acceptance rate); ``ess`` is the sum of weights
    divided by the largest weight.
    """

    samples: np.ndarray
    ess: float
    mean_weight: float
    mean_weight_se: float
    max_weight_share: float


def sample_T_from_U(u_samples, m: int, seed) -> TiltingResult:
    """Generator draws via sampling-importance-resampling of profile draws.

    Resamples ``m`` rows of ``u_samples`` with probabilities proportional to
    ``exp(max(u))``.
    """
    u = np.ascontiguousarray(u_samples, dtype=float)
    if u.ndim != 2 or u.shape[0] < 1:
        raise InvalidInputError(f"expected a nonempty (n, d) sample, got shape {u.shape}")
    if m < 0:
        raise InvalidInputError(f"m must be nonnegative, got {m}")
    rng = _as_rng(seed)
    w = np.exp(_kernels.row_max(u))
    total = float(w.sum())
    wmax = float(w.max())
    _check_weight_stability(total, wmax, u.shape[0], "sample_T_from_U")
    cum = np.cumsum(w)
    cum /= cum[-1]
    idx = np.searchsorted(cum, rng.random(m), side="left")
    n = u.shape[0]
    mean_w = total / n
    se = float(w.std(ddof=1) / np.sqrt(n)) if n > 1 else float("nan")
    return TiltingResult(
        samples=u[idx],
        ess=total / wmax,
        mean_weight=mean_w,
        mean_weight_se=se,
        max_weight_share=wmax / total,
    )


@dataclass(frozen=True)
class GevExponentResult:
    """Monte Carlo estimate of the exponent function V and of G = exp(-V)."""

    v: float
    se: float
    n_draws: int

    @property
    def g(self) -> float:
        return float(np.exp(-self.v))


def gev_exponent(
    sampler: SamplerHandle,
    x,
    n: int,
    seed,
    chunk_size: int = 1_000_000,
) -> GevExponentResult:
    """Estimate ``V(x) = E[exp(max(S - x))]`` by Monte Carlo.

    With a spectral sampler the draws are used directly. With a profile
    sampler each draw ``u`` is mapped to the spectral scale and reweighted
    by ``exp(max(u))`` (normalized), estimating the same quantity from the
    profile law. Chunks come from one sequential stream, so the result does
    not depend on ``chunk_size``.
    """
    x = np.ascontiguousarray(x, dtype=float)
    if x.ndim != 1 or x.size != sampler.d:
        raise InvalidInputError(f"x must be a length-{sampler.d} vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("x has non-finite entries")
    if n < 1:
        raise InvalidInputError(f"n must be positive, got {n}")
    rng = _as_rng(seed)
    if sampler.kind == "spectral":
        tot_n = 0.0
        sy = 0.0
        sy2 = 0.0
        remaining = n
        while remaining > 0:
            k = min(chunk_size, remaining)
            s = sampler.sample(k, rng)
            cn, cy, cy2 = _kernels.spectral_exp_max_moments(s, x)
            tot_n += cn
            sy += cy
            sy2 += cy2
            remaining -= k
        v = sy / tot_n
        var = max(sy2 / tot_n - v * v, 0.0)
        se = float(np.sqrt(var / tot_n))
        return GevExponentResult(v=float(v), se=se, n_draws=n)
    sw = swy = sw2 = sw2y = sw2y2 = 0.0
    wmax = 0.0
    remaining = n
    while remaining > 0:
        k = min(chunk_size, remaining)
        u = sampler.sample(k, rng)
        cw, cwy, cw2, cw2y, cw2y2, cwmax = _kernels.profile_exp_max_moments(u, x)
        sw += cw
        swy += cwy
        sw2 += cw2
        sw2y += cw2y
        sw2y2 += cw2y2
        wmax = max(wmax, cwmax)
        remaining -= k
    _check_weight_stability(sw, wmax, n, "gev_exponent")
    v = swy / sw
    var = max(sw2y2 - 2.0 * v * sw2y + v * v * sw2, 0.0)
    se = float(np.sqrt(var) / sw)
    return GevExponentResult(v=float(v), se=se, n_draws=n)
