"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The active implementation is chosen once, at import time:

* default: numba ``@njit`` kernels (compiled and cached on first call);
* ``TAILPROFILES_NO_NUMBA=1`` in the environment, or numba missing:
  pure numpy/Python implementations with identical semantics.

Both paths are deterministic given the same inputs. Reductions may differ
across paths in the last few ulps (numpy uses pairwise summation for long
axes); ``benchmarks/bench_kernels.py`` measures and cross-checks the two.
"""

from __future__ import annotations

import os

import numpy as np

ENV_FLAG = "TAILPROFILES_NO_NUMBA"


def _numba_disabled() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes"}


# ---------------------------------------------------------------------------
# numpy implementations (always available; the reference semantics)
# ---------------------------------------------------------------------------

def _row_center_np(x: np.ndarray) -> np.ndarray:
    """Subtract the row mean from each row of a 2-D array."""
    return x - x.mean(axis=1, keepdims=True)


def _row_max_np(x: np.ndarray) -> np.ndarray:
    """Maximum of each row of a 2-D array."""
    return x.max(axis=1)


def _spectral_exp_max_moments_np(s: np.ndarray, shift: np.ndarray):
    """Accumulate sums of y = exp(max(s_i - shift)) over rows.

    Returns (n, sum y, sum y^2).
    """
    y = np.exp((s - shift).max(axis=1))
    return float(s.shape[0]), float(y.sum()), float((y * y).sum())

def _profile_exp_max_moments_np(u: np.ndarray, shift: np.ndarray):
    """Tilted accumulation for profile draws.

    Per row: m = max(u_i), weight w = e^m, y = exp(max(u_i - m - shift)).
    Returns (sum w, sum w*y, sum w^2, sum w^2*y, sum w^2*y^2, max w).
    """
    m = u.max(axis=1)
    w = np.exp(m)
    y = np.exp((u - m[:, None] - shift).max(axis=1))
    wy = w * y
    w2 = w * w
    return (
        float(w.sum()),
        float(wy.sum()),
        float(w2.sum()),
        float((w2 * y).sum()),
        float((wy * wy).sum()),
        float(w.max()),
    )


def _pava_nondecreasing_np(y: np.ndarray) -> np.ndarray:
    """L2 isotonic (nondecreasing) projection, pool-adjacent-violators."""
    n = y.shape[0]
    vals = np.empty(n)
    cnts = np.empty(n, dtype=np.int64)
    k = -1
    for i in range(n):
        k += 1
        vals[k] = y[i]
        cnts[k] = 1
        while k > 0 and vals[k - 1] > vals[k]:
            tot = cnts[k - 1] + cnts[k]
            vals[k - 1] = (cnts[k - 1] * vals[k - 1] + cnts[k] * vals[k]) / tot
            cnts[k - 1] = tot
            k -= 1
    out = np.empty(n)
    pos = 0
    for b in range(k + 1):
        out[pos : pos + cnts[b]] = vals[b]
        pos += cnts[b]
    return out


NUMPY_IMPLS = {
    "row_center": _row_center_np,
    "row_max": _row_max_np,
    "spectral_exp_max_moments": _spectral_exp_max_moments_np,
    "profile_exp_max_moments": _profile_exp_max_moments_np,
    "pava_nondecreasing": _pava_nondecreasing_np,
}


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

NUMBA_IMPLS = None

try:
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _HAVE_NUMBA = False

if _HAVE_NUMBA:

    @_njit(cache=True)
    def _row_center_nb(x):
        n, d = x.shape
        out = np.empty((n, d))
        for i in range(n):
            m = 0.0
            for j in range(d):
                m += x[i, j]
            m /= d
            for j in range(d):
                out[i, j] = x[i, j] - m
        return out

    @_njit(cache=True)
    def _row_max_nb(x):
        n, d = x.shape
        out = np.empty(n)
        for i in range(n):
            m = x[i, 0]
            for j in range(1, d):
                if x[i, j] > m:
                    m = x[i, j]
            out[i] = m
        return out

    @_njit(cache=True)
    def _spectral_exp_max_moments_nb(s, shift):
        n, d = s.shape
        sy = 0.0
        sy2 = 0.0
        for i in range(n):
            m = s[i, 0] - shift[0]
            for j in range(1, d):
                v = s[i, j] - shift[j]
                if v > m:
                    m = v
            y = np.exp(m)
            sy += y
            sy2 += y * y
        return float(n), sy, sy2

    @_njit(cache=True)
    def _profile_exp_max_moments_nb(u, shift):
        n, d = u.shape
        sw = 0.0
        swy = 0.0
        sw2 = 0.0
        sw2y = 0.0
        sw2y2 = 0.0
        wmax = 0.0
        for i in range(n):
            m = u[i, 0]
            for j in range(1, d):
                if u[i, j] > m:
                    m = u[i, j]
            w = np.exp(m)
            ymax = u[i, 0] - m - shift[0]
            for j in range(1, d):
                v = u[i, j] - m - shift[j]
                if v > ymax:
                    ymax = v
            y = np.exp(ymax)
            sw += w
            swy += w * y
            sw2 += w * w
            sw2y += w * w * y
            sw2y2 += w * y * w * y
            if w > wmax:
                wmax = w
        return sw, swy, sw2, sw2y, sw2y2, wmax

    @_njit(cache=True)
    def _pava_nondecreasing_nb(y):
        n = y.shape[0]
        vals = np.empty(n)
        cnts = np.empty(n, dtype=np.int64)
        k = -1
        for i in range(n):
            k += 1
            vals[k] = y[i]
            cnts[k] = 1
            while k > 0 and vals[k - 1] > vals[k]:
                tot = cnts[k - 1] + cnts[k]
                vals[k - 1] = (cnts[k - 1] * vals[k - 1] + cnts[k] * vals[k]) / tot
                cnts[k - 1] = tot
                k -= 1
        out = np.empty(n)
        pos = 0
        for b in range(k + 1):
            for _ in range(cnts[b]):
                out[pos] = vals[b]
                pos += 1
        return out

    NUMBA_IMPLS = {
        "row_center": _row_center_nb,
        "row_max": _row_max_nb,
        "spectral_exp_max_moments": _spectral_exp_max_moments_nb,
        "profile_exp_max_moments": _profile_exp_max_moments_nb,
        "pava_nondecreasing": _pava_nondecreasing_nb,
    }


USING_NUMBA = _HAVE_NUMBA and not _numba_disabled()

_ACTIVE = NUMBA_IMPLS if USING_NUMBA else NUMPY_IMPLS

row_center = _ACTIVE["row_center"]
row_max = _ACTIVE["row_max"]
spectral_exp_max_moments = _ACTIVE["spectral_exp_max_moments"]
profile_exp_max_moments = _ACTIVE["profile_exp_max_moments"]
pava_nondecreasing = _ACTIVE["pava_nondecreasing"]


def using_numba() -> bool:
    """Whether the numba fast path is active in this process."""
    return USING_NUMBA
