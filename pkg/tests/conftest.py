import numpy as np
import pytest

from tailprofiles import SamplerHandle, variogram_of_covariance

# Worked d=3 case: variogram of W = (0, N, 2M) with N, M independent
# standard normals, i.e. Cov(W) = diag(0, 1, 4).
GAMMA3 = np.array([[0.0, 1.0, 4.0], [1.0, 0.0, 5.0], [4.0, 5.0, 0.0]])
SIGMA3 = np.array([[5.0, 2.0, -7.0], [2.0, 8.0, -10.0], [-7.0, -10.0, 17.0]]) / 9.0
MU3 = np.array([5.0 / 18.0, 1.0 / 9.0, -7.0 / 18.0])

GAMMA2 = np.array([[0.0, 1.0], [1.0, 0.0]])


def random_valid_variogram(rng: np.random.Generator, d: int) -> np.ndarray:
    """Variogram of W = A g for a random factor A: valid by construction."""
    k = int(rng.integers(1, d + 1))
    a = rng.standard_normal((d, k))
    return variogram_of_covariance(a @ a.T)


def signed_exp_handle(rate: float, law: str = "signed-exp") -> SamplerHandle:
    """d=2 profile law (a, -a) with |a| ~ Exp(rate) and a random sign.

    Its max component |a| is Exp(rate) exactly, giving closed-form max laws
    for the generator/profile pair (rate 1 <-> rate 2).
    """

    def draw(n, rng):
        mag = -np.log1p(-rng.random(n)) / rate
        sign = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        a = mag * sign
        return np.column_stack([a, -a])

    return SamplerHandle.from_function(draw, d=2, kind="profile", law=law)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
