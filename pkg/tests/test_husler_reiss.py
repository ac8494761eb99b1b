import json

import numpy as np
import pytest

from tailprofiles import (
    GaussianProfileLaw,
    NumericError,
    ParameterError,
    apply_projector,
    gamma_to_sigma,
    mu_from_sigma,
    sample_gaussian_profile,
    sigma_to_gamma,
    variogram_of_covariance,
)

from conftest import GAMMA2, GAMMA3, MU3, SIGMA3, random_valid_variogram


class TestGammaToSigma:
    @pytest.mark.parametrize("g", [0.5, 1.0, 4.0])
    def test_d2_closed_form(self, g):
        gamma = np.array([[0.0, g], [g, 0.0]])
        expect = (g / 4.0) * np.array([[1.0, -1.0], [-1.0, 1.0]])
        np.testing.assert_allclose(gamma_to_sigma(gamma), expect, atol=1e-14)

    @pytest.mark.parametrize("g", [1.0, 3.0])
    def test_d3_exchangeable_closed_form(self, g):
        gamma = g * (np.ones((3, 3)) - np.eye(3))
        expect = (g / 2.0) * (np.eye(3) - np.ones((3, 3)) / 3.0)
        np.testing.assert_allclose(gamma_to_sigma(gamma), expect, atol=1e-14)

    def test_worked_d3_matches_generating_covariance(self):
        # Oracle: sigma equals P C P for the generating covariance C.
        sigma = gamma_to_sigma(GAMMA3)
        np.testing.assert_allclose(sigma, SIGMA3, atol=1e-14)
        np.testing.assert_allclose(sigma, apply_projector(np.diag([0.0, 1.0, 4.0])), atol=1e-14)

    def test_output_annihilates_ones_and_is_psd(self, rng):
        for _ in range(20):
            d = int(rng.integers(2, 9))
            sigma = gamma_to_sigma(random_valid_variogram(rng, d))
            np.testing.assert_allclose(sigma @ np.ones(d), np.zeros(d), atol=1e-10)
            assert np.linalg.eigvalsh(sigma)[0] >= -1e-10 * max(np.abs(sigma).max(), 1.0)

    def test_invalid_variogram_names_condition(self):
        with pytest.raises(ParameterError, match="negative entry"):
            gamma_to_sigma([[0.0, -1.0], [-1.0, 0.0]])


class TestSigmaToGamma:
    def test_d2_inverse(self):
        sigma = 0.25 * np.array([[1.0, -1.0], [-1.0, 1.0]])
        np.testing.assert_allclose(sigma_to_gamma(sigma), GAMMA2, atol=1e-14)

    def test_zero_matrix_complete_dependence(self):
        np.testing.assert_allclose(sigma_to_gamma(np.zeros((4, 4))), np.zeros((4, 4)))

    def test_worked_d3(self):
        np.testing.assert_allclose(sigma_to_gamma(SIGMA3), GAMMA3, atol=1e-13)

    def test_round_trip_random_variograms(self, rng):
        for _ in range(60):
            d = int(rng.integers(2, 11))
            gamma = random_valid_variogram(rng, d)
            np.testing.assert_allclose(sigma_to_gamma(gamma_to_sigma(gamma)), gamma, atol=1e-12)

    def test_variogram_invariant_under_centering(self, rng):
        # The variogram of W equals the variogram of W centered diagonally.
        a = rng.standard_normal((5, 3))
        cov = a @ a.T
        np.testing.assert_allclose(
            variogram_of_covariance(cov), sigma_to_gamma(apply_projector(cov)), atol=1e-12
        )

    def test_invalid_sigma_rejected(self):
        with pytest.raises(ParameterError, match="row sums"):
            sigma_to_gamma(np.eye(3))


class TestMuFromSigma:
    def test_equal_diagonal_gives_zero(self):
        sigma = 0.25 * np.array([[1.0, -1.0], [-1.0, 1.0]])
        np.testing.assert_allclose(mu_from_sigma(sigma), np.zeros(2))

    def test_worked_d3(self):
        np.testing.assert_allclose(mu_from_sigma(SIGMA3), MU3, atol=1e-14)

    def test_always_sums_to_zero(self, rng):
        for _ in range(20):
            d = int(rng.integers(2, 9))
            mu = mu_from_sigma(gamma_to_sigma(random_valid_variogram(rng, d)))
            assert abs(mu.sum()) <= d * 1e-12


class TestGaussianProfileLaw:
    def test_from_variogram_worked(self):
        law = GaussianProfileLaw.from_variogram(GAMMA3)
        np.testing.assert_allclose(law.sigma, SIGMA3, atol=1e-14)
        np.testing.assert_allclose(law.mu, MU3, atol=1e-14)
        assert law.d == 3 and not law.extended

    def test_strict_law_rejects_decoupled_mu(self):
        with pytest.raises(ParameterError, match="extended"):
            GaussianProfileLaw(mu=np.array([0.5, -0.5, 0.0]), sigma=SIGMA3)

    def test_extended_law_allows_decoupled_mu(self):
        law = GaussianProfileLaw(mu=np.array([0.5, -0.5, 0.0]), sigma=SIGMA3, extended=True)
        assert law.extended

    def test_mu_must_sum_to_zero(self):
        with pytest.raises(Exception, match="sum"):
            GaussianProfileLaw(mu=np.array([1.0, 0.0, 0.0]), sigma=SIGMA3, extended=True)

    def test_dict_round_trip(self):
        law = GaussianProfileLaw.from_variogram(GAMMA3)
        clone = GaussianProfileLaw.from_dict(json.loads(json.dumps(law.to_dict())))
        np.testing.assert_allclose(clone.sigma, law.sigma)
        np.testing.assert_allclose(clone.mu, law.mu)
        assert clone.extended == law.extended

    def test_dict_dimension_mismatch(self):
        obj = GaussianProfileLaw.from_variogram(GAMMA2).to_dict()
        obj["d"] = 5
        with pytest.raises(ParameterError, match="declared"):
            GaussianProfileLaw.from_dict(obj)

    def test_variogram_round_trip(self):
        law = GaussianProfileLaw.from_variogram(GAMMA3)
        np.testing.assert_allclose(law.variogram(), GAMMA3, atol=1e-12)


class TestSampleGaussianProfile:
    def test_degenerate_law_returns_zero_vectors(self):
        law = GaussianProfileLaw(mu=np.zeros(3), sigma=np.zeros((3, 3)))
        draws = sample_gaussian_profile(law, 7, 0)
        np.testing.assert_array_equal(draws, np.zeros((7, 3)))

    def test_deterministic_given_seed(self):
        law = GaussianProfileLaw.from_variogram(GAMMA2)
        a = sample_gaussian_profile(law, 10, 123)
        b = sample_gaussian_profile(law, 10, 123)
        np.testing.assert_array_equal(a, b)
        c = sample_gaussian_profile(law, 10, 124)
        assert not np.array_equal(a, c)

    def test_draws_lie_in_hyperplane(self):
        law = GaussianProfileLaw.from_variogram(GAMMA3)
        draws = sample_gaussian_profile(law, 1000, 5)
        assert np.abs(draws.sum(axis=1)).max() < 1e-10

    def test_monte_carlo_moments_match_law(self):
        law = GaussianProfileLaw.from_variogram(GAMMA2)
        n = 100_000
        draws = sample_gaussian_profile(law, n, 42)
        cov = np.cov(draws, rowvar=False)
        se_var = 0.25 * np.sqrt(2.0 / (n - 1))
        assert abs(cov[0, 0] - 0.25) < 3 * se_var
        se_mean = np.sqrt(0.25 / n)
        assert np.abs(draws.mean(axis=0) - law.mu).max() < 3 * se_mean

    def test_rank_deficient_law_sampling(self):
        # Rank-1 covariance on the hyperplane: all variation along one axis.
        v = np.array([1.0, 0.0, -1.0]) / np.sqrt(2.0)
        sigma = 2.0 * np.outer(v, v)
        law = GaussianProfileLaw(mu=mu_from_sigma(sigma), sigma=sigma)
        draws = sample_gaussian_profile(law, 5000, 9)
        centered = draws - draws.mean(axis=0)
        resid = centered - np.outer(centered @ v, v)
        assert np.abs(resid).max() < 1e-10
        assert abs(np.var(centered @ v) - 2.0) < 0.1

    def test_n_zero_gives_empty(self):
        law = GaussianProfileLaw.from_variogram(GAMMA2)
        assert sample_gaussian_profile(law, 0, 1).shape == (0, 2)

    def test_negative_n_rejected(self):
        law = GaussianProfileLaw.from_variogram(GAMMA2)
        with pytest.raises((ParameterError, NumericError)):
            sample_gaussian_profile(law, -1, 1)
