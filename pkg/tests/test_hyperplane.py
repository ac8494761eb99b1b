import numpy as np
import pytest

from tailprofiles import (
    InvalidInputError,
    apply_projector,
    as_profile_vector,
    center,
    center_rows,
    hyperplane_basis,
    is_valid_hyperplane_covariance,
    is_valid_variogram,
)
from tailprofiles.hyperplane import is_profile_vector

from conftest import GAMMA3, SIGMA3, random_valid_variogram


class TestCenter:
    def test_worked_examples(self):
        np.testing.assert_allclose(center([0.0, -2.0]), [1.0, -1.0])
        np.testing.assert_allclose(center([3.0, 1.0, -1.0]), [2.0, 0.0, -2.0])

    @pytest.mark.parametrize("c", [0.0, 1.0, -3.5, 1e6])
    def test_constant_vector_maps_to_zero(self, c):
        np.testing.assert_allclose(center(np.full(5, c)), np.zeros(5))

    def test_translation_invariance_along_diagonal(self, rng):
        x = rng.standard_normal(7)
        for c in (-2.0, 0.1, 5.0):
            np.testing.assert_allclose(center(x + c), center(x), atol=1e-12)

    def test_linearity(self, rng):
        x = rng.standard_normal(6)
        y = rng.standard_normal(6)
        np.testing.assert_allclose(
            center(2.5 * x - 0.7 * y), 2.5 * center(x) - 0.7 * center(y), atol=1e-12
        )

    def test_result_sums_to_zero(self, rng):
        for _ in range(20):
            d = int(rng.integers(2, 30))
            t = center(rng.standard_normal(d) * 10)
            assert abs(t.sum()) <= d * 1e-12

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidInputError):
            center([1.0, np.nan])
        with pytest.raises(InvalidInputError):
            center([np.inf, 0.0])

    def test_rejects_short_or_matrix_input(self):
        with pytest.raises(InvalidInputError):
            center([1.0])
        with pytest.raises(InvalidInputError):
            center(np.zeros((2, 2)))

    def test_center_rows_matches_center(self, rng):
        x = rng.standard_normal((50, 4))
        rows = center_rows(x)
        for i in range(50):
            np.testing.assert_allclose(rows[i], center(x[i]), atol=1e-12)


class TestApplyProjector:
    def test_identity_d2(self):
        np.testing.assert_allclose(
            apply_projector(np.eye(2)), 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]])
        )

    def test_annihilates_ones(self):
        for d in (2, 3, 7):
            np.testing.assert_allclose(apply_projector(np.ones((d, d))), np.zeros((d, d)), atol=1e-14)

    def test_worked_diag_case(self):
        got = apply_projector(np.diag([0.0, 1.0, 4.0]))
        np.testing.assert_allclose(got, SIGMA3, atol=1e-14)

    def test_matches_explicit_projector_product(self, rng):
        for _ in range(10):
            d = int(rng.integers(2, 9))
            m = rng.standard_normal((d, d)) * 3
            p = np.eye(d) - np.ones((d, d)) / d
            np.testing.assert_allclose(apply_projector(m), p @ m @ p, atol=1e-12)

    def test_idempotent(self, rng):
        m = rng.standard_normal((6, 6))
        once = apply_projector(m)
        np.testing.assert_allclose(apply_projector(once), once, atol=1e-12)

    def test_symmetric_input_gives_zero_row_sums(self, rng):
        a = rng.standard_normal((5, 5))
        m = a + a.T
        out = apply_projector(m)
        np.testing.assert_allclose(out @ np.ones(5), np.zeros(5), atol=1e-12)

    def test_rejects_nonsquare(self):
        with pytest.raises(InvalidInputError):
            apply_projector(np.zeros((2, 3)))

    def test_rejects_nonfinite(self):
        m = np.eye(3)
        m[0, 1] = np.nan
        with pytest.raises(InvalidInputError):
            apply_projector(m)


class TestVariogramValidity:
    def test_simple_valid(self):
        assert is_valid_variogram([[0.0, 1.0], [1.0, 0.0]])

    def test_negative_entry(self):
        check = is_valid_variogram([[0.0, -1.0], [-1.0, 0.0]])
        assert not check
        assert "negative" in check.reason

    def test_worked_d3_valid(self):
        assert is_valid_variogram(GAMMA3)

    def test_asymmetric_named(self):
        check = is_valid_variogram([[0.0, 1.0], [2.0, 0.0]])
        assert not check and "symmetric" in check.reason

    def test_nonzero_diagonal_named(self):
        check = is_valid_variogram([[1.0, 1.0], [1.0, 0.0]])
        assert not check and "diagonal" in check.reason

    def test_cnd_failure_named(self):
        # Gamma_12 too large relative to the other distances cannot come
        # from any Gaussian vector (triangle-like constraint fails).
        gamma = np.array([[0.0, 25.0, 1.0], [25.0, 0.0, 1.0], [1.0, 1.0, 0.0]])
        check = is_valid_variogram(gamma)
        assert not check and "negative definite" in check.reason

    def test_zero_matrix_is_valid(self):
        assert is_valid_variogram(np.zeros((3, 3)))

    def test_random_construction_always_valid(self, rng):
        for _ in range(50):
            d = int(rng.integers(2, 11))
            assert is_valid_variogram(random_valid_variogram(rng, d))

    def test_nonsquare_and_nonfinite(self):
        assert not is_valid_variogram(np.zeros((2, 3)))
        assert not is_valid_variogram([[0.0, np.nan], [np.nan, 0.0]])


class TestHyperplaneCovarianceValidity:
    def test_worked_sigma_valid(self):
        assert is_valid_hyperplane_covariance(SIGMA3)

    def test_nonzero_row_sums_rejected(self):
        check = is_valid_hyperplane_covariance(np.eye(3))
        assert not check and "row sums" in check.reason

    def test_negative_definite_rejected(self):
        p = np.eye(3) - np.ones((3, 3)) / 3
        check = is_valid_hyperplane_covariance(-p)
        assert not check and "semidefinite" in check.reason


class TestProfileVectors:
    def test_as_profile_vector_roundtrip(self, rng):
        t = center(rng.standard_normal(5))
        np.testing.assert_array_equal(as_profile_vector(t), t)

    def test_rejects_nonzero_sum(self):
        with pytest.raises(InvalidInputError):
            as_profile_vector([1.0, 1.0])

    def test_is_profile_vector(self):
        assert is_profile_vector([1.0, -1.0])
        assert not is_profile_vector([1.0, 0.0])
        assert not is_profile_vector([np.nan, 0.0])


class TestHyperplaneBasis:
    @pytest.mark.parametrize("d", [2, 3, 5, 11])
    def test_orthonormal_and_zero_sum(self, d):
        b = hyperplane_basis(d)
        np.testing.assert_allclose(b.T @ b, np.eye(d - 1), atol=1e-12)
        np.testing.assert_allclose(b.sum(axis=0), np.zeros(d - 1), atol=1e-12)

    def test_rejects_d1(self):
        with pytest.raises(InvalidInputError):
            hyperplane_basis(1)
