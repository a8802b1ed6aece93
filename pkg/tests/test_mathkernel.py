import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from tdcr_sim.errors import DegenerateRotationError, InvalidArgumentError, SingularSystemError
from tdcr_sim.mathkernel import hat, reorthonormalize, solve6, vee

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vec3 = arrays(np.float64, 3, elements=finite)


def rotation(axis, angle):
    """Rodrigues formula, written out independently of the package."""
    k = np.asarray(axis, float) / np.linalg.norm(axis)
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * K @ K


class TestHat:
    def test_zero(self):
        assert np.array_equal(hat(np.zeros(3)), np.zeros((3, 3)))

    def test_layout(self):
        assert np.array_equal(hat([1, 0, 0]), [[0, 0, 0], [0, 0, -1], [0, 1, 0]])

    @given(vec3, vec3)
    def test_matches_cross_product(self, a, b):
        scale = max(1.0, np.abs(a).max() * np.abs(b).max())
        np.testing.assert_allclose(hat(a) @ b, np.cross(a, b), atol=1e-15 * scale)

    @given(vec3)
    def test_skew(self, a):
        H = hat(a)
        assert np.array_equal(H, -H.T)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            hat([1.0, 2.0])


class TestVee:
    @pytest.mark.parametrize("a", [(1, 2, 3), (0, 0, 0), (-4, 0.5, 7)])
    def test_round_trip(self, a):
        assert np.array_equal(vee(hat(a)), np.asarray(a, float))

    @given(vec3)
    def test_round_trip_random(self, a):
        assert np.array_equal(vee(hat(a)), a)

    def test_rejects_non_skew(self):
        with pytest.raises(InvalidArgumentError):
            vee(np.eye(3))


class TestReorthonormalize:
    def test_identity(self):
        assert np.allclose(reorthonormalize(np.eye(3)), np.eye(3), atol=1e-15)

    def test_small_skew_perturbation(self):
        R0 = np.eye(3) + 1e-6 * hat([0.3, -0.7, 0.2])
        R = reorthonormalize(R0)
        assert np.linalg.norm(R - R0) <= 2e-6
        np.testing.assert_allclose(R.T @ R, np.eye(3), atol=1e-14)

    def test_scale_invariance(self):
        R = rotation([1, 2, 3], 0.9)
        np.testing.assert_allclose(reorthonormalize(1.001 * R), R, atol=1e-14)

    @settings(max_examples=50)
    @given(vec3.filter(lambda a: np.linalg.norm(a) > 1e-3), st.floats(-3, 3),
           arrays(np.float64, (3, 3), elements=st.floats(-1e-3, 1e-3)))
    def test_output_is_rotation(self, axis, angle, noise):
        R = reorthonormalize(rotation(axis, angle) + noise)
        np.testing.assert_allclose(R.T @ R, np.eye(3), atol=1e-12)
        assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("M", [np.zeros((3, 3)), np.diag([1.0, 1.0, -1.0]), np.full((3, 3), np.nan)])
    def test_degenerate(self, M):
        with pytest.raises(DegenerateRotationError):
            reorthonormalize(M)


class TestSolve6:
    def test_identity(self):
        b = np.arange(6.0)
        np.testing.assert_array_equal(solve6(np.eye(6), b), b)

    def test_block_diagonal(self):
        A = np.diag([2.0, 4.0, 8.0])
        B = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 5.0]])
        M = np.block([[A, np.zeros((3, 3))], [np.zeros((3, 3)), B]])
        b = np.array([2.0, 4.0, 8.0, 5.0, 1.0, 10.0])
        # B^-1 [5, 1, 10] = [5 - 2, 1, 2]
        np.testing.assert_allclose(solve6(M, b), [1, 1, 1, 3, 1, 2], rtol=1e-14)

    @settings(max_examples=50)
    @given(arrays(np.float64, (6, 6), elements=st.floats(-1, 1)), arrays(np.float64, 6, elements=st.floats(-1, 1)))
    def test_random_residual(self, P, b):
        M = 6 * np.eye(6) + P
        x = solve6(M, b)
        assert np.abs(M @ x - b).max() <= 1e-10

    def test_singular(self):
        M = np.eye(6)
        M[5, 5] = 0.0
        with pytest.raises(SingularSystemError):
            solve6(M, np.ones(6))

    def test_ill_conditioned(self):
        M = np.diag([1, 1, 1, 1, 1, 1e-14])
        with pytest.raises(SingularSystemError) as err:
            solve6(M, np.ones(6))
        assert err.value.condition > 1e12
