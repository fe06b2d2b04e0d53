import numpy as np
import pytest

from recurrent_tda.frames import SignalFrame
from recurrent_tda.geometry import (
    Ellipsoid,
    GradientConfig,
    estimate_gradients,
    gradient_field,
    intersection_scale,
    overlap_kernel,
    pairwise_scale_matrix,
    shape_from_gradient,
)

from oracles import balls_overlap_scale, ellipsoids_overlap_2d, intervals_overlap_scale


def frame_from_values(values):
    values = np.asarray(values, dtype=float)
    return SignalFrame(np.arange(len(values), dtype=float), values)


def random_ellipsoid_2d(rng, ecc_max=10.0, center_scale=1.5):
    center = rng.uniform(-center_scale, center_scale, 2)
    angle = rng.uniform(0.0, np.pi)
    a = rng.uniform(0.3, 2.0)
    b = a / rng.uniform(1.0, ecc_max)
    rot = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    shape = rot @ np.diag([a * a, b * b]) @ rot.T
    shape = 0.5 * (shape + shape.T)
    return Ellipsoid(center, shape)


class TestGradients:
    def test_constant_signal_gives_zero(self):
        frame = frame_from_values(np.full((12, 2), 5.0))
        grads = estimate_gradients(frame, GradientConfig(window=3))
        assert np.all(grads == 0.0)

    def test_linear_ramp_interior(self):
        idx = np.arange(20, dtype=float)
        frame = frame_from_values(np.column_stack([idx, 2 * idx]))
        grads = estimate_gradients(frame, GradientConfig(window=3))
        for i in range(3, 17):
            np.testing.assert_allclose(grads[i], [4.0, 8.0])

    def test_ramp_boundary_rule_at_start(self):
        idx = np.arange(20, dtype=float)
        frame = frame_from_values(np.column_stack([idx, 2 * idx]))
        grads = estimate_gradients(frame, GradientConfig(window=3))
        # forward window mean minus the point itself
        np.testing.assert_allclose(grads[0], [2.0, 4.0])

    def test_ramp_boundary_rule_at_end(self):
        idx = np.arange(20, dtype=float)
        frame = frame_from_values(np.column_stack([idx]))
        grads = estimate_gradients(frame, GradientConfig(window=3))
        np.testing.assert_allclose(grads[-1], [2.0])

    def test_two_samples(self):
        grads = gradient_field(np.array([[0.0], [3.0]]), window=3)
        np.testing.assert_allclose(grads, [[3.0], [3.0]])

    def test_rejects_single_sample(self):
        with pytest.raises(ValueError):
            gradient_field(np.array([[1.0]]), window=3)


class TestShapeFromGradient:
    def test_axis_aligned(self):
        shape = shape_from_gradient(np.array([1.0, 0.0]), rho=3.0, tol=1e-12)
        np.testing.assert_allclose(shape, np.diag([9.0, 1.0]))

    def test_degenerate_gradient_falls_back_to_identity(self):
        shape = shape_from_gradient(np.array([0.0, 0.0]), rho=5.0, tol=1e-12)
        np.testing.assert_array_equal(shape, np.eye(2))

    def test_diagonal_gradient(self):
        shape = shape_from_gradient(np.array([1.0, 1.0]), rho=2.0, tol=1e-12)
        np.testing.assert_allclose(shape, [[2.5, 1.5], [1.5, 2.5]])

    def test_eigenvalues_are_rho_squared_and_ones(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            g = rng.normal(size=4)
            shape = shape_from_gradient(g, rho=3.0, tol=1e-12)
            eigs = np.sort(np.linalg.eigvalsh(shape))
            np.testing.assert_allclose(eigs, [1.0, 1.0, 1.0, 9.0], atol=1e-10)

    def test_rho_one_is_exactly_identity(self):
        shape = shape_from_gradient(np.array([0.3, -0.7]), rho=1.0, tol=1e-12)
        assert np.array_equal(shape, np.eye(2))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            shape_from_gradient(np.array([np.nan, 1.0]), rho=3.0, tol=1e-12)


class TestOverlapKernel:
    def test_tangent_unit_disks(self):
        e1 = Ellipsoid(np.zeros(2), np.eye(2))
        e2 = Ellipsoid(np.array([2.0, 0.0]), np.eye(2))
        assert overlap_kernel(e1, e2, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_overlapping_unit_disks(self):
        e1 = Ellipsoid(np.zeros(2), np.eye(2))
        e2 = Ellipsoid(np.array([1.0, 0.0]), np.eye(2))
        assert overlap_kernel(e1, e2, 0.5) == pytest.approx(0.75)

    def test_one_dimensional_tangency(self):
        e1 = Ellipsoid(np.array([0.0]), np.array([[1.0]]))
        e2 = Ellipsoid(np.array([3.0]), np.array([[4.0]]))
        assert overlap_kernel(e1, e2, 2.0 / 3.0) == pytest.approx(0.0, abs=1e-12)

    def test_rejects_s_outside_open_interval(self):
        e = Ellipsoid(np.zeros(2), np.eye(2))
        for s in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(ValueError):
                overlap_kernel(e, e, s)

    def test_convexity_on_random_pairs(self):
        rng = np.random.default_rng(11)
        grid = np.linspace(0.01, 0.99, 99)
        for _ in range(50):
            e1 = random_ellipsoid_2d(rng)
            e2 = random_ellipsoid_2d(rng)
            values = np.array([overlap_kernel(e1, e2, s) for s in grid])
            second_diff = values[:-2] - 2 * values[1:-1] + values[2:]
            assert second_diff.min() >= -1e-9


class TestIntersectionScale:
    def test_unit_shapes_give_half_distance(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            c1, c2 = rng.normal(size=(2, 3))
            e1 = Ellipsoid(c1, np.eye(3))
            e2 = Ellipsoid(c2, np.eye(3))
            expected = balls_overlap_scale(c1, c2)
            assert intersection_scale(e1, e2) == pytest.approx(expected, abs=1e-5)

    def test_coincident_centers_exact_zero(self):
        e1 = Ellipsoid(np.array([1.0, 2.0]), np.diag([4.0, 1.0]))
        e2 = Ellipsoid(np.array([1.0, 2.0]), np.eye(2))
        assert intersection_scale(e1, e2) == 0.0

    def test_one_dimensional_intervals(self):
        e1 = Ellipsoid(np.array([0.0]), np.array([[1.0]]))
        e2 = Ellipsoid(np.array([3.0]), np.array([[4.0]]))
        assert intersection_scale(e1, e2) == pytest.approx(1.0, abs=1e-6)
        a = intervals_overlap_scale(0.0, 1.0, 3.0, 2.0)
        assert a == pytest.approx(1.0)

    def test_symmetry(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            e1 = random_ellipsoid_2d(rng)
            e2 = random_ellipsoid_2d(rng)
            forward = intersection_scale(e1, e2)
            backward = intersection_scale(e2, e1)
            assert forward == pytest.approx(backward, abs=1e-6)

    def test_translation_invariance_is_exact(self):
        # quantized centers and a power-of-two shift keep the float
        # subtraction exact, so the scale depends on the difference alone
        rng = np.random.default_rng(9)
        shift = np.array([16.0, -8.0])
        for _ in range(20):
            e1 = random_ellipsoid_2d(rng)
            e2 = random_ellipsoid_2d(rng)
            q1 = Ellipsoid(np.round(e1.center * 1024) / 1024, e1.shape)
            q2 = Ellipsoid(np.round(e2.center * 1024) / 1024, e2.shape)
            moved1 = Ellipsoid(q1.center + shift, q1.shape)
            moved2 = Ellipsoid(q2.center + shift, q2.shape)
            assert intersection_scale(q1, q2) == intersection_scale(moved1, moved2)

    def test_homogeneity_power_of_two_exact(self):
        rng = np.random.default_rng(13)
        for factor in (0.5, 2.0, 4.0):
            for _ in range(10):
                e1 = random_ellipsoid_2d(rng)
                e2 = random_ellipsoid_2d(rng)
                scaled1 = Ellipsoid(e1.center * factor, e1.shape)
                scaled2 = Ellipsoid(e2.center * factor, e2.shape)
                assert intersection_scale(scaled1, scaled2) == factor * intersection_scale(e1, e2)

    def test_homogeneity_generic_factor(self):
        rng = np.random.default_rng(17)
        for _ in range(15):
            e1 = random_ellipsoid_2d(rng)
            e2 = random_ellipsoid_2d(rng)
            scaled1 = Ellipsoid(e1.center * 3.7, e1.shape)
            scaled2 = Ellipsoid(e2.center * 3.7, e2.shape)
            assert intersection_scale(scaled1, scaled2) == pytest.approx(
                3.7 * intersection_scale(e1, e2), rel=1e-9
            )

    def test_overlap_verdict_matches_boundary_oracle(self):
        rng = np.random.default_rng(21)
        checked = 0
        for _ in range(500):
            e1 = random_ellipsoid_2d(rng)
            e2 = random_ellipsoid_2d(rng)
            alpha = intersection_scale(e1, e2)
            if abs(alpha - 1.0) < 1e-3:
                continue
            overlap = ellipsoids_overlap_2d(e1.center, e1.shape, e2.center, e2.shape)
            assert overlap == (alpha <= 1.0)
            checked += 1
        assert checked > 400


class TestEllipsoidValidation:
    def test_asymmetric_shape_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            Ellipsoid(np.zeros(2), np.array([[1.0, 0.2], [0.1, 1.0]]))

    def test_indefinite_shape_rejected(self):
        with pytest.raises(ValueError, match="positive definite"):
            Ellipsoid(np.zeros(2), np.diag([1.0, -0.5]))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="dimension"):
            Ellipsoid(np.zeros(3), np.eye(2))

    def test_gradient_config_bounds(self):
        with pytest.raises(ValueError):
            GradientConfig(window=0)
        with pytest.raises(ValueError):
            GradientConfig(degenerate_tolerance=0.0)


class TestPairwiseScaleMatrix:
    def test_matches_scalar_calls(self):
        rng = np.random.default_rng(23)
        pts = rng.normal(size=(8, 2))
        shapes = np.stack([random_ellipsoid_2d(rng, center_scale=0).shape for _ in range(8)])
        matrix = pairwise_scale_matrix(pts, shapes)
        for i in range(8):
            for j in range(i + 1, 8):
                direct = intersection_scale(
                    Ellipsoid(pts[i], shapes[i]), Ellipsoid(pts[j], shapes[j])
                )
                assert matrix[i, j] == pytest.approx(direct, abs=1e-9)
                assert matrix[j, i] == matrix[i, j]
        assert np.all(np.diag(matrix) == 0.0)
