import numpy as np
import pytest

from app.core.errors import NonIntegralOutputSize, ShapeMismatch, UsageError, ZeroNorm
from app.tensor import ops
from app.tensor.rng import check_seed, derive_rng, make_rng


def f32(values):
    return np.asarray(values, dtype=np.float32)


class TestL2Normalize:
    def test_three_four_five(self):
        np.testing.assert_allclose(ops.l2_normalize(f32([3, 4])), [0.6, 0.8], atol=1e-7)

    def test_unit_vector_unchanged(self):
        np.testing.assert_array_equal(ops.l2_normalize(f32([1, 0])), f32([1, 0]))

    def test_zero_vector(self):
        with pytest.raises(ZeroNorm):
            ops.l2_normalize(f32([0, 0]))

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            v = rng.normal(size=7).astype(np.float32)
            once = ops.l2_normalize(v)
            np.testing.assert_allclose(ops.l2_normalize(once), once, atol=1e-6)
            assert abs(np.linalg.norm(once.astype(np.float64)) - 1.0) <= 1e-6


class TestDense:
    def test_identity(self):
        out = ops.dense_forward(f32([1, 2]), f32([[1, 0], [0, 1]]), f32([0, 0]))
        np.testing.assert_array_equal(out, f32([1, 2]))
        assert out.dtype == np.float32

    def test_hand_arithmetic(self):
        out = ops.dense_forward(f32([1, 1]), f32([[1, 2], [3, 4]]), f32([10, 20]))
        np.testing.assert_array_equal(out, f32([13, 27]))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            ops.dense_forward(f32([1]), np.zeros((2, 3), dtype=np.float32), f32([0, 0]))

    def test_identity_is_exact_for_random_inputs(self):
        x = np.random.default_rng(1).normal(size=16).astype(np.float32)
        out = ops.dense_forward(x, np.eye(16, dtype=np.float32), np.zeros(16, dtype=np.float32))
        assert out.tobytes() == x.tobytes()


class TestConv2d:
    x = f32([[[1, 2], [3, 4]]])

    def test_scalar_kernel(self):
        out = ops.conv2d_forward(self.x, np.full((1, 1, 1, 1), 2, dtype=np.float32), f32([0]))
        np.testing.assert_array_equal(out, f32([[[2, 4], [6, 8]]]))

    def test_sum_kernel(self):
        out = ops.conv2d_forward(self.x, np.ones((1, 1, 2, 2), dtype=np.float32), f32([0]))
        np.testing.assert_array_equal(out, f32([[[10]]]))

    def test_kernel_larger_than_input(self):
        with pytest.raises(NonIntegralOutputSize):
            ops.conv2d_forward(self.x, np.ones((1, 1, 3, 3), dtype=np.float32), f32([0]))

    def test_unit_kernel_is_identity(self):
        x = np.random.default_rng(2).normal(size=(1, 5, 4)).astype(np.float32)
        out = ops.conv2d_forward(x, np.ones((1, 1, 1, 1), dtype=np.float32), f32([0]))
        assert out.tobytes() == x.tobytes()

    def test_stride_and_padding_shape(self):
        x = np.ones((2, 5, 5), dtype=np.float32)
        out = ops.conv2d_forward(x, np.ones((3, 2, 3, 3), dtype=np.float32), np.zeros(3, dtype=np.float32), stride=2, pad=1)
        assert out.shape == (3, 3, 3)
        # centre window sees the full 3x3 patch of both channels
        assert out[0, 1, 1] == 18.0


class TestHelpers:
    def test_relu(self):
        np.testing.assert_array_equal(ops.relu(f32([-1, 2])), f32([0, 2]))

    def test_batchnorm_identity_stats(self):
        out = ops.batchnorm_apply(f32([5]), f32([1]), f32([0]), f32([0]), f32([1]), eps=0.0)
        np.testing.assert_array_equal(out, f32([5]))

    def test_batchnorm_channel_mismatch(self):
        with pytest.raises(ShapeMismatch):
            ops.batchnorm_apply(f32([5, 6]), f32([1]), f32([0]), f32([0]), f32([1]))

    def test_global_avg_pool(self):
        np.testing.assert_array_equal(ops.global_avg_pool(f32([[[1, 2], [3, 4]]])), f32([2.5]))

    def test_flatten_row_major(self):
        np.testing.assert_array_equal(ops.flatten(f32([[[1, 2], [3, 4]]])), f32([1, 2, 3, 4]))


class TestRng:
    def test_same_seed_same_stream(self):
        assert np.array_equal(make_rng(5).integers(0, 1000, 20), make_rng(5).integers(0, 1000, 20))

    def test_derived_streams_are_independent_of_order(self):
        first = derive_rng(9, "noise").standard_normal(4)
        derive_rng(9, "centroids").standard_normal(100)
        assert np.array_equal(first, derive_rng(9, "noise").standard_normal(4))
        assert not np.array_equal(first, derive_rng(9, "other").standard_normal(4))

    @pytest.mark.parametrize("seed", [-1, -5, 2.5, "x"])
    def test_rejects_bad_seeds(self, seed):
        with pytest.raises(UsageError):
            check_seed(seed)
        with pytest.raises(UsageError):
            derive_rng(seed, "noise")

    def test_accepts_integral_seeds(self):
        assert check_seed(0) == 0
        assert check_seed(np.int64(7)) == 7
