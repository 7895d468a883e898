"""Layer forward/backward checks against hand arithmetic and finite differences."""

import numpy as np
import pytest

from teamclf.nn import conv2d, dense, maxpool2x2, relu
from teamclf.nn import ops

from helpers import central_diff, max_rel_err

RNG = np.random.default_rng(20240301)


class TestConv2d:
    def test_identity_kernel(self):
        x = RNG.random((1, 5, 7))
        w = np.zeros((1, 1, 3, 3))
        w[0, 0, 1, 1] = 1.0
        y, _ = conv2d(x, w, np.zeros(1))
        np.testing.assert_allclose(y[0], x[0, 1:-1, 1:-1])

    def test_constant_input_all_ones_kernel(self):
        c = 0.37
        x = np.full((1, 6, 6), c)
        w = np.ones((1, 1, 3, 3))
        y, _ = conv2d(x, w, np.zeros(1))
        np.testing.assert_allclose(y, np.full((1, 4, 4), 9 * c))

    def test_gradients_match_finite_differences(self):
        x = RNG.random((1, 6, 6))
        w = RNG.normal(size=(2, 1, 3, 3))
        b = RNG.normal(size=2)
        probe = RNG.normal(size=(2, 4, 4))

        y, backward = conv2d(x, w, b)
        dx, dw, db = backward(probe)

        def loss_x(xv):
            return float((conv2d(xv, w, b)[0] * probe).sum())

        def loss_w(wv):
            return float((conv2d(x, wv, b)[0] * probe).sum())

        def loss_b(bv):
            return float((conv2d(x, w, bv)[0] * probe).sum())

        assert max_rel_err(dx, central_diff(loss_x, x)) < 1e-4
        assert max_rel_err(dw, central_diff(loss_w, w)) < 1e-4
        assert max_rel_err(db, central_diff(loss_b, b)) < 1e-4

    def test_output_shape_shrinks_by_two(self):
        y, _ = conv2d(RNG.random((3, 10, 8)), RNG.normal(size=(4, 3, 3, 3)), np.zeros(4))
        assert y.shape == (4, 8, 6)

    def test_rejects_channel_mismatch(self):
        with pytest.raises(ValueError, match="incompatible"):
            conv2d(RNG.random((2, 5, 5)), RNG.normal(size=(4, 3, 3, 3)), np.zeros(4))

    def test_rejects_tiny_input(self):
        with pytest.raises(ValueError, match=">= 3"):
            conv2d(RNG.random((1, 2, 5)), RNG.normal(size=(1, 1, 3, 3)), np.zeros(1))


class TestMaxPool:
    def test_single_window(self):
        x = np.array([[[1.0, 2.0], [3.0, 4.0]]])
        y, backward = maxpool2x2(x)
        assert y.shape == (1, 1, 1)
        assert y[0, 0, 0] == 4.0
        dx = backward(np.ones((1, 1, 1)))
        np.testing.assert_allclose(dx, [[[0.0, 0.0], [0.0, 1.0]]])

    def test_tie_breaks_to_first_in_row_major_order(self):
        c = 2.5
        x = np.full((1, 2, 2), c)
        y, backward = maxpool2x2(x)
        assert y[0, 0, 0] == c
        dx = backward(np.ones((1, 1, 1)))
        np.testing.assert_allclose(dx, [[[1.0, 0.0], [0.0, 0.0]]])

    def test_gradient_matches_finite_differences_away_from_ties(self):
        x = RNG.random((1, 8, 8))
        probe = RNG.normal(size=(1, 4, 4))
        _, backward = maxpool2x2(x)
        dx = backward(probe)

        def loss(xv):
            return float((maxpool2x2(xv)[0] * probe).sum())

        assert max_rel_err(dx, central_diff(loss, x)) < 1e-4

    def test_rejects_odd_dims(self):
        with pytest.raises(ValueError, match="even"):
            maxpool2x2(RNG.random((1, 5, 4)))


class TestDense:
    def test_identity(self):
        x = RNG.random(4)
        y, _ = dense(x, np.eye(4), np.zeros(4))
        np.testing.assert_allclose(y, x)

    def test_hand_arithmetic(self):
        y, _ = dense(np.array([2.0, 3.0]), np.array([[1.0, 1.0]]), np.array([0.5]))
        np.testing.assert_allclose(y, [5.5])

    def test_gradients_match_finite_differences(self):
        x = RNG.random(16)
        w = RNG.normal(size=(8, 16))
        b = RNG.normal(size=8)
        probe = RNG.normal(size=8)
        _, backward = dense(x, w, b)
        dx, dw, db = backward(probe)

        assert max_rel_err(dx, central_diff(lambda v: float(dense(v, w, b)[0] @ probe), x)) < 1e-4
        assert max_rel_err(dw, central_diff(lambda v: float(dense(x, v, b)[0] @ probe), w)) < 1e-4
        assert max_rel_err(db, central_diff(lambda v: float(dense(x, w, v)[0] @ probe), b)) < 1e-4

    def test_rejects_dim_mismatch(self):
        with pytest.raises(ValueError, match="dense input dim"):
            dense(RNG.random(3), RNG.normal(size=(2, 4)), np.zeros(2))


class TestRelu:
    def test_basic(self):
        y, _ = relu(np.array([-1.0, 0.0, 2.0]))
        np.testing.assert_allclose(y, [0.0, 0.0, 2.0])

    def test_all_negative_gives_zero_output_and_gradient(self):
        x = -RNG.random((3, 4)) - 0.1
        y, backward = relu(x)
        assert np.all(y == 0.0)
        assert np.all(backward(np.ones_like(x)) == 0.0)

    def test_gradient_matches_finite_differences_away_from_zero(self):
        x = RNG.normal(size=20)
        x[np.abs(x) < 1e-2] += 0.05  # keep clear of the kink
        probe = RNG.normal(size=20)
        _, backward = relu(x)
        dx = backward(probe)
        assert max_rel_err(dx, central_diff(lambda v: float(relu(v)[0] @ probe), x)) < 1e-4


class TestPlumbingOps:
    def test_pad_replicate_roundtrip_gradient(self):
        x = RNG.random((2, 3, 4, 2))
        y, cache = ops.pad_replicate_forward(x, 1, 1)
        assert y.shape == (2, 4, 5, 2)
        np.testing.assert_allclose(y[:, 3, :4, :], x[:, 2, :, :])
        probe = RNG.normal(size=y.shape)
        dx = ops.pad_replicate_backward(cache, probe)

        def loss(xv):
            return float((ops.pad_replicate_forward(xv, 1, 1)[0] * probe).sum())

        assert max_rel_err(dx, central_diff(loss, x)) < 1e-4

    def test_upsample2x_exact_gradient(self):
        x = RNG.random((1, 3, 2, 4))
        y, cache = ops.upsample2x_forward(x)
        assert y.shape == (1, 6, 4, 4)
        np.testing.assert_allclose(y[0, 0, 0], y[0, 1, 1])
        probe = RNG.normal(size=y.shape)
        dx = ops.upsample2x_backward(cache, probe)

        def loss(xv):
            return float((ops.upsample2x_forward(xv)[0] * probe).sum())

        assert max_rel_err(dx, central_diff(loss, x)) < 1e-4


def test_forward_is_pure():
    x = RNG.random((2, 6, 6))
    w = RNG.normal(size=(3, 2, 3, 3))
    b = RNG.normal(size=3)
    y1, _ = conv2d(x, w, b)
    y2, _ = conv2d(x, w, b)
    assert np.array_equal(y1, y2)
