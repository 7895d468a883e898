"""Gradient-integrity harness: the checker itself and whole-network checks."""

import numpy as np

from teamclf.models import embedding_specs
from teamclf.nn import LayerSpec, SequentialNet, grad_check


def test_single_dense_layer_is_exact():
    net = SequentialNet([LayerSpec("dense", in_dim=6, out_dim=4)], seed=1)
    x = np.random.default_rng(2).normal(size=6)
    assert grad_check(net, x) < 1e-6


def test_dense_relu_stack():
    net = SequentialNet(
        [
            LayerSpec("dense", in_dim=8, out_dim=8),
            LayerSpec("relu"),
            LayerSpec("dense", in_dim=8, out_dim=3),
        ],
        seed=3,
    )
    x = np.random.default_rng(4).normal(size=8)
    assert grad_check(net, x) < 1e-5


def test_conv_pool_stack():
    net = SequentialNet(
        [
            LayerSpec("conv3x3", in_channels=2, out_channels=3),
            LayerSpec("relu"),
            LayerSpec("maxpool2x2"),
            LayerSpec("dense", in_dim=3 * 3 * 2, out_dim=5),
        ],
        seed=5,
    )
    x = np.random.default_rng(6).normal(size=(2, 8, 6))
    assert grad_check(net, x) < 1e-5


def test_full_embedding_architecture_at_reduced_input():
    net = SequentialNet(embedding_specs(input_hw=(16, 32)), seed=7)
    x = np.random.default_rng(8).normal(size=(3, 16, 32))
    assert grad_check(net, x, max_checked=600) < 1e-3


def test_checker_flags_corrupted_backward():
    class Corrupted(SequentialNet):
        def backward(self, caches, dout):
            dx, grads = super().backward(caches, dout)
            grads[0] = grads[0] * 1.05  # wrong by 5%
            return dx, grads

    net = Corrupted([LayerSpec("dense", in_dim=6, out_dim=4)], seed=9)
    x = np.random.default_rng(10).normal(size=6)
    assert grad_check(net, x) > 1e-2
