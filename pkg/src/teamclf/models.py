"""Network architectures: shared conv trunk, embedding and referee heads.

The trunk is 3 blocks of (3x3 conv, ReLU, 2x2 max pool) with 16/32/64
channels. The embedding head is two dense layers ending in a 1024-d
feature vector; the referee head ends in 2 logits fed to a softmax.
"""

from __future__ import annotations

from .nn import LayerSpec, SequentialNet, spatial_output_shape

CROP_HW = (128, 62)  # canonical preprocessed crop size (H, W)
EMBEDDING_DIM = 1024
EMBEDDING_HIDDEN = 512
REFEREE_HIDDEN = 64
TRUNK_CHANNELS = (16, 32, 64)


def conv_trunk_specs(in_channels: int = 3) -> list[LayerSpec]:
    specs = []
    c_in = in_channels
    for c_out in TRUNK_CHANNELS:
        specs.append(LayerSpec("conv3x3", in_channels=c_in, out_channels=c_out))
        specs.append(LayerSpec("relu"))
        specs.append(LayerSpec("maxpool2x2"))
        c_in = c_out
    return specs


def flatten_dim(input_hw: tuple[int, int] = CROP_HW) -> int:
    trunk = conv_trunk_specs()
    h, w = spatial_output_shape(trunk, input_hw)
    return TRUNK_CHANNELS[-1] * h * w


def embedding_specs(
    input_hw: tuple[int, int] = CROP_HW,
    hidden: int = EMBEDDING_HIDDEN,
    output_dim: int = EMBEDDING_DIM,
) -> list[LayerSpec]:
    flat = flatten_dim(input_hw)
    return conv_trunk_specs() + [
        LayerSpec("dense", in_dim=flat, out_dim=hidden),
        LayerSpec("relu"),
        LayerSpec("dense", in_dim=hidden, out_dim=output_dim),
    ]


def referee_specs(
    input_hw: tuple[int, int] = CROP_HW, hidden: int = REFEREE_HIDDEN
) -> list[LayerSpec]:
    flat = flatten_dim(input_hw)
    return conv_trunk_specs() + [
        LayerSpec("dense", in_dim=flat, out_dim=hidden),
        LayerSpec("relu"),
        LayerSpec("dense", in_dim=hidden, out_dim=2),
    ]


def build_embedding_net(seed: int = 0, input_hw: tuple[int, int] = CROP_HW,
                        hidden: int = EMBEDDING_HIDDEN) -> SequentialNet:
    return SequentialNet(embedding_specs(input_hw, hidden=hidden), seed=seed)


def build_referee_net(seed: int = 0, input_hw: tuple[int, int] = CROP_HW) -> SequentialNet:
    return SequentialNet(referee_specs(input_hw), seed=seed)
