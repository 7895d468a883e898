"""Minimal CNN kernel: exact hand-derived gradients, Adam, grad checking."""

from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import grad_check, relative_error
from .losses import bce_loss, bce_loss_batch, triplet_loss, triplet_loss_batch
from .network import LayerSpec, SequentialNet, spatial_output_shape
from .optim import AdamOptimizer, AdamState, adam_step
from .ops import conv2d, dense, maxpool2x2, relu

__all__ = [
    "AdamOptimizer",
    "AdamState",
    "LayerSpec",
    "SequentialNet",
    "adam_step",
    "bce_loss",
    "bce_loss_batch",
    "conv2d",
    "dense",
    "grad_check",
    "load_checkpoint",
    "maxpool2x2",
    "relative_error",
    "relu",
    "save_checkpoint",
    "spatial_output_shape",
    "triplet_loss",
    "triplet_loss_batch",
]
