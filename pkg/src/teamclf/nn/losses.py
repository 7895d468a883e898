"""Loss functions with hand-derived gradients."""

from __future__ import annotations

import numpy as np

BCE_CLAMP_EPS = 1e-7


def triplet_loss(anchor, positive, negative, margin: float):
    """Squared-Euclidean triplet hinge for one triplet of equal-length vectors.

    loss = max(0, ||a-p||^2 - ||a-n||^2 + margin).

    Returns ``(loss, (d_anchor, d_positive, d_negative))``; all three
    gradients are zero when the hinge is inactive.
    """
    if not (anchor.shape == positive.shape == negative.shape):
        raise ValueError(
            f"triplet vectors must share a dimension, got {anchor.shape}, "
            f"{positive.shape}, {negative.shape}"
        )
    if margin <= 0:
        raise ValueError(f"margin must be positive, got {margin}")
    ap = anchor - positive
    an = anchor - negative
    z = float(ap @ ap - an @ an) + margin
    if z <= 0.0:
        zero = np.zeros_like(anchor)
        return 0.0, (zero, zero.copy(), zero.copy())
    return z, (2.0 * (negative - positive), -2.0 * ap, 2.0 * an)


def triplet_loss_batch(a, p, n, margin: float):
    """Vectorized triplet hinge over rows of (T, D) arrays.

    Returns ``(losses, (da, dp, dn))`` with per-triplet gradients.
    """
    ap = a - p
    an = a - n
    z = (ap * ap).sum(axis=1) - (an * an).sum(axis=1) + margin
    active = (z > 0.0).astype(a.dtype)[:, None]
    losses = np.maximum(z, 0.0)
    da = 2.0 * (n - p) * active
    dp = -2.0 * ap * active
    dn = 2.0 * an * active
    return losses, (da, dp, dn)


def bce_loss(prediction: float, target: float):
    """Binary cross entropy on a single probability.

    The prediction is clamped to [eps, 1-eps] first; the returned gradient
    is the gradient of the clamped function (zero inside the clamp region).
    """
    p = min(max(float(prediction), BCE_CLAMP_EPS), 1.0 - BCE_CLAMP_EPS)
    t = float(target)
    loss = -(t * np.log(p) + (1.0 - t) * np.log(1.0 - p))
    if prediction < BCE_CLAMP_EPS or prediction > 1.0 - BCE_CLAMP_EPS:
        grad = 0.0
    else:
        grad = (p - t) / (p * (1.0 - p))
    return float(loss), float(grad)


def bce_loss_batch(p, t):
    """Mean BCE over probability/target arrays; returns (loss, d_loss/d_p)."""
    pc = np.clip(p, BCE_CLAMP_EPS, 1.0 - BCE_CLAMP_EPS)
    loss = float(np.mean(-(t * np.log(pc) + (1.0 - t) * np.log(1.0 - pc))))
    inside = (p >= BCE_CLAMP_EPS) & (p <= 1.0 - BCE_CLAMP_EPS)
    grad = np.where(inside, (pc - t) / (pc * (1.0 - pc)), 0.0) / p.size
    return loss, grad
