"""Finite-difference verification of the analytic backward passes."""

from __future__ import annotations

import numpy as np

from .network import SequentialNet

REL_ERR_FLOOR = 1e-8


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), REL_ERR_FLOOR)


def linear_head(output_shape, seed: int = 0):
    """A fixed random linear functional of the network output.

    Smooth everywhere, so the only non-smoothness probed is the network's own
    (ReLU / pooling), which the caller avoids by evaluating away from ties.
    """
    w = np.random.default_rng(seed).normal(size=output_shape)

    def head(out):
        return float((w * out).sum()), w.copy()

    return head


def grad_check(
    net: SequentialNet,
    x: np.ndarray,
    head=None,
    fd_step: float = 1e-4,
    max_checked: int = 2000,
    seed: int = 0,
) -> float:
    """Max relative error between analytic and central-difference gradients.

    ``x`` is a single sample, (C, H, W) or (D,). When the network has more
    than ``max_checked`` parameters a seeded subset is checked instead, with
    every parameter tensor represented proportionally (at least 8 entries
    each); below the budget the check is exhaustive.
    """
    xb = x[None].astype(np.float64)
    if head is None:
        out, _ = net.forward(xb)
        head = linear_head(out.shape, seed=seed)

    def loss_at() -> float:
        out, _ = net.forward(xb)
        return head(out)[0]

    out, caches = net.forward(xb, want_cache=True)
    _, dout = head(out)
    _, grads = net.backward(caches, dout)

    total = net.num_params
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p, g in zip(net.params, grads):
        flat_p = p.reshape(-1)
        flat_g = g.reshape(-1)
        if total <= max_checked:
            idx = np.arange(flat_p.size)
        else:
            quota = max(8, int(round(max_checked * flat_p.size / total)))
            quota = min(quota, flat_p.size)
            idx = rng.choice(flat_p.size, size=quota, replace=False)
        for j in idx:
            orig = flat_p[j]
            flat_p[j] = orig + fd_step
            up = loss_at()
            flat_p[j] = orig - fd_step
            down = loss_at()
            flat_p[j] = orig
            numeric = (up - down) / (2.0 * fd_step)
            worst = max(worst, relative_error(float(flat_g[j]), numeric))
    return worst
