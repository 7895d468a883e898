"""Forward/backward primitives for the minimal CNN kernel.

Four layer kinds (3x3 valid convolution, 2x2 max pooling, dense, ReLU)
plus replication padding and nearest-neighbour upsampling as plumbing.
Every backward pass is hand-derived and exact for its forward map; the
test suite checks each one against central finite differences.

Two surfaces are exposed:

* batched kernels operating on NHWC arrays (fast path used by
  :mod:`teamclf.nn.network`), returning ``(output, cache)`` with a
  matching ``*_backward(cache, grad)`` function;
* single-sample wrappers (``conv2d``, ``maxpool2x2``, ``dense``,
  ``relu``) taking the conventional (C, H, W) layout and returning
  ``(output, backward)`` closures.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "conv_forward",
    "conv_backward",
    "maxpool_forward",
    "maxpool_backward",
    "dense_forward",
    "dense_backward",
    "relu_forward",
    "relu_backward",
    "pad_replicate_forward",
    "pad_replicate_backward",
    "upsample2x_forward",
    "upsample2x_backward",
    "conv2d",
    "maxpool2x2",
    "dense",
    "relu",
]


def _im2col3(x: np.ndarray) -> np.ndarray:
    """Gather 3x3 neighbourhoods of an NHWC batch into GEMM columns.

    Returns an array of shape (B, H-2, W-2, 9*C); the last axis is ordered
    (di, dj, channel) to match the weight matrix built by ``_wmat``.
    """
    b, h, w, c = x.shape
    hp, wp = h - 2, w - 2
    cols = np.empty((b, hp, wp, 9 * c), dtype=x.dtype)
    k = 0
    for di in range(3):
        for dj in range(3):
            cols[..., k * c:(k + 1) * c] = x[:, di:di + hp, dj:dj + wp, :]
            k += 1
    return cols


def _wmat(w: np.ndarray) -> np.ndarray:
    # (Cout, Cin, 3, 3) -> (9*Cin, Cout), rows ordered (di, dj, cin)
    return w.transpose(2, 3, 1, 0).reshape(-1, w.shape[0])


def conv_forward(x, w, b):
    """Valid 3x3 convolution on an NHWC batch.

    x: (B, H, W, Cin), w: (Cout, Cin, 3, 3), b: (Cout,).
    Returns ((B, H-2, W-2, Cout), cache).
    """
    bs, h, wd, cin = x.shape
    if h < 3 or wd < 3:
        raise ValueError(f"conv input spatial dims must be >= 3, got {h}x{wd}")
    if w.shape[1] != cin or w.shape[2:] != (3, 3):
        raise ValueError(
            f"conv weights {w.shape} incompatible with input channels {cin}"
        )
    if b.shape != (w.shape[0],):
        raise ValueError(f"conv bias {b.shape} does not match {w.shape[0]} filters")
    cols = _im2col3(x)
    cout = w.shape[0]
    y = cols.reshape(-1, 9 * cin) @ _wmat(w) + b
    return y.reshape(bs, h - 2, wd - 2, cout), (cols, x.shape, w)


def conv_backward(cache, dy):
    """Gradients of conv_forward: returns (dx, dw, db)."""
    cols, x_shape, w = cache
    bs, h, wd, cin = x_shape
    hp, wp = h - 2, wd - 2
    cout = w.shape[0]
    dy_mat = dy.reshape(-1, cout)
    dw_mat = cols.reshape(-1, 9 * cin).T @ dy_mat
    dw = dw_mat.reshape(3, 3, cin, cout).transpose(3, 2, 0, 1)
    db = dy_mat.sum(axis=0)
    dcols = (dy_mat @ _wmat(w).T).reshape(bs, hp, wp, 9 * cin)
    dx = np.zeros(x_shape, dtype=dy.dtype)
    k = 0
    for di in range(3):
        for dj in range(3):
            dx[:, di:di + hp, dj:dj + wp, :] += dcols[..., k * cin:(k + 1) * cin]
            k += 1
    return dx, dw, db


def pad_replicate_forward(x, add_h: int, add_w: int):
    """Replicate the bottom row / right column of an NHWC batch."""
    if add_h:
        x = np.concatenate([x, np.repeat(x[:, -1:, :, :], add_h, axis=1)], axis=1)
    if add_w:
        x = np.concatenate([x, np.repeat(x[:, :, -1:, :], add_w, axis=2)], axis=2)
    return x, (add_h, add_w)


def pad_replicate_backward(cache, dy):
    """Fold gradients of replicated rows/columns back onto the source edge."""
    add_h, add_w = cache
    if add_w:
        extra = dy[:, :, -add_w:, :].sum(axis=2)
        dy = dy[:, :, :-add_w, :].copy()
        dy[:, :, -1, :] += extra
    if add_h:
        extra = dy[:, -add_h:, :, :].sum(axis=1)
        dy = dy[:, :-add_h, :, :].copy()
        dy[:, -1, :, :] += extra
    return dy


def maxpool_forward(x):
    """2x2 max pooling (stride 2) on an NHWC batch with even spatial dims.

    Ties within a window resolve to the first element in row-major order.
    """
    b, h, w, c = x.shape
    if h % 2 or w % 2:
        raise ValueError(f"maxpool2x2 needs even spatial dims, got {h}x{w}")
    h2, w2 = h // 2, w // 2
    # (B, H2, W2, C, 4) with the window flattened row-major
    xr = x.reshape(b, h2, 2, w2, 2, c).transpose(0, 1, 3, 5, 2, 4).reshape(
        b, h2, w2, c, 4
    )
    arg = xr.argmax(axis=-1)
    y = np.take_along_axis(xr, arg[..., None], axis=-1)[..., 0]
    return y, (arg, x.shape)


def maxpool_backward(cache, dy):
    """Route pooled gradients to the argmax positions."""
    arg, x_shape = cache
    b, h, w, c = x_shape
    h2, w2 = h // 2, w // 2
    dxr = np.zeros((b, h2, w2, c, 4), dtype=dy.dtype)
    np.put_along_axis(dxr, arg[..., None], dy[..., None], axis=-1)
    return dxr.reshape(b, h2, w2, c, 2, 2).transpose(0, 1, 4, 2, 5, 3).reshape(
        b, h, w, c
    )


def dense_forward(x, w, b):
    """Affine map on a (B, Din) batch with weights (Dout, Din)."""
    if x.shape[1] != w.shape[1]:
        raise ValueError(f"dense input dim {x.shape[1]} != weight dim {w.shape[1]}")
    if b.shape != (w.shape[0],):
        raise ValueError(f"dense bias {b.shape} does not match {w.shape[0]} outputs")
    return x @ w.T + b, (x, w)


def dense_backward(cache, dy):
    x, w = cache
    return dy @ w, dy.T @ x, dy.sum(axis=0)


def relu_forward(x):
    # subgradient at 0 is defined as 0, hence the strict comparison
    mask = x > 0
    return x * mask, mask


def relu_backward(cache, dy):
    return dy * cache


def upsample2x_forward(x):
    """Nearest-neighbour 2x upsampling of an NHWC batch."""
    y = np.repeat(np.repeat(x, 2, axis=1), 2, axis=2)
    return y, x.shape


def upsample2x_backward(cache, dy):
    b, h, w, c = cache
    return dy.reshape(b, h, 2, w, 2, c).sum(axis=(2, 4))


# ---------------------------------------------------------------------------
# Single-sample (C, H, W) wrappers matching the documented op contracts.
# ---------------------------------------------------------------------------


def _chw_to_nhwc(x):
    return np.ascontiguousarray(x.transpose(1, 2, 0))[None]


def _nhwc_to_chw(x):
    return np.ascontiguousarray(x[0].transpose(2, 0, 1))


def conv2d(x, w, b):
    """Valid 3x3 convolution of one (Cin, H, W) sample.

    Returns ``(output, backward)`` where ``output`` is (Cout, H-2, W-2) and
    ``backward(d_output) -> (d_input, d_weights, d_bias)``.
    """
    if x.ndim != 3:
        raise ValueError(f"conv2d expects a (C, H, W) input, got shape {x.shape}")
    y, cache = conv_forward(_chw_to_nhwc(x), w, b)

    def backward(dy):
        dx, dw, db = conv_backward(cache, _chw_to_nhwc(dy))
        return _nhwc_to_chw(dx), dw, db

    return _nhwc_to_chw(y), backward


def maxpool2x2(x):
    """2x2 max pooling of one (C, H, W) sample with even H and W."""
    if x.ndim != 3:
        raise ValueError(f"maxpool2x2 expects a (C, H, W) input, got {x.shape}")
    y, cache = maxpool_forward(_chw_to_nhwc(x))

    def backward(dy):
        return _nhwc_to_chw(maxpool_backward(cache, _chw_to_nhwc(dy)))

    return _nhwc_to_chw(y), backward


def dense(x, w, b):
    """Affine map of one (Din,) vector with weights (Dout, Din)."""
    if x.ndim != 1:
        raise ValueError(f"dense expects a 1-d input, got shape {x.shape}")
    y, cache = dense_forward(x[None], w, b)

    def backward(dy):
        dx, dw, db = dense_backward(cache, dy[None])
        return dx[0], dw, db

    return y[0], backward


def relu(x):
    """Elementwise max(0, x) of any-shaped array."""
    y, mask = relu_forward(x)

    def backward(dy):
        return relu_backward(mask, dy)

    return y, backward
