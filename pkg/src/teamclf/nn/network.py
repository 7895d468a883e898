"""Sequential network built from the four supported layer kinds.

Layers run on NHWC batches internally. Odd spatial dimensions are
replication-padded (bottom row / right column) before pooling, and the
transition from spatial maps to dense layers flattens automatically;
both bookkeeping steps have exact backward passes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ops

LAYER_KINDS = ("conv3x3", "maxpool2x2", "dense", "relu")


@dataclass
class LayerSpec:
    """One layer of the network.

    conv3x3 uses in_channels/out_channels; dense uses in_dim/out_dim;
    maxpool2x2 and relu take no sizes.
    """

    kind: str
    in_channels: int = 0
    out_channels: int = 0
    in_dim: int = 0
    out_dim: int = 0

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}")
        if self.kind == "conv3x3" and (self.in_channels <= 0 or self.out_channels <= 0):
            raise ValueError("conv3x3 needs positive channel counts")
        if self.kind == "dense" and (self.in_dim <= 0 or self.out_dim <= 0):
            raise ValueError("dense needs positive dimensions")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "in_channels": self.in_channels,
            "out_channels": self.out_channels,
            "in_dim": self.in_dim,
            "out_dim": self.out_dim,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LayerSpec":
        return cls(**d)


def _he_uniform(rng, fan_in: int, shape, dtype):
    lim = np.sqrt(6.0 / fan_in)
    return rng.uniform(-lim, lim, size=shape).astype(dtype, copy=False)


class SequentialNet:
    """Feed-forward network over a LayerSpec sequence.

    Parameters are float64 by default (gradient checks and training run at
    64-bit). ``params`` is a flat list of arrays ordered (w, b) per
    parameterized layer; ``backward`` returns gradients in that order.
    """

    def __init__(self, specs, seed: int = 0, dtype=np.float64):
        self.specs = list(specs)
        self.dtype = np.dtype(dtype)
        self.params: list[np.ndarray] = []
        # layer index -> index of its weight array in self.params, or None
        self._param_slot: list[int | None] = []
        rng = np.random.default_rng(seed)
        for spec in self.specs:
            if spec.kind == "conv3x3":
                w = _he_uniform(
                    rng,
                    spec.in_channels * 9,
                    (spec.out_channels, spec.in_channels, 3, 3),
                    self.dtype,
                )
                b = np.zeros(spec.out_channels, dtype=self.dtype)
            elif spec.kind == "dense":
                w = _he_uniform(rng, spec.in_dim, (spec.out_dim, spec.in_dim), self.dtype)
                b = np.zeros(spec.out_dim, dtype=self.dtype)
            else:
                self._param_slot.append(None)
                continue
            self._param_slot.append(len(self.params))
            self.params.append(w)
            self.params.append(b)

    @property
    def num_params(self) -> int:
        return int(sum(p.size for p in self.params))

    @property
    def output_dim(self) -> int:
        for spec in reversed(self.specs):
            if spec.kind == "dense":
                return spec.out_dim
            if spec.kind == "conv3x3":
                raise ValueError("network does not end in a dense layer")
        raise ValueError("network has no sized layers")

    def forward(self, x: np.ndarray, want_cache: bool = False):
        """Run a (B, C, H, W) or (B, D) batch; returns (out, caches).

        ``caches`` is None unless ``want_cache``; pass it to ``backward``.
        """
        if x.ndim == 4:
            h = np.ascontiguousarray(x.transpose(0, 2, 3, 1), dtype=self.dtype)
        else:
            h = np.ascontiguousarray(x, dtype=self.dtype)
        caches = [] if want_cache else None
        for i, spec in enumerate(self.specs):
            slot = self._param_slot[i]
            if spec.kind == "conv3x3":
                h, cache = ops.conv_forward(h, self.params[slot], self.params[slot + 1])
            elif spec.kind == "maxpool2x2":
                pad = (h.shape[1] % 2, h.shape[2] % 2)
                if pad != (0, 0):
                    h, pad_cache = ops.pad_replicate_forward(h, *pad)
                else:
                    pad_cache = (0, 0)
                h, pool_cache = ops.maxpool_forward(h)
                cache = (pad_cache, pool_cache)
            elif spec.kind == "relu":
                h, cache = ops.relu_forward(h)
            else:  # dense
                if h.ndim == 4:
                    flat_shape = h.shape
                    h = h.reshape(h.shape[0], -1)
                else:
                    flat_shape = None
                if h.shape[1] != spec.in_dim:
                    raise ValueError(
                        f"dense layer {i} expects {spec.in_dim} inputs, got "
                        f"{h.shape[1]}"
                    )
                h, dn_cache = ops.dense_forward(
                    h, self.params[slot], self.params[slot + 1]
                )
                cache = (flat_shape, dn_cache)
            if want_cache:
                caches.append(cache)
        return h, caches

    def backward(self, caches, dout: np.ndarray):
        """Back-propagate; returns (d_input_nhwc_or_flat, param_grads)."""
        grads: list = [None] * len(self.params)
        g = dout
        for i in range(len(self.specs) - 1, -1, -1):
            spec, cache = self.specs[i], caches[i]
            slot = self._param_slot[i]
            if spec.kind == "conv3x3":
                g, dw, db = ops.conv_backward(cache, g)
                grads[slot], grads[slot + 1] = dw, db
            elif spec.kind == "maxpool2x2":
                pad_cache, pool_cache = cache
                g = ops.maxpool_backward(pool_cache, g)
                if pad_cache != (0, 0):
                    g = ops.pad_replicate_backward(pad_cache, g)
            elif spec.kind == "relu":
                g = ops.relu_backward(cache, g)
            else:
                flat_shape, dn_cache = cache
                g, dw, db = ops.dense_backward(dn_cache, g)
                grads[slot], grads[slot + 1] = dw, db
                if flat_shape is not None:
                    g = g.reshape(flat_shape)
        return g, grads

    # -- checkpoint plumbing -------------------------------------------------

    def state_meta(self) -> dict:
        return {"layer_specs": [s.to_dict() for s in self.specs]}

    def state_arrays(self) -> dict:
        return {f"param_{i}": p for i, p in enumerate(self.params)}

    @classmethod
    def from_state(cls, meta: dict, arrays: dict) -> "SequentialNet":
        specs = [LayerSpec.from_dict(d) for d in meta["layer_specs"]]
        net = cls(specs, seed=0)
        for i in range(len(net.params)):
            arr = np.asarray(arrays[f"param_{i}"], dtype=net.dtype)
            if arr.shape != net.params[i].shape:
                raise ValueError(
                    f"checkpoint param_{i} shape {arr.shape} does not match "
                    f"network shape {net.params[i].shape}"
                )
            net.params[i] = arr
        return net


def spatial_output_shape(specs, input_hw: tuple[int, int]):
    """Trace (H, W) through conv/pool layers; returns the shape before flatten."""
    h, w = input_hw
    for spec in specs:
        if spec.kind == "conv3x3":
            h, w = h - 2, w - 2
        elif spec.kind == "maxpool2x2":
            h, w = (h + h % 2) // 2, (w + w % 2) // 2
        elif spec.kind == "dense":
            break
    return h, w
