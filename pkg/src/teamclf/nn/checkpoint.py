"""Self-describing checkpoint container.

A checkpoint is an .npz archive holding float64 parameter tensors plus a
JSON header with a format tag, the checkpoint kind (embedding / referee /
autoencoder / cluster / gmm), layer specs where applicable, and the run
config that produced it.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FORMAT_TAG = "teamclf.checkpoint/1"
_HEADER_KEY = "__header__"


def save_checkpoint(path, kind: str, meta: dict, arrays: dict) -> None:
    """Write a checkpoint; ``arrays`` maps names to ndarrays (stored float64)."""
    header = {"format": FORMAT_TAG, "kind": kind, "meta": meta}
    payload = {
        name: np.asarray(arr, dtype=np.float64) for name, arr in arrays.items()
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        np.savez(fh, **{_HEADER_KEY: np.array(json.dumps(header))}, **payload)


def load_checkpoint(path, expect_kind: str | None = None):
    """Read a checkpoint; returns (kind, meta, arrays)."""
    with np.load(path, allow_pickle=False) as data:
        if _HEADER_KEY not in data:
            raise ValueError(f"{path}: not a teamclf checkpoint (missing header)")
        header = json.loads(str(data[_HEADER_KEY]))
        if header.get("format") != FORMAT_TAG:
            raise ValueError(
                f"{path}: unsupported checkpoint format {header.get('format')!r}"
            )
        arrays = {k: data[k] for k in data.files if k != _HEADER_KEY}
    kind = header["kind"]
    if expect_kind is not None and kind != expect_kind:
        raise ValueError(f"{path}: expected a {expect_kind} checkpoint, got {kind}")
    return kind, header["meta"], arrays
