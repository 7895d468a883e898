"""Raw detection (image + segmentation mask) to canonical network input.

The canonical input is a masked, bilinearly resized 62x128 crop with
values in [0, 1], carried together with its resized mask so downstream
code can compute masked statistics. Intensity normalization (affine
min->0 / max->peak over masked pixels) is applied to network inputs
only; the colour baselines consume the unnormalized crop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import cv2
import numpy as np

from .labels import ALL_LABELS

CROP_HEIGHT = 128
CROP_WIDTH = 62

GRAY_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass
class PlayerCrop:
    """One detected person: 8-bit pixels, binary mask and provenance."""

    pixels: np.ndarray  # (H, W, 3) uint8
    mask: np.ndarray  # (H, W) bool or {0,1}/{0,255}
    game_id: str = ""
    frame_index: int = 0
    bbox: tuple = (0, 0, 0, 0)  # (x0, y0, x1, y1) in source-image pixels
    label: str | None = None

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ValueError(f"pixels must be (H, W, 3), got {self.pixels.shape}")
        if self.mask.shape != self.pixels.shape[:2]:
            raise ValueError(
                f"mask {self.mask.shape} does not match pixels {self.pixels.shape[:2]}"
            )
        x0, y0, x1, y1 = self.bbox
        if (x1, y1) != (0, 0) and not (x0 < x1 and y0 < y1):
            raise ValueError(f"bbox coordinates must be ordered, got {self.bbox}")
        if self.label is not None and self.label not in ALL_LABELS:
            raise ValueError(f"unknown label {self.label!r}")


@dataclass
class PreparedCrop:
    """Masked, resized crop: image (3, 128, 62) in [0, 1] plus float mask."""

    image: np.ndarray  # (3, CROP_HEIGHT, CROP_WIDTH) float64, masked
    mask: np.ndarray  # (CROP_HEIGHT, CROP_WIDTH) float64 in [0, 1]
    game_id: str = ""
    frame_index: int = 0
    bbox: tuple = (0, 0, 0, 0)
    label: str | None = None

    def masked_where(self) -> np.ndarray:
        return self.mask >= 0.5

    def upper_half(self) -> "PreparedCrop":
        img, msk = upper_half(self.image, self.mask)
        return PreparedCrop(img, msk, self.game_id, self.frame_index, self.bbox,
                            self.label)


def apply_mask_and_resize(crop: PlayerCrop) -> PreparedCrop:
    """Zero pixels outside the mask, bilinearly resize to 62x128, scale to [0, 1].

    Raises ValueError on an empty mask. Positions with zero resized-mask
    weight are exactly 0 in the output (linearity of the resize).
    """
    mask = (np.asarray(crop.mask) > 0).astype(np.float64)
    if not mask.any():
        raise ValueError(
            f"crop {crop.game_id}/frame{crop.frame_index}: empty mask, rejected"
        )
    masked = crop.pixels.astype(np.float64) * mask[:, :, None]
    resized = cv2.resize(masked, (CROP_WIDTH, CROP_HEIGHT), interpolation=cv2.INTER_LINEAR)
    mask_r = cv2.resize(mask, (CROP_WIDTH, CROP_HEIGHT), interpolation=cv2.INTER_LINEAR)
    image = np.ascontiguousarray(resized.transpose(2, 0, 1)) / 255.0
    return PreparedCrop(image, mask_r, crop.game_id, crop.frame_index, crop.bbox,
                        crop.label)


def intensity_normalize(image: np.ndarray, mask: np.ndarray | None = None,
                        peak: float = 1.0) -> np.ndarray:
    """Affine-map masked intensities so min -> 0 and max -> peak, jointly over channels.

    Statistics come from masked pixels (all pixels when mask is None); the
    transform is applied to masked pixels, unmasked positions stay 0. A
    constant image is returned unchanged. Idempotent.
    """
    image = np.asarray(image, dtype=np.float64)
    if mask is None:
        sel = np.ones(image.shape[1:], dtype=bool)
    else:
        sel = np.asarray(mask) >= 0.5
        if not sel.any():
            raise ValueError("intensity_normalize: no masked pixels")
    vals = image[:, sel]
    vmin = float(vals.min())
    vmax = float(vals.max())
    if vmax - vmin < 1e-12:
        return image.copy()
    a = peak / (vmax - vmin)
    out = np.zeros_like(image)
    out[:, sel] = (image[:, sel] - vmin) * a
    return out


def to_grayscale(image: np.ndarray) -> np.ndarray:
    """Replace all 3 channels with the 0.299/0.587/0.114 luminance."""
    r, g, b = GRAY_WEIGHTS
    lum = r * image[0] + g * image[1] + b * image[2]
    return np.stack([lum, lum, lum])


def upper_half(image: np.ndarray, mask: np.ndarray):
    """Keep rows [0, H/2) of a masked image; rejects an empty resulting mask."""
    h = image.shape[1]
    if h < 2:
        raise ValueError(f"upper_half needs height >= 2, got {h}")
    top = h // 2
    img, msk = image[:, :top, :], mask[:top, :]
    if not (msk >= 0.5).any():
        raise ValueError("upper_half: mask empty in the upper half, rejected")
    return img, msk


def network_input(crop: PreparedCrop) -> np.ndarray:
    """Intensity-normalized (3, 128, 62) tensor for the CNNs."""
    return intensity_normalize(crop.image, crop.mask, peak=1.0)
