"""Team-conditional positioning heatmaps: Gaussian KDE and KL comparison.

Densities live on a rink-template raster (default 496x240). Kernels are
isotropic Gaussians evaluated at cell centres; the grid is renormalized
to sum to 1, which folds any mass falling outside the template back in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TEMPLATE_WIDTH = 496
TEMPLATE_HEIGHT = 240
BANDWIDTH_FLOOR = 1.0  # template pixels
KL_SMOOTHING = 1e-12


@dataclass
class DensityGrid:
    """Normalized player-density raster with bandwidth metadata."""

    cells: np.ndarray  # (height, width), non-negative, sums to 1
    bandwidth: float
    sample_count: int

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def __post_init__(self):
        if self.cells.ndim != 2:
            raise ValueError(f"cells must be 2-d, got shape {self.cells.shape}")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if np.any(self.cells < 0):
            raise ValueError("density cells must be non-negative")
        if abs(float(self.cells.sum()) - 1.0) > 1e-6:
            raise ValueError("density cells must sum to 1")


def silverman_bandwidth(points) -> float:
    """Scalar rule-of-thumb bandwidth: mean per-dimension std times n^(-1/6).

    (d = 2 so the exponent is -1/(d+4) = -1/6.) Floored at 1 template pixel;
    zero-spread inputs return the floor.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError(f"need >= 2 two-dimensional points, got shape {pts.shape}")
    sigma = float(pts.std(axis=0).mean())
    if sigma == 0.0:
        return BANDWIDTH_FLOOR
    return max(sigma * len(pts) ** (-1.0 / 6.0), BANDWIDTH_FLOOR)


def kde_grid(points, bandwidth: float, width: int = TEMPLATE_WIDTH,
             height: int = TEMPLATE_HEIGHT) -> DensityGrid:
    """Gaussian KDE of rink points, rasterized at cell centres and normalized.

    The per-point kernel is separable, so the grid is accumulated as an
    outer product of axis profiles (one GEMM), keeping the reduction
    deterministic.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise ValueError(f"need a non-empty (n, 2) point array, got {pts.shape}")
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    xs = np.arange(width) + 0.5
    ys = np.arange(height) + 0.5
    inv = -0.5 / (bandwidth * bandwidth)
    gx = np.exp(inv * (xs[None, :] - pts[:, 0:1]) ** 2)  # (n, width)
    gy = np.exp(inv * (ys[None, :] - pts[:, 1:2]) ** 2)  # (n, height)
    cells = gy.T @ gx  # (height, width)
    total = float(cells.sum())
    if total <= 0.0:
        raise ValueError("all kernel mass fell outside the representable range")
    return DensityGrid(cells / total, float(bandwidth), len(pts))


def kl_divergence(p: DensityGrid, q: DensityGrid) -> float:
    """KL(p || q) with 1e-12 smoothing and renormalization of both grids."""
    if p.cells.shape != q.cells.shape:
        raise ValueError(
            f"grid shapes differ: {p.cells.shape} vs {q.cells.shape}"
        )
    ps = p.cells + KL_SMOOTHING
    qs = q.cells + KL_SMOOTHING
    ps = ps / ps.sum()
    qs = qs / qs.sum()
    return float(np.sum(ps * np.log(ps / qs)))


def grid_to_text(path, grid: DensityGrid) -> None:
    """Write the raster as delimited text with a small metadata header."""
    header = (f"bandwidth={grid.bandwidth} sample_count={grid.sample_count} "
              f"width={grid.width} height={grid.height}")
    np.savetxt(path, grid.cells, header=header)


def grid_to_image(grid: DensityGrid) -> np.ndarray:
    """8-bit grayscale rendering: 0 maps to 0, the peak cell maps to 255."""
    peak = float(grid.cells.max())
    if peak == 0.0:
        return np.zeros(grid.cells.shape, dtype=np.uint8)
    return np.round(grid.cells / peak * 255.0).astype(np.uint8)
