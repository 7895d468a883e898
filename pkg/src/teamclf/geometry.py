"""Homography estimation and back-projection of player ground points.

Estimation is a normalized direct linear transform: both point sets are
Hartley-normalized (centroid at the origin, mean distance sqrt(2)), the
9-parameter system is solved by SVD, and the conditioning transforms are
folded back in. Correspondences are hand-picked and trusted, so there is
no outlier rejection.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

MIN_DETERMINANT = 1e-12


@dataclass
class Correspondence:
    """One (image point, rink-template point) pair in pixels."""

    image_point: tuple[float, float]
    rink_point: tuple[float, float]

    def __post_init__(self):
        coords = (*self.image_point, *self.rink_point)
        if not np.all(np.isfinite(coords)):
            raise ValueError(f"non-finite correspondence {coords}")


@dataclass
class Homography:
    """3x3 projective map, normalized so H[2,2] == 1 when nonzero."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.shape != (3, 3):
            raise ValueError(f"homography must be 3x3, got {self.matrix.shape}")
        if abs(self.matrix[2, 2]) > 0:
            self.matrix = self.matrix / self.matrix[2, 2]
        if abs(np.linalg.det(self.matrix)) <= MIN_DETERMINANT:
            raise ValueError("homography is singular")

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.matrix))


def _hartley_normalization(points: np.ndarray) -> np.ndarray:
    centroid = points.mean(axis=0)
    dist = np.linalg.norm(points - centroid, axis=1).mean()
    if dist < 1e-12:
        raise ValueError("degenerate correspondences: all points coincide")
    s = np.sqrt(2.0) / dist
    return np.array([
        [s, 0.0, -s * centroid[0]],
        [0.0, s, -s * centroid[1]],
        [0.0, 0.0, 1.0],
    ])


def estimate_homography(pairs: list[Correspondence]) -> Homography:
    """Least-squares homography from >= 4 point correspondences (DLT).

    Raises ValueError when the system is rank-deficient (degenerate
    geometry such as all points collinear).
    """
    if len(pairs) < 4:
        raise ValueError(f"need >= 4 correspondences, got {len(pairs)}")
    src = np.array([p.image_point for p in pairs], dtype=np.float64)
    dst = np.array([p.rink_point for p in pairs], dtype=np.float64)
    t_src = _hartley_normalization(src)
    t_dst = _hartley_normalization(dst)
    sh = (t_src @ np.column_stack([src, np.ones(len(src))]).T).T
    dh = (t_dst @ np.column_stack([dst, np.ones(len(dst))]).T).T

    rows = []
    for (x, y, _), (u, v, _) in zip(sh, dh):
        rows.append([-x, -y, -1, 0, 0, 0, u * x, u * y, u])
        rows.append([0, 0, 0, -x, -y, -1, v * x, v * y, v])
    a = np.asarray(rows)
    _, sing, vt = np.linalg.svd(a)
    # a clear nullspace gap separates a well-posed system from a degenerate one
    if sing[-2] <= 1e-9 * sing[0]:
        raise ValueError(
            "rank-deficient correspondence system "
            f"(singular values {sing[0]:.3e} .. {sing[-2]:.3e}, {sing[-1]:.3e})"
        )
    h_norm = vt[-1].reshape(3, 3)
    h = np.linalg.inv(t_dst) @ h_norm @ t_src
    return Homography(h)


def project_point(h: Homography, point) -> tuple[float, float]:
    """Dehomogenized H @ (x, y, 1); rejects points mapping to infinity."""
    x, y = point
    vec = h.matrix @ np.array([x, y, 1.0])
    if abs(vec[2]) < 1e-15:
        raise ValueError(f"point {point} maps to infinity")
    return float(vec[0] / vec[2]), float(vec[1] / vec[2])


def project_points(h: Homography, points: np.ndarray) -> np.ndarray:
    """Vectorized projection of (n, 2) points."""
    pts = np.asarray(points, dtype=np.float64)
    hom = np.column_stack([pts, np.ones(len(pts))]) @ h.matrix.T
    w = hom[:, 2]
    if np.any(np.abs(w) < 1e-15):
        raise ValueError("some points map to infinity")
    return hom[:, :2] / w[:, None]


def ground_point(bbox) -> tuple[float, float]:
    """Mid-point of a bbox lower boundary: ((x0+x1)/2, y1)."""
    x0, y0, x1, y1 = bbox
    if x0 > x1 or y0 > y1:
        raise ValueError(f"bbox must be ordered, got {bbox}")
    return ((x0 + x1) / 2.0, float(y1))


def load_correspondences(path) -> list[Correspondence]:
    """Read (image_x, image_y, rink_x, rink_y) rows from delimited text.

    Accepts comma or whitespace delimiters; '#' starts a comment.
    """
    pairs = []
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 4:
            raise ValueError(f"{path}:{line_no}: expected 4 values, got {len(parts)}")
        ix, iy, rx, ry = map(float, parts)
        pairs.append(Correspondence((ix, iy), (rx, ry)))
    return pairs


def save_homography(path, h: Homography) -> None:
    np.savetxt(path, h.matrix.reshape(1, 9))


def load_homography(path) -> Homography:
    values = np.loadtxt(path).reshape(9)
    return Homography(values.reshape(3, 3))
