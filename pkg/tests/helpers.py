"""Shared test utilities: finite-difference oracles."""

import numpy as np


def central_diff(f, x, h=1e-4):
    """Central finite-difference gradient of scalar f at array x."""
    x = x.astype(np.float64).copy()
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gf = g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = f(x)
        flat[i] = orig - h
        down = f(x)
        flat[i] = orig
        gf[i] = (up - down) / (2.0 * h)
    return g


def max_rel_err(analytic, numeric, floor=1e-8):
    a = np.asarray(analytic, dtype=np.float64).reshape(-1)
    n = np.asarray(numeric, dtype=np.float64).reshape(-1)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
    return float(np.max(np.abs(a - n) / denom))


def best_two_partition_inertia(points):
    """Exhaustive optimal 2-partition SSE for n <= ~16 points.

    Point 0 is fixed to the first cluster (halves the enumeration); both
    clusters must be non-empty.
    """
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    best = np.inf
    for mask_bits in range(1, 2 ** (n - 1)):
        sel = np.array([(mask_bits >> i) & 1 for i in range(n - 1)], dtype=bool)
        group_b = points[1:][sel]
        group_a = np.concatenate([points[:1], points[1:][~sel]])
        sse = ((group_a - group_a.mean(axis=0)) ** 2).sum()
        sse += ((group_b - group_b.mean(axis=0)) ** 2).sum()
        best = min(best, float(sse))
    return best
