"""Two-way k-means, soft assignment confidence and nearest-centre decisions.

This is the unsupervised decision core shared by every feature type: fit
two centres on burn-in features, score every later crop by the ratio of
distances to the two centres, assign to the nearer one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.exceptions import NotFittedError

from .labels import TEAM_A, TEAM_B

MAX_LLOYD_ITER = 200


@dataclass
class ClusterModel:
    """Two centres in a feature space plus the extractor that produced it."""

    centre_a: np.ndarray
    centre_b: np.ndarray
    feature_kind: str = ""
    inertia: float = 0.0
    degenerate: bool = False
    inertia_trace: list = field(default_factory=list)

    def __post_init__(self):
        if self.centre_a.shape != self.centre_b.shape:
            raise ValueError(
                f"centres must share a dimension: {self.centre_a.shape} vs "
                f"{self.centre_b.shape}"
            )


def _lloyd(points: np.ndarray, c0: np.ndarray, c1: np.ndarray):
    """Lloyd iterations to an assignment fixpoint; returns centres, inertia, trace."""
    centres = np.stack([c0, c1])
    prev_assign = None
    trace = []
    for _ in range(MAX_LLOYD_ITER):
        d2 = ((points[:, None, :] - centres[None, :, :]) ** 2).sum(axis=2)
        assign = d2.argmin(axis=1)
        trace.append(float(d2[np.arange(len(points)), assign].sum()))
        if prev_assign is not None and np.array_equal(assign, prev_assign):
            break
        prev_assign = assign
        for k in range(2):
            sel = assign == k
            if sel.any():
                centres[k] = points[sel].mean(axis=0)
            else:
                # empty-cluster repair: re-seed at the farthest point
                other = centres[1 - k]
                far = ((points - other) ** 2).sum(axis=1).argmax()
                centres[k] = points[far]
    inertia = trace[-1]
    return centres, inertia, trace


def kmeans2(points, restarts: int = 10, seed: int = 0,
            feature_kind: str = "") -> ClusterModel:
    """k=2 k-means with restarts; the restart with the least inertia wins.

    Each restart initializes the centres at two distinct random data
    points. Deterministic given the seed. If every point is identical the
    model is flagged degenerate with both centres at that point.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 2:
        raise ValueError(f"kmeans2 needs >= 2 points, got shape {points.shape}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    n = points.shape[0]
    if np.all(points == points[0]):
        return ClusterModel(points[0].copy(), points[0].copy(), feature_kind,
                            0.0, degenerate=True, inertia_trace=[0.0])
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        i, j = rng.choice(n, size=2, replace=False)
        tries = 0
        while np.array_equal(points[i], points[j]) and tries < 32:
            j = rng.integers(n)
            tries += 1
        if np.array_equal(points[i], points[j]):
            # fall back to scanning for any point distinct from points[i]
            distinct = np.flatnonzero(np.any(points != points[i], axis=1))
            j = distinct[0]
        centres, inertia, trace = _lloyd(points, points[i].copy(), points[j].copy())
        if best is None or inertia < best[1]:
            best = (centres, inertia, trace)
    centres, inertia, trace = best
    return ClusterModel(centres[0], centres[1], feature_kind, inertia,
                        inertia_trace=trace)


def soft_confidence(x, model: ClusterModel):
    """Distance-ratio assignment confidence (p_a, p_b), summing to 1 exactly.

    p_a = ||x - c_b|| / (||x - c_a|| + ||x - c_b||); equidistant or fully
    degenerate inputs give (0.5, 0.5).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.centre_a.shape:
        raise ValueError(
            f"feature dim {x.shape} does not match centres {model.centre_a.shape}"
        )
    da = float(np.linalg.norm(x - model.centre_a))
    db = float(np.linalg.norm(x - model.centre_b))
    total = da + db
    if total == 0.0:
        return 0.5, 0.5
    p_a = db / total
    return p_a, 1.0 - p_a


def soft_confidence_batch(X, model: ClusterModel) -> np.ndarray:
    """(n, 2) confidences for rows of X;  each row sums to 1 exactly."""
    X = np.asarray(X, dtype=np.float64)
    da = np.linalg.norm(X - model.centre_a, axis=1)
    db = np.linalg.norm(X - model.centre_b, axis=1)
    total = da + db
    p_a = np.where(total == 0.0, 0.5, np.divide(db, total, out=np.full_like(db, 0.5),
                                                where=total != 0.0))
    return np.stack([p_a, 1.0 - p_a], axis=1)


def assign_nearest(x, model: ClusterModel) -> str:
    """Side with the larger confidence; an exact tie goes to TeamA."""
    p_a, _ = soft_confidence(x, model)
    return TEAM_A if p_a >= 0.5 else TEAM_B


class TeamKMeans(ClusterMixin, BaseEstimator):
    """sklearn-style wrapper: fit two centres, predict sides and confidences.

    ``predict`` returns 0 for the TeamA side (centre_a) and 1 for TeamB;
    ``predict_proba`` returns the soft confidences.
    """

    def __init__(self, restarts: int = 10, random_state: int = 0,
                 feature_kind: str = ""):
        self.restarts = restarts
        self.random_state = random_state
        self.feature_kind = feature_kind

    def fit(self, X, y=None):
        self.model_ = kmeans2(X, restarts=self.restarts, seed=self.random_state,
                              feature_kind=self.feature_kind)
        self.cluster_centers_ = np.stack([self.model_.centre_a, self.model_.centre_b])
        self.inertia_ = self.model_.inertia
        self.labels_ = self.predict(X)
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("TeamKMeans must be fitted first")

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        proba = soft_confidence_batch(X, self.model_)
        return (proba[:, 0] < 0.5).astype(int)

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        return soft_confidence_batch(X, self.model_)
