"""Colour-only baseline features: RGB histograms and a GMM bag-of-colours.

Both featurizers follow the sklearn transformer API and consume lists of
:class:`~teamclf.preprocess.PreparedCrop`; by default they look at the
upper half of the crop, where jerseys are most distinct.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

COVARIANCE_FLOOR = 1e-6
DEGENERATE_WEIGHT = 1e-8


def rgb_histogram(image: np.ndarray, mask: np.ndarray, bins: int = 8) -> np.ndarray:
    """Normalized joint RGB histogram over masked pixels.

    ``image`` is (3, H, W) with values in [0, 1]; each masked pixel adds
    1/N to the bin of its quantized colour; the result has length bins**3
    and sums to 1. Raises ValueError on an empty mask.
    """
    sel = np.asarray(mask) >= 0.5
    if not sel.any():
        raise ValueError("rgb_histogram: empty mask")
    quant = np.minimum((image[:, sel] * bins).astype(np.int64), bins - 1)
    flat = (quant[0] * bins + quant[1]) * bins + quant[2]
    hist = np.bincount(flat, minlength=bins**3).astype(np.float64)
    return hist / hist.sum()


@dataclass
class GmmDictionary:
    """Diagonal-covariance colour mixture fitted by EM.

    ``log_likelihood_trace`` records per-iteration mean log-likelihood;
    ``reseed_iterations`` marks iterations where a degenerate component was
    re-seeded (monotonicity holds between reseeds).
    """

    weights: np.ndarray  # (n,) on the simplex
    means: np.ndarray  # (n, 3)
    covariances: np.ndarray  # (n, 3) diagonal entries >= COVARIANCE_FLOOR
    log_likelihood_trace: list = field(default_factory=list)
    reseed_iterations: list = field(default_factory=list)

    @property
    def n_components(self) -> int:
        return len(self.weights)

    def __post_init__(self):
        if abs(float(self.weights.sum()) - 1.0) > 1e-8:
            raise ValueError("mixture weights must sum to 1")
        if np.any(self.covariances < COVARIANCE_FLOOR * (1 - 1e-12)):
            raise ValueError("covariance entries below the stability floor")


def _log_responsibilities(pixels, weights, means, covs):
    # log N(x; mu, diag cov) summed over the 3 channels
    diff = pixels[:, None, :] - means[None, :, :]  # (N, n, 3)
    log_norm = -0.5 * (np.log(2.0 * np.pi * covs).sum(axis=1))  # (n,)
    log_prob = log_norm[None, :] - 0.5 * (diff * diff / covs[None, :, :]).sum(axis=2)
    log_joint = np.log(weights)[None, :] + log_prob
    log_total = np.logaddexp.reduce(log_joint, axis=1)
    return log_joint - log_total[:, None], log_total


def gmm_fit(pixels: np.ndarray, n_components: int, seed: int = 0,
            max_iter: int = 200, tol: float = 1e-5) -> GmmDictionary:
    """Fit a diagonal-covariance GMM to (N, 3) colour samples by EM.

    Requires N >= 10 * n_components. Stops when the mean log-likelihood
    improves by less than ``tol`` or after ``max_iter`` iterations.
    Components whose weight collapses below 1e-8 are re-seeded at a random
    pixel.
    """
    pixels = np.asarray(pixels, dtype=np.float64)
    if pixels.ndim != 2 or pixels.shape[1] != 3:
        raise ValueError(f"pixels must be (N, 3), got {pixels.shape}")
    n = pixels.shape[0]
    if n < 10 * n_components:
        raise ValueError(
            f"need at least {10 * n_components} pixels for {n_components} "
            f"components, got {n}"
        )
    rng = np.random.default_rng(seed)
    means = pixels[rng.choice(n, size=n_components, replace=False)].copy()
    global_var = np.maximum(pixels.var(axis=0), COVARIANCE_FLOOR)
    covs = np.tile(global_var, (n_components, 1))
    weights = np.full(n_components, 1.0 / n_components)

    trace: list[float] = []
    reseeds: list[int] = []
    prev_ll = -np.inf
    for it in range(max_iter):
        log_resp, log_total = _log_responsibilities(pixels, weights, means, covs)
        ll = float(log_total.mean())
        trace.append(ll)
        resp = np.exp(log_resp)
        nk = resp.sum(axis=0)
        weights = nk / n
        degenerate = np.flatnonzero(weights < DEGENERATE_WEIGHT)
        if degenerate.size:
            reseeds.append(it)
            for k in degenerate:
                means[k] = pixels[rng.integers(n)]
                covs[k] = global_var
                weights[k] = 1.0 / n
            weights = weights / weights.sum()
            prev_ll = -np.inf  # trace restarts after a reseed
            continue
        means = (resp.T @ pixels) / nk[:, None]
        diff2 = (pixels[:, None, :] - means[None, :, :]) ** 2
        covs = np.einsum("nk,nkd->kd", resp, diff2) / nk[:, None]
        covs = np.maximum(covs, COVARIANCE_FLOOR)
        if ll - prev_ll < tol and np.isfinite(prev_ll):
            break
        prev_ll = ll
    return GmmDictionary(weights, means, covs, trace, reseeds)


def gmm_encode(image: np.ndarray, mask: np.ndarray, dictionary: GmmDictionary) -> np.ndarray:
    """Mean posterior responsibility vector over masked pixels (sums to 1)."""
    sel = np.asarray(mask) >= 0.5
    if not sel.any():
        raise ValueError("gmm_encode: empty mask")
    pixels = image[:, sel].T
    log_resp, _ = _log_responsibilities(
        pixels, dictionary.weights, dictionary.means, dictionary.covariances
    )
    return np.exp(log_resp).mean(axis=0)


def _crop_view(crop, use_upper_half):
    if use_upper_half:
        half = crop.upper_half()
        return half.image, half.mask
    return crop.image, crop.mask


class HistogramFeaturizer(TransformerMixin, BaseEstimator):
    """Stateless RGB-histogram features (bins**3-dimensional)."""

    def __init__(self, bins: int = 8, use_upper_half: bool = True):
        self.bins = bins
        self.use_upper_half = use_upper_half

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        rows = []
        for crop in X:
            img, msk = _crop_view(crop, self.use_upper_half)
            rows.append(rgb_histogram(img, msk, self.bins))
        return np.asarray(rows)

    @property
    def feature_kind(self) -> str:
        return f"histogram{self.bins}" + ("-upper" if self.use_upper_half else "")


class BagOfColoursFeaturizer(TransformerMixin, BaseEstimator):
    """GMM bag-of-colours: fit a colour dictionary, encode crops as responsibilities."""

    def __init__(self, n_components: int = 35, random_state: int = 0,
                 use_upper_half: bool = True, max_pixels: int = 200_000):
        self.n_components = n_components
        self.random_state = random_state
        self.use_upper_half = use_upper_half
        self.max_pixels = max_pixels

    def fit(self, X, y=None):
        pools = []
        for crop in X:
            img, msk = _crop_view(crop, self.use_upper_half)
            pools.append(img[:, msk >= 0.5].T)
        pixels = np.concatenate(pools, axis=0) if pools else np.empty((0, 3))
        if pixels.shape[0] > self.max_pixels:
            rng = np.random.default_rng(self.random_state)
            pixels = pixels[rng.choice(pixels.shape[0], self.max_pixels, replace=False)]
        self.dictionary_ = gmm_fit(pixels, self.n_components, seed=self.random_state)
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "dictionary_"):
            raise NotFittedError("BagOfColoursFeaturizer must be fitted first")
        rows = []
        for crop in X:
            img, msk = _crop_view(crop, self.use_upper_half)
            rows.append(gmm_encode(img, msk, self.dictionary_))
        return np.asarray(rows)

    @property
    def feature_kind(self) -> str:
        return f"bagofcolours{self.n_components}"
