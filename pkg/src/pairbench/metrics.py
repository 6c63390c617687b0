"""Ranking and score-accuracy metrics with bootstrap confidence intervals."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from .errors import InvalidArgumentError, UndefinedCorrelationError
from .model import sigmoid_align

__all__ = ["pearson", "spearman", "rmse_aligned", "bootstrap_ci", "is_constant"]


def is_constant(x) -> bool:
    x = np.asarray(x, dtype=float)
    return np.ptp(x) <= 1e-12 * max(1.0, float(np.max(np.abs(x))))


def _pair(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or a.shape != b.shape:
        raise InvalidArgumentError("inputs must be 1-D vectors of equal length")
    if a.size < 3:
        raise InvalidArgumentError("correlation needs at least 3 points")
    if is_constant(a) or is_constant(b):
        raise UndefinedCorrelationError("correlation is undefined for a constant vector")
    return a, b


def pearson(a, b) -> float:
    """Product-moment correlation of ``a`` and ``b``."""
    a, b = _pair(a, b)
    da = a - a.mean()
    db = b - b.mean()
    r = np.dot(da, db) / np.sqrt(np.dot(da, da) * np.dot(db, db))
    return float(np.clip(r, -1.0, 1.0))


def spearman(a, b) -> float:
    """Rank correlation; tied values receive their average rank."""
    a, b = _pair(a, b)
    return pearson(rankdata(a), rankdata(b))


def rmse_aligned(estimated, reference) -> float:
    """RMSE after mapping ``estimated`` onto ``reference`` with :func:`sigmoid_align`."""
    aligned = sigmoid_align(estimated, reference).values
    return float(np.sqrt(np.mean((aligned - np.asarray(reference, dtype=float)) ** 2)))


def bootstrap_ci(samples, level: float = 0.95, resamples: int = 1000,
                 rng: np.random.Generator | None = None) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean of ``samples``."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise InvalidArgumentError("bootstrap_ci needs at least one sample")
    if not 0 < level < 1:
        raise InvalidArgumentError("level must lie in (0, 1)")
    if resamples < 100:
        raise InvalidArgumentError("use at least 100 resamples")
    if rng is None:
        rng = np.random.default_rng()
    means = x[rng.integers(0, x.size, size=(resamples, x.size))].mean(axis=1)
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(means, [tail, 1.0 - tail])
    # quantiles of resampled means can miss the sample mean for tiny or skewed samples
    m = x.mean()
    return float(min(lo, m)), float(max(hi, m))
