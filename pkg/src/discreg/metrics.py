"""Losses and summary statistics."""

import math

import numpy as np
from scipy import stats


def l2_value_loss(v_hat, v_true) -> float:
    return float(np.linalg.norm(np.asarray(v_hat, dtype=np.float64) - np.asarray(v_true, dtype=np.float64)))


def _pair_counts(x, y):
    """Concordant-minus-discordant count and the two tie-adjusted pair totals."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be 1-D vectors of equal length")
    iu = np.triu_indices(x.shape[0], k=1)
    dx = np.sign(x[:, None] - x[None, :])[iu].astype(np.int64)
    dy = np.sign(y[:, None] - y[None, :])[iu].astype(np.int64)
    return int(np.sum(dx * dy)), int(np.count_nonzero(dx)), int(np.count_nonzero(dy))


def kendall_tau_b(x, y) -> float:
    """Tie-corrected Kendall rank correlation; NaN if either input is constant."""
    s, nx, ny = _pair_counts(x, y)
    if nx == 0 or ny == 0:
        return math.nan
    return s / math.sqrt(nx * ny)


def ranking_loss(v_hat, v_true) -> float:
    """Negative tau-b between estimated and true values (-1 is a perfect ranking)."""
    return -kendall_tau_b(v_hat, v_true)


def tv_distance(p, q) -> float:
    return 0.5 * float(np.sum(np.abs(np.asarray(p, dtype=np.float64) - np.asarray(q, dtype=np.float64))))


def mean_ci(samples, level: float = 0.95):
    """Mean and Student-t confidence interval ``(mean, low, high)``."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size == 0:
        raise ValueError("need at least one sample")
    mean = float(x.mean())
    if x.size == 1:
        return mean, mean, mean
    sem = float(x.std(ddof=1)) / math.sqrt(x.size)
    half = float(stats.t.ppf(0.5 + level / 2.0, x.size - 1)) * sem
    return mean, mean - half, mean + half
