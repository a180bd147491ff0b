"""Concentration metrics over token holdings."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UndefinedMetricError


@dataclass(frozen=True)
class MetricPoint:
    t: int
    gini: float
    one_minus_nse: float
    whale_share: float
    n_agents: int


def _holdings(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0 or np.any(x < 0) or not np.all(np.isfinite(x)):
        raise UndefinedMetricError("holdings must be a non-empty vector of finite non-negative values")
    if not x.sum() > 0:
        raise UndefinedMetricError("at least one holding must be positive")
    return x


def gini(holdings) -> float:
    """Gini coefficient via the sorted identity
    ``sum_i (2i - n - 1) x_(i) / (n * sum x)`` (1-based ranks)."""
    x = np.sort(_holdings(holdings))
    n = x.size
    ranks = np.arange(1, n + 1, dtype=float)
    # the rank weights sum to zero, so shifting by the minimum changes nothing
    # mathematically but makes equal holdings give exactly 0
    return float(np.dot(2.0 * ranks - n - 1.0, x - x[0]) / (n * x.sum()))


def gini_pairwise(holdings) -> float:
    """Gini from the double sum over all pairs of shares; O(n^2), for checking."""
    x = _holdings(holdings)
    p = x / x.sum()
    return float(np.abs(p[:, None] - p[None, :]).sum() / (2.0 * p.size * p.sum()))


def one_minus_nse(holdings) -> float:
    """``1 - H(p)/ln n`` with ``0 ln 0 = 0``; 0 for a uniform vector, 1 for a Dirac."""
    x = _holdings(holdings)
    n = x.size
    if n < 2:
        raise UndefinedMetricError("normalised entropy needs at least two agents")
    p = x / x.sum()
    p = p[p > 0]  # after dividing: a subnormal holding can underflow to a zero share
    h = -float(np.dot(p, np.log(p)))
    return min(1.0, max(0.0, 1.0 - h / math.log(n)))


def whale_count(holdings, threshold: float = 0.9) -> int:
    """Size of the smallest set of top holders jointly owning ``threshold`` of the supply."""
    x = _holdings(holdings)
    if not 0.0 < threshold <= 1.0:
        raise ParameterError(f"threshold must lie in (0, 1], got {threshold}")
    cum = np.cumsum(np.sort(x)[::-1])
    target = threshold * cum[-1] * (1.0 - 1e-12)
    return int(np.searchsorted(cum, target, side="left")) + 1


def whale_share(holdings, threshold: float = 0.9) -> float:
    return whale_count(holdings, threshold) / np.asarray(holdings).size


def linreg_slope(t, values) -> tuple[float, float]:
    """Ordinary least-squares (slope, intercept) of ``values`` on ``t``."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape:
        raise ParameterError("t and values must have the same length")
    if np.unique(t).size < 2:
        raise ParameterError("linear regression needs at least two distinct t values")
    tc = t - t.mean()
    slope = float(np.dot(tc, y - y.mean()) / np.dot(tc, tc))
    return slope, float(y.mean() - slope * t.mean())


def measure(t: int, tokens, n_agents: int, include_zero_holders: bool = False,
            threshold: float = 0.9) -> tuple[MetricPoint, int, int]:
    """Metrics for one snapshot.

    By default only agents with positive holdings enter the metrics;
    ``n_agents`` (everyone) is reported separately. Returns the point, the
    whale count and the size of the measured population.
    """
    tokens = np.asarray(tokens, dtype=float)
    x = tokens if include_zero_holders else tokens[tokens > 0]
    k = whale_count(x, threshold)
    nse = one_minus_nse(x) if x.size >= 2 else 1.0
    return MetricPoint(t, gini(x), nse, k / x.size, int(n_agents)), k, int(x.size)
