"""Sign test for the median of RSS data.

Under ``H0: median = M0`` a rank-h observation exceeds ``M0`` with
probability ``1 - beta_h``, where ``beta_h`` is the Beta(h, H-h+1) CDF at
1/2. The statistic centres and scales the count of positive signs with
those stratum probabilities; for balanced data it coincides with the
classical balanced RSS form ``(S - n/2) / (sqrt(n) eta / 2)``.
"""
from __future__ import annotations

import math

import numpy as np

from ..core import RssDataset, TestResult, normalize_alternative, stratum_counts
from ..errors import DataError
from ..numerics import beta_half_cdf, eta_squared, normal_quantile, normal_sf
from ._pivot import check_alpha, p_value


def sign_moments(counts, H: int) -> tuple[float, float]:
    """Null mean and variance of the positive-sign count."""
    betas = [beta_half_cdf(h, H) for h in range(1, H + 1)]
    mean = sum(n * (1.0 - b) for n, b in zip(counts, betas))
    var = sum(n * b * (1.0 - b) for n, b in zip(counts, betas))
    return mean, var


def sign_statistic(data: RssDataset, median0: float) -> tuple[int, float]:
    """``(S+, z)``; observations equal to ``median0`` are dropped."""
    ranks, y = data.ranks, data.y
    keep = y != median0
    if not np.any(keep):
        raise DataError("all observations equal the hypothesized median")
    counts = np.bincount(ranks[keep] - 1, minlength=data.set_size)
    s_plus = int(np.sum(y[keep] > median0))
    mean, var = sign_moments(counts, data.set_size)
    if var == 0:
        raise DataError("sign statistic has zero null variance")
    return s_plus, float((s_plus - mean) / math.sqrt(var))


def balanced_sign_statistic(s_plus: int, n: int, H: int) -> float:
    """The balanced-design form ``n^{-1/2}(S+ - n/2) / (eta/2)``."""
    eta = math.sqrt(eta_squared(H))
    return (s_plus - n / 2.0) / (math.sqrt(n) * eta / 2.0)


def _order_stat_interval(y_sorted: np.ndarray, counts, H: int, alpha: float, alt: str):
    n = len(y_sorted)
    mean, var = sign_moments(counts, H)
    sd = math.sqrt(var)
    # m is accepted iff S+(m) = n - #{y <= m} lies in the acceptance band
    if alt == "two_sided":
        q = normal_quantile(1.0 - alpha / 2.0)
        lo_count = math.ceil(n - mean - q * sd - 1e-9)
        hi_count = math.floor(n - mean + q * sd + 1e-9)
    elif alt == "less":
        q = normal_quantile(1.0 - alpha)
        lo_count, hi_count = -math.inf, math.floor(n - mean + q * sd + 1e-9)
    else:
        q = normal_quantile(1.0 - alpha)
        lo_count, hi_count = math.ceil(n - mean - q * sd - 1e-9), math.inf

    def at(k):
        return float(y_sorted[min(max(k, 1), n) - 1])

    lower = -math.inf if lo_count == -math.inf else at(lo_count)
    upper = math.inf if hi_count == math.inf else at(hi_count + 1)
    return lower, upper


def rss_sign_test(
    data: RssDataset,
    median0: float = 0.0,
    alpha: float = 0.05,
    alternative: str = "two_sided",
) -> TestResult:
    """Asymptotic sign test, pooled-median estimate and order-statistic CI.

    The interval ``[y_(j), y_(k)]`` collects every ``m`` whose sign
    statistic would not be rejected at level ``alpha``.
    """
    check_alpha(alpha)
    alt = normalize_alternative(alternative)
    if data.kind != "continuous":
        raise DataError("sign test requires a continuous dataset")
    data = data.dropna()
    if len(data) == 0:
        raise DataError("dataset has no observed outcomes")
    _, z = sign_statistic(data, median0)
    y_sorted = np.sort(data.y)
    lo, hi = _order_stat_interval(
        y_sorted, stratum_counts(data).counts, data.set_size, alpha, alt
    )
    return TestResult(
        estimate=float(np.median(y_sorted)),
        ci_lower=lo,
        ci_upper=hi,
        statistic=z,
        p_value=p_value(z, alt, normal_sf),
        method="sign",
        alpha=alpha,
        alternative=alt,
    )
