"""Proportion estimation and test for binary RSS data under perfect ranking."""
from __future__ import annotations

import math

import numpy as np

from ..core import RssDataset, TestResult, normalize_alternative, partition_by_rank
from ..errors import DataError, InfeasibleError
from ..numerics import binomial_tail, normal_quantile, normal_sf
from ._pivot import check_alpha, interval, p_value


def _binary(data: RssDataset) -> list[np.ndarray]:
    if data.kind != "binary":
        raise DataError("proportion inference requires a binary dataset")
    groups = partition_by_rank(data.dropna())
    for h, g in enumerate(groups, start=1):
        if len(g) == 0:
            raise DataError(f"stratum {h} is empty")
    return groups


def rss_proportion(data: RssDataset) -> float:
    groups = _binary(data)
    return float(np.mean([g.mean() for g in groups]))


def proportion_variance(p_hat: float, counts, H: int) -> float:
    """Plug-in variance ``(1/H^2) sum_h p_h (1 - p_h) / n_h`` with
    ``p_h = P(Bin(H, p_hat) >= H - h + 1)``."""
    total = 0.0
    for h, n in enumerate(counts, start=1):
        ph = binomial_tail(H, H - h + 1, p_hat)
        total += ph * (1.0 - ph) / n
    return total / (H * H)


def rss_prop_test(
    data: RssDataset,
    p0: float,
    alpha: float = 0.05,
    alternative: str = "two_sided",
) -> TestResult:
    check_alpha(alpha)
    alt = normalize_alternative(alternative)
    if not 0.0 < p0 < 1.0:
        raise DataError(f"p0 must be in (0, 1), got {p0}")
    groups = _binary(data)
    H = data.set_size
    p_hat = float(np.mean([g.mean() for g in groups]))
    if p_hat in (0.0, 1.0):
        raise InfeasibleError(
            f"estimated proportion is {p_hat}; the plug-in variance is degenerate"
        )
    se = math.sqrt(proportion_variance(p_hat, [len(g) for g in groups], H))
    stat = (p_hat - p0) / se
    lo, hi = interval(p_hat, se, alpha, alt, normal_quantile)
    return TestResult(
        estimate=p_hat,
        ci_lower=lo,
        ci_upper=hi,
        statistic=stat,
        p_value=p_value(stat, alt, normal_sf),
        method="prop",
        alpha=alpha,
        alternative=alt,
    )
