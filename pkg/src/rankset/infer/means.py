"""Mean estimation and the RSS z- and t-tests."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import Allocation, RssDataset, TestResult, normalize_alternative, partition_by_rank
from ..errors import DataError
from ..numerics import normal_quantile, normal_sf, t_quantile, t_sf
from ._pivot import check_alpha, interval, p_value

DF_METHODS = ("naive", "sample")


@dataclass(frozen=True)
class MeanSummary:
    mu_hat: float
    var_hat: Optional[float]
    stratum_means: tuple[float, ...]
    stratum_vars: Optional[tuple[float, ...]]
    counts: Allocation

    @property
    def set_size(self) -> int:
        return len(self.counts)

    @property
    def n(self) -> int:
        return self.counts.total()


def _continuous(data: RssDataset) -> RssDataset:
    if data.kind != "continuous":
        raise DataError("mean inference requires a continuous dataset")
    data = data.dropna()
    if len(data) == 0:
        raise DataError("dataset has no observed outcomes")
    return data


def mean_summary(data: RssDataset, require_variance: bool = True) -> MeanSummary:
    """Stratified mean and its estimated variance.

    ``mu_hat = (1/H) sum_h ybar_h`` and
    ``var_hat = (1/H^2) sum_h s_h^2 / n_h``. A singleton stratum leaves the
    variance undefined: an error when ``require_variance`` is set,
    otherwise ``var_hat`` is ``None``.
    """
    data = _continuous(data)
    groups = partition_by_rank(data)
    H = data.set_size
    for h, g in enumerate(groups, start=1):
        if len(g) == 0:
            raise DataError(f"stratum {h} is empty")
    means = tuple(float(np.mean(g)) for g in groups)
    counts = Allocation(len(g) for g in groups)
    mu = sum(means) / H
    if any(len(g) < 2 for g in groups):
        if require_variance:
            h = next(h for h, g in enumerate(groups, start=1) if len(g) < 2)
            raise DataError(f"stratum {h} has a single observation; variance unavailable")
        return MeanSummary(mu, None, means, None, counts)
    svars = tuple(float(np.var(g, ddof=1)) for g in groups)
    var = sum(v / n for v, n in zip(svars, counts)) / (H * H)
    return MeanSummary(mu, var, means, svars, counts)


def _combine(data1: RssDataset, data2: Optional[RssDataset]):
    s1 = mean_summary(data1)
    if data2 is None:
        return [s1], s1.mu_hat, s1.var_hat
    if data2.kind != data1.kind:
        raise DataError("datasets have different kinds")
    s2 = mean_summary(data2)
    return [s1, s2], s1.mu_hat - s2.mu_hat, s1.var_hat + s2.var_hat


def naive_df(summaries) -> int:
    return sum(s.n - s.set_size for s in summaries)


def satterthwaite_df(summaries) -> float:
    """Welch-Satterthwaite df over every stratum of every sample."""
    g, terms = [], []
    for s in summaries:
        H = s.set_size
        for v, n in zip(s.stratum_vars, s.counts):
            gh = v / (H * H * n)
            g.append(gh)
            terms.append(gh * gh / (n - 1))
    den = sum(terms)
    if den == 0:
        return math.inf
    return sum(g) ** 2 / den


def rss_z_test(
    data1: RssDataset,
    data2: Optional[RssDataset] = None,
    mu0: float = 0.0,
    alpha: float = 0.05,
    alternative: str = "two_sided",
) -> TestResult:
    check_alpha(alpha)
    alt = normalize_alternative(alternative)
    _, est, var = _combine(data1, data2)
    se = math.sqrt(var)
    stat = _pivot(est, mu0, se)
    lo, hi = interval(est, se, alpha, alt, normal_quantile)
    return TestResult(
        estimate=est,
        ci_lower=lo,
        ci_upper=hi,
        statistic=stat,
        p_value=p_value(stat, alt, normal_sf),
        method="z",
        alpha=alpha,
        alternative=alt,
    )


def rss_t_test(
    data1: RssDataset,
    data2: Optional[RssDataset] = None,
    mu0: float = 0.0,
    alpha: float = 0.05,
    alternative: str = "two_sided",
    df_method: str = "sample",
) -> TestResult:
    """Pivot of the z-test referred to a t distribution.

    ``df_method="naive"`` uses ``sum(n - H)`` over the samples,
    ``"sample"`` a Welch-Satterthwaite df over all strata.
    """
    check_alpha(alpha)
    alt = normalize_alternative(alternative)
    if df_method not in DF_METHODS:
        raise DataError(f"unknown df method {df_method!r}")
    summaries, est, var = _combine(data1, data2)
    df = naive_df(summaries) if df_method == "naive" else satterthwaite_df(summaries)
    if not df > 0:
        raise DataError(f"degrees of freedom must be positive, got {df}")
    se = math.sqrt(var)
    stat = _pivot(est, mu0, se)
    if math.isinf(df):
        sf, q = normal_sf, normal_quantile
    else:
        sf = lambda x: t_sf(x, df)  # noqa: E731
        q = lambda p: t_quantile(p, df)  # noqa: E731
    lo, hi = interval(est, se, alpha, alt, q)
    return TestResult(
        estimate=est,
        ci_lower=lo,
        ci_upper=hi,
        statistic=stat,
        p_value=p_value(stat, alt, sf),
        method="t",
        alpha=alpha,
        alternative=alt,
        df=df,
    )


def _pivot(est: float, mu0: float, se: float) -> float:
    diff = est - mu0
    if se > 0:
        return diff / se
    if diff == 0:
        return 0.0
    return math.copysign(math.inf, diff)


def srs_t_test(
    y, mu0: float = 0.0, alpha: float = 0.05, alternative: str = "two_sided"
) -> TestResult:
    """Classical one-sample t-test with ``n - 1`` df."""
    y = np.asarray(y, dtype=float)
    if len(y) < 2:
        raise DataError("the t-test needs at least two observations")
    return rss_t_test(
        RssDataset.from_arrays([1] * len(y), y, set_size=1),
        mu0=mu0,
        alpha=alpha,
        alternative=alternative,
        df_method="naive",
    )
