"""Two-sample AUC for RSS data: stratum-weighted Mann-Whitney estimate and a
jackknife empirical likelihood test.

Every record carries weight ``1 / (H n_h)`` within its sample, so the
estimate is ``w1' K w2`` with ``K[i, j] = psi(y2_j - y1_i)``.
"""
from __future__ import annotations

import numpy as np

from ..core import RssDataset, TestResult
from ..errors import DataError, InfeasibleError
from ..numerics import chisq1_sf
from ._pivot import check_alpha
from .elr import StratifiedEL


def _prepare(data: RssDataset):
    if data.kind != "continuous":
        raise DataError("AUC inference requires continuous datasets")
    data = data.dropna()
    ranks, y = data.ranks, data.y
    counts = np.bincount(ranks - 1, minlength=data.set_size)
    if np.any(counts == 0):
        h = int(np.argmax(counts == 0)) + 1
        raise DataError(f"stratum {h} is empty")
    weights = 1.0 / (data.set_size * counts[ranks - 1])
    return y, ranks, counts, weights


def _kernel(y1: np.ndarray, y2: np.ndarray) -> np.ndarray:
    diff = y2[None, :] - y1[:, None]
    return (diff > 0).astype(float) + 0.5 * (diff == 0)


def rss_auc_estimate(data1: RssDataset, data2: RssDataset) -> float:
    """Estimate of ``P(Y2 > Y1) + P(Y2 = Y1) / 2``."""
    y1, _, _, w1 = _prepare(data1)
    y2, _, _, w2 = _prepare(data2)
    return float(w1 @ _kernel(y1, y2) @ w2)


def _leave_one_out(row: np.ndarray, ranks: np.ndarray, counts: np.ndarray, H: int, total: float):
    """Estimate after deleting each record of one sample in turn.

    ``row[i]`` is record i's summed kernel against the other sample's
    weights; deleting it re-weights the rest of its stratum to
    ``1 / (H (n_h - 1))``.
    """
    if np.any(counts < 2):
        raise DataError("jackknife needs at least two records in every stratum")
    stratum_sum = np.bincount(ranks - 1, weights=row, minlength=H)
    s = stratum_sum[ranks - 1]
    n = counts[ranks - 1]
    return total - s / (H * n) + (s - row) / (H * (n - 1))


def auc_pseudo_values(data1: RssDataset, data2: RssDataset) -> tuple[float, np.ndarray]:
    """Estimate and its ``n1 + n2`` jackknife pseudo-values."""
    y1, r1, c1, w1 = _prepare(data1)
    y2, r2, c2, w2 = _prepare(data2)
    K = _kernel(y1, y2)
    est = float(w1 @ K @ w2)
    loo1 = _leave_one_out(K @ w2, r1, c1, data1.set_size, est)
    loo2 = _leave_one_out(w1 @ K, r2, c2, data2.set_size, est)
    loo = np.concatenate([loo1, loo2])
    N = len(loo)
    return est, N * est - (N - 1) * loo


def rss_auc_test(
    data1: RssDataset,
    data2: RssDataset,
    delta0: float = 0.5,
    alpha: float = 0.05,
) -> TestResult:
    """Jackknife empirical likelihood test of ``AUC = delta0``.

    The confidence interval inverts the test over ``(0, 1)``. Raises
    :class:`InfeasibleError` when all pseudo-values coincide.
    """
    check_alpha(alpha)
    if not 0.0 < delta0 < 1.0:
        raise DataError(f"delta0 must be in (0, 1), got {delta0}")
    est, pseudo = auc_pseudo_values(data1, data2)
    if len(pseudo) < 4:
        raise DataError("the AUC test needs at least four records in total")
    el = StratifiedEL([pseudo])
    if el.degenerate:
        raise InfeasibleError("exact tie: all jackknife pseudo-values are equal")
    prof = el.profile(delta0)
    lo, hi = el.interval(alpha)
    return TestResult(
        estimate=est,
        ci_lower=max(lo, 0.0),
        ci_upper=min(hi, 1.0),
        statistic=prof.neg2_log_lr,
        p_value=chisq1_sf(prof.neg2_log_lr),
        method="auc",
        alpha=alpha,
        alternative="two_sided",
        feasible=prof.feasible,
        profile=prof,
    )
