"""Empirical likelihood for the mean of stratified (rank-wise) data.

The likelihood puts mass ``p_hr`` on every observation, with each stratum
carrying total mass ``1/H`` and the weighted mean fixed at ``mu0``. The
Lagrange conditions give ``H p_hr = 1 / (eta_h + c y_hr)``: one global
multiplier ``c`` for the mean and one ``eta_h`` per stratum for its mass.

For a given ``c`` each ``eta_h`` solves a monotone scalar equation, written
as ``sum_r 1 / (u_h + d_hr) = 1`` with ``d_hr = c y_hr - min_r c y_hr >= 0``.
That form keeps the smallest denominator at ``u_h >= 1`` and avoids
cancellation near the edge of the support. The implied mean decreases
monotonically in ``c``, so ``mu0`` maps to ``c`` by a bracketed root search.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core import RssDataset, TestResult, partition_by_rank
from ..errors import DataError, NumericalError
from ..numerics import RootBracket, chisq1_quantile, chisq1_sf, find_root
from ._pivot import check_alpha

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ElrProfile:
    mu0: float
    neg2_log_lr: float
    weights: tuple[np.ndarray, ...]
    multiplier: float
    stratum_multipliers: tuple[float, ...]
    feasible: bool = True


@dataclass(frozen=True)
class _Tilt:
    c: float
    mean: float
    stat: float
    weights: tuple[np.ndarray, ...]
    eta: tuple[float, ...]


def _solve_stratum(y: np.ndarray, c: float):
    """Stratum weights (summing to one) for global multiplier ``c``."""
    n = len(y)
    if c == 0.0 or n == 1:
        w = np.full(n, 1.0 / n)
        return w, float(n) - c * float(y.mean()), 0.0
    z = c * y
    zmin = float(z.min())
    d = z - zmin
    dmax = float(d.max())
    if dmax == 0.0:
        return np.full(n, 1.0 / n), float(n) - zmin, 0.0
    u = max(1.0, n - dmax)
    for _ in range(500):
        inv = 1.0 / (u + d)
        g = float(inv.sum()) - 1.0
        if g <= 0.0:
            break
        step = g / float(np.dot(inv, inv))
        u += step
        if step <= 4 * _EPS * u:
            break
    else:
        raise NumericalError(f"stratum multiplier did not converge (c={c})")
    w = 1.0 / (u + d)
    w /= w.sum()
    stat = -2.0 * float(np.sum(np.log(n * w)))
    return w, u - zmin, stat


class StratifiedEL:
    """Empirical likelihood for ``mu = (1/H) sum_h E[Y_[h]]``.

    With a single stratum this is the classical one-sample empirical
    likelihood for a mean.
    """

    def __init__(self, groups: Sequence[Sequence[float]]):
        self.groups = [np.asarray(g, dtype=float) for g in groups]
        if not self.groups:
            raise DataError("no strata")
        for h, g in enumerate(self.groups, start=1):
            if len(g) == 0:
                raise DataError(f"stratum {h} is empty")
            if not np.all(np.isfinite(g)):
                raise DataError(f"non-finite value in stratum {h}")
        self.H = len(self.groups)
        self.center = float(np.mean([g.mean() for g in self.groups]))
        self.lower = float(np.mean([g.min() for g in self.groups]))
        self.upper = float(np.mean([g.max() for g in self.groups]))
        spread = max(float(np.ptp(g)) for g in self.groups)
        self._c0 = 1.0 / spread if spread > 0 else 1.0
        self._maxn = max(len(g) for g in self.groups)

    @property
    def degenerate(self) -> bool:
        return self.lower == self.upper

    def tilt(self, c: float) -> _Tilt:
        ws, etas, total, mean = [], [], 0.0, 0.0
        for g in self.groups:
            w, eta, s = _solve_stratum(g, c)
            ws.append(w)
            etas.append(eta)
            total += s
            mean += float(np.dot(w, g))
        return _Tilt(c, mean / self.H, max(total, 0.0), tuple(ws), tuple(etas))

    def feasible(self, mu0: float) -> bool:
        if self.degenerate:
            return mu0 == self.center
        return self.lower < mu0 < self.upper

    def _expand(self, predicate, sign: float) -> float:
        c = sign * self._c0 * self._maxn
        for _ in range(2000):
            if predicate(self.tilt(c)):
                return c
            c *= 2.0
            if not math.isfinite(c):
                break
        raise NumericalError("could not bracket the mean multiplier")

    def solve(self, mu0: float) -> _Tilt:
        """Tilt whose weighted mean equals ``mu0`` (must be feasible)."""
        if not self.feasible(mu0):
            raise DataError(f"mu0={mu0} outside ({self.lower}, {self.upper})")
        if mu0 == self.center or self.degenerate:
            return self.tilt(0.0)
        sign = 1.0 if mu0 < self.center else -1.0
        edge = self._expand(lambda t: (t.mean - mu0) * sign < 0, sign)
        lo, hi = sorted((0.0, edge))
        c = find_root(lambda c: self.tilt(c).mean - mu0, RootBracket(lo, hi, tol=1e-13, max_iter=500))
        return self.tilt(c)

    def statistic(self, mu0: float) -> float:
        """``-2 log`` empirical likelihood ratio; ``inf`` outside the support."""
        if not self.feasible(mu0):
            return math.inf
        return self.solve(mu0).stat

    def profile(self, mu0: float) -> ElrProfile:
        if not self.feasible(mu0):
            return ElrProfile(mu0, math.inf, (), math.nan, (), feasible=False)
        t = self.solve(mu0)
        weights = tuple(w / self.H for w in t.weights)
        return ElrProfile(mu0, t.stat, weights, t.c, t.eta)

    def interval(self, alpha: float) -> tuple[float, float]:
        """``{mu : -2 log LR(mu) <= chi2_1(1 - alpha)}``."""
        if self.degenerate:
            return self.center, self.center
        crit = chisq1_quantile(1.0 - alpha)
        ends = []
        for sign in (1.0, -1.0):
            edge = self._expand(lambda t: t.stat > crit, sign)
            lo, hi = sorted((0.0, edge))
            c = find_root(
                lambda c: self.tilt(c).stat - crit, RootBracket(lo, hi, tol=1e-13, max_iter=500)
            )
            ends.append(self.tilt(c).mean)
        return ends[0], ends[1]


def rss_elr_test(data: RssDataset, mu0: float, alpha: float = 0.05) -> TestResult:
    """Empirical likelihood ratio test and interval for the RSS mean.

    The returned result carries the :class:`ElrProfile` at ``mu0`` in its
    ``profile`` attribute. A ``mu0`` outside the support gives an infinite
    statistic, p-value 0 and ``feasible=False``.
    """
    check_alpha(alpha)
    if data.kind != "continuous":
        raise DataError("ELR mean test requires a continuous dataset")
    data = data.dropna()
    el = StratifiedEL(partition_by_rank(data))
    prof = el.profile(mu0)
    lo, hi = el.interval(alpha)
    return TestResult(
        estimate=el.center,
        ci_lower=lo,
        ci_upper=hi,
        statistic=prof.neg2_log_lr,
        p_value=chisq1_sf(prof.neg2_log_lr),
        method="elr",
        alpha=alpha,
        alternative="two_sided",
        feasible=prof.feasible,
        profile=prof,
    )
