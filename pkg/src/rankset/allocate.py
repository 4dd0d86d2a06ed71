"""Sample allocation for unbalanced ranked set sampling designs.

All integer rules work on the same objective, the estimated variance of
the RSS mean ``(1/H^2) * sum_h s_h^2 / n_h``.
"""
from __future__ import annotations

import heapq
import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Allocation, DesignReport, RssDataset, partition_by_rank, stratum_counts
from .errors import DataError, InfeasibleError, NumericalError
from .numerics import binomial_tail

INTEGER_RULES = ("integer_neyman", "adjusted_neyman", "lrc")

_MAX_LRC_TOTAL = 4096


class AllocationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class StratumStats:
    sd: tuple[float, ...]
    counts: Allocation

    def __post_init__(self):
        sd = tuple(float(s) for s in self.sd)
        if any(not math.isfinite(s) or s < 0 for s in sd):
            raise DataError(f"stratum standard deviations must be finite and >= 0, got {sd}")
        counts = self.counts if isinstance(self.counts, Allocation) else Allocation(self.counts)
        if len(counts) != len(sd):
            raise DataError("sd and counts have different lengths")
        object.__setattr__(self, "sd", sd)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_sd(cls, sd: Sequence[float]) -> "StratumStats":
        """Stats known only through their standard deviations."""
        return cls(tuple(sd), Allocation([2] * len(sd)))

    @classmethod
    def from_data(cls, data: RssDataset) -> "StratumStats":
        groups = partition_by_rank(data.dropna())
        for h, g in enumerate(groups, start=1):
            if len(g) < 2:
                raise DataError(
                    f"stratum {h} has {len(g)} observation(s); at least 2 are needed for its variance"
                )
        return cls(tuple(float(np.std(g, ddof=1)) for g in groups), Allocation(len(g) for g in groups))

    @property
    def set_size(self) -> int:
        return len(self.sd)


def _as_alloc(a) -> Allocation:
    return a if isinstance(a, Allocation) else Allocation(a)


def _sum_sq_over_n(sd: Sequence[float], counts: Sequence[int]) -> float:
    total = 0.0
    for s, n in zip(sd, counts):
        if s == 0:
            continue
        if n == 0:
            raise DataError("zero count in a stratum with positive standard deviation")
        total += s * s / n
    return total


def estimated_variance(stats: StratumStats, alloc) -> float:
    alloc = _as_alloc(alloc)
    if len(alloc) != stats.set_size:
        raise DataError("allocation length does not match the number of strata")
    H = stats.set_size
    return _sum_sq_over_n(stats.sd, alloc.counts) / (H * H)


def balanced_allocation(H: int, total: int) -> Allocation:
    base, extra = divmod(total, H)
    return Allocation(base + (1 if h < extra else 0) for h in range(H))


def integer_neyman(stats: StratumStats, total: int) -> Allocation:
    """Integer allocation of ``total`` units minimizing ``sum s_h^2 / n_h``.

    Every stratum is seeded with one unit; each further unit goes to the
    stratum with the largest priority ``s_h / sqrt(k_h (k_h + 1))``, ties to
    the lowest rank. If all ``s_h`` are zero the balanced allocation is
    returned with an :class:`AllocationWarning`.
    """
    H = stats.set_size
    if total < H:
        raise DataError(f"total {total} is smaller than the number of strata {H}")
    if all(s == 0 for s in stats.sd):
        warnings.warn(
            "all stratum standard deviations are zero; returning the balanced allocation",
            AllocationWarning,
            stacklevel=2,
        )
        return balanced_allocation(H, total)
    counts = [1] * H
    heap = [(-s / math.sqrt(2.0), h) for h, s in enumerate(stats.sd)]
    heapq.heapify(heap)
    for _ in range(total - H):
        _, h = heapq.heappop(heap)
        counts[h] += 1
        k = counts[h]
        heapq.heappush(heap, (-stats.sd[h] / math.sqrt(k * (k + 1.0)), h))
    return Allocation(counts)


def adjusted_neyman(original, stats: StratumStats) -> Allocation:
    """Componentwise maximum of ``original`` and the integer Neyman
    allocation at the original total: collected units are never dropped."""
    original = _as_alloc(original)
    target = integer_neyman(stats, original.total())
    return combine_adjusted(original, target)


def combine_adjusted(original, neyman) -> Allocation:
    original, neyman = _as_alloc(original), _as_alloc(neyman)
    if len(original) != len(neyman):
        raise DataError("allocations have different set sizes")
    return Allocation(max(a, b) for a, b in zip(original, neyman))


def ratio_consistent(sd: Sequence[float], counts: Sequence[int]) -> bool:
    """True when a stratum with larger sd never has fewer units."""
    H = len(sd)
    return all(
        counts[i] >= counts[j] for i in range(H) for j in range(H) if sd[i] > sd[j]
    )


def beats_balanced(sd: Sequence[float], counts: Sequence[int]) -> bool:
    """URSS variance no larger than the balanced design of the same total."""
    N, H = sum(counts), len(counts)
    ss = sum(s * s for s in sd)
    lhs = _sum_sq_over_n(sd, counts)
    rhs = H * ss / N
    return lhs <= rhs * (1 + 1e-12)


def _chain_dp(sd, lower, order, t_max):
    """Min of ``sum s^2/n`` over allocations with ``n >= lower`` that are
    non-decreasing along ``order``, for every total up to ``t_max``.

    Returns ``(best, pick)`` where ``best[t]`` is the minimum at total t and
    ``pick(t)`` rebuilds an optimal allocation.
    """
    size = t_max + 1
    m = np.arange(size, dtype=float)
    layers = []
    prev = None
    for k, i in enumerate(order):
        s2 = sd[i] * sd[i]
        with np.errstate(divide="ignore"):
            cost = np.where(m > 0, s2 / np.maximum(m, 1.0), np.inf if s2 > 0 else 0.0)
        cost[: lower[i]] = np.inf
        cur = np.full((size, size), np.inf)
        arg = np.zeros((size, size), dtype=np.int32)
        if prev is None:
            idx = np.arange(size)
            cur[idx, idx] = cost
        else:
            pm = np.minimum.accumulate(prev, axis=0)
            # position of the prefix minimum, for reconstruction
            am = np.zeros_like(arg)
            for r in range(1, size):
                better = prev[r] < pm[r - 1]
                am[r] = np.where(better, r, am[r - 1])
            for r in range(lower[i], size):
                if not np.isfinite(cost[r]):
                    continue
                cur[r, r:] = cost[r] + pm[r, : size - r]
                arg[r, r:] = am[r, : size - r]
        layers.append(arg)
        prev = cur
    last = prev
    best = last.min(axis=0)

    def pick(t):
        counts = [0] * len(sd)
        r = int(np.argmin(last[:, t]))
        for k in range(len(order) - 1, -1, -1):
            counts[order[k]] = r
            r_prev = int(layers[k][r, t])
            t -= r
            r = r_prev
        return counts

    return best, pick


def _tie_orders(sd, max_orders=5040):
    groups: dict[float, list[int]] = {}
    for i in sorted(range(len(sd)), key=lambda i: sd[i]):
        groups.setdefault(sd[i], []).append(i)
    blocks = list(groups.values())
    n_orders = math.prod(math.factorial(len(b)) for b in blocks)
    if n_orders > max_orders:
        raise NumericalError(f"too many tied standard deviations ({n_orders} orderings)")
    for combo in itertools.product(*(itertools.permutations(b) for b in blocks)):
        yield [i for block in combo for i in block]


def lrc_allocation(original, stats: StratumStats) -> Allocation:
    """Smallest extension of ``original`` that beats the balanced design
    at its own total and is ordered like the stratum sds.

    Among the allocations with the minimal total, the one with the smallest
    estimated variance is returned.
    """
    original = _as_alloc(original)
    H = stats.set_size
    if len(original) != H:
        raise DataError("allocation length does not match the number of strata")
    if original.total() < H:
        raise DataError(f"original total {original.total()} is smaller than the number of strata")
    sd = stats.sd
    if all(s == 0 for s in sd):
        raise InfeasibleError("all stratum standard deviations are zero")
    lower = list(original.counts)
    if ratio_consistent(sd, lower) and beats_balanced(sd, lower):
        return original
    if len(set(sd)) == 1:
        # equal sds: only the balanced design qualifies
        return Allocation([max(lower)] * H)
    ss = sum(s * s for s in sd)
    t_max = max(2 * original.total(), H * max(lower), 16)
    while t_max <= _MAX_LRC_TOTAL:
        found = None
        for order in _tie_orders(sd):
            best, pick = _chain_dp(sd, lower, order, t_max)
            for t in range(original.total(), t_max + 1):
                if found is not None and t > found[0]:
                    break
                if best[t] <= H * ss / t * (1 + 1e-12):
                    if found is None or t < found[0] or best[t] < found[1]:
                        found = (t, best[t], pick(t))
                    break
        if found is not None:
            return Allocation(found[2])
        t_max *= 2
    raise NumericalError("no LRC allocation found within the total limit")


def stratum_proportions(p: float, H: int) -> list[float]:
    """Perfect-ranking success probability of each rank stratum."""
    return [binomial_tail(H, H - h + 1, p) for h in range(1, H + 1)]


def neyman_proportion(p_hat: float, H: int, total: float) -> tuple[float, ...]:
    """Real-valued Neyman allocation for a proportion under perfect ranking."""
    if not 0.0 < p_hat < 1.0:
        raise InfeasibleError(f"p_hat must be strictly between 0 and 1, got {p_hat}")
    w = [math.sqrt(q * (1.0 - q)) for q in stratum_proportions(p_hat, H)]
    sw = sum(w)
    return tuple(total * wh / sw for wh in w)


def design_report(data: RssDataset, prop: bool = False) -> DesignReport:
    """Evaluate the allocation of ``data`` and recommend improved ones."""
    data = data.dropna()
    original = stratum_counts(data)
    if prop:
        if data.kind != "binary":
            raise DataError("proportion design requires a binary dataset")
        from .infer import rss_proportion

        p_hat = rss_proportion(data)
        alloc = neyman_proportion(p_hat, data.set_size, float(original.total()))
        return DesignReport(original, {"neyman_proportion": alloc}, {})
    if data.kind != "continuous":
        raise DataError("mean design requires a continuous dataset; pass prop=True for binary data")
    stats = StratumStats.from_data(data)
    notes = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AllocationWarning)
        neyman = integer_neyman(stats, original.total())
    notes.extend(str(w.message) for w in caught)
    recs = {
        "integer_neyman": neyman,
        "adjusted_neyman": combine_adjusted(original, neyman),
    }
    if any(s > 0 for s in stats.sd):
        recs["lrc"] = lrc_allocation(original, stats)
    else:
        recs["lrc"] = original
        notes.append("LRC allocation undefined for zero variances; original kept")
    additions = {name: recs[name] - original for name in INTEGER_RULES}
    return DesignReport(original, recs, additions, tuple(notes))
