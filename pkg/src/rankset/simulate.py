"""Synthetic ranked set samples under the linear ranking model.

The auxiliary variable is ``X = Y + e`` with ``e ~ N(0, s2)``, where
``s2`` is chosen from the outcome variance so that ``Corr(X, Y) = rho``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .core import Allocation, PopulationFrame, RssDataset, RssRecord
from .errors import DataError
from .numerics import binomial_tail, seeded_rng

Dist = Literal["normal", "t", "lognormal"]
DISTS = ("normal", "t", "lognormal")


def noise_variance_for_rho(sigma_y_sq: float, rho: float) -> float:
    if not 0.0 < rho <= 1.0:
        raise DataError(f"rho must be in (0, 1], got {rho}")
    if not sigma_y_sq > 0:
        raise DataError(f"outcome variance must be positive, got {sigma_y_sq}")
    return sigma_y_sq * (1.0 - rho * rho) / (rho * rho)


@dataclass(frozen=True)
class SimConfig:
    """Settings for :func:`rss_simulate`.

    ``t_df`` is only read for ``dist="t"`` and ``sdlog`` only for
    ``dist="lognormal"``; ``delta`` shifts the outcome additively.
    """

    set_size: int
    allocation: Allocation
    dist: Dist = "normal"
    rho: float = 1.0
    delta: float = 0.0
    t_df: float = 3.0
    sdlog: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.allocation, Allocation):
            object.__setattr__(self, "allocation", Allocation(self.allocation))
        if self.set_size < 1:
            raise DataError(f"set size must be positive, got {self.set_size}")
        if len(self.allocation) != self.set_size:
            raise DataError("allocation length does not match set size")
        if self.allocation.total() < 1:
            raise DataError("allocation must request at least one record")
        if self.dist not in DISTS:
            raise DataError(f"unknown distribution {self.dist!r}")
        if not 0.0 < self.rho <= 1.0:
            raise DataError(f"rho must be in (0, 1], got {self.rho}")
        if not self.t_df > 2:
            raise DataError(f"t_df must exceed 2, got {self.t_df}")
        if not self.sdlog > 0:
            raise DataError(f"sdlog must be positive, got {self.sdlog}")


def base_variance(dist: str, t_df: float = 3.0, sdlog: float = 1.0) -> float:
    if dist == "normal":
        return 1.0
    if dist == "t":
        return t_df / (t_df - 2.0)
    if dist == "lognormal":
        s2 = sdlog * sdlog
        return math.expm1(s2) * math.exp(s2)
    raise DataError(f"unknown distribution {dist!r}")


def base_mean(dist: str, sdlog: float = 1.0) -> float:
    if dist == "lognormal":
        return math.exp(sdlog * sdlog / 2.0)
    return 0.0


def draw_base(rng: np.random.Generator, dist: str, size, t_df: float = 3.0, sdlog: float = 1.0):
    if dist == "normal":
        return rng.standard_normal(size)
    if dist == "t":
        return rng.standard_t(t_df, size)
    if dist == "lognormal":
        return np.exp(sdlog * rng.standard_normal(size))
    raise DataError(f"unknown distribution {dist!r}")


def draw_pairs(cfg: SimConfig, rng: np.random.Generator, size) -> tuple[np.ndarray, np.ndarray]:
    """Outcome/auxiliary pairs ``(Y, X)`` of the given shape."""
    y = draw_base(rng, cfg.dist, size, cfg.t_df, cfg.sdlog) + cfg.delta
    s2 = noise_variance_for_rho(base_variance(cfg.dist, cfg.t_df, cfg.sdlog), cfg.rho)
    x = y + math.sqrt(s2) * rng.standard_normal(size) if s2 > 0 else y.copy()
    return y, x


def rss_simulate(
    cfg: SimConfig,
    rng: Optional[np.random.Generator] = None,
    return_sets: bool = False,
):
    """Simulate an RSS dataset; records come out grouped by rank.

    With ``return_sets=True`` also returns, per rank, the ``(n_h, H)``
    arrays of drawn outcomes so tests can check the order-statistic
    selection.
    """
    if rng is None:
        rng = seeded_rng(cfg.seed)
    H = cfg.set_size
    ranks: list[int] = []
    values: list[float] = []
    sets = []
    for h, n_h in enumerate(cfg.allocation.counts, start=1):
        if n_h == 0:
            sets.append(np.empty((0, H)))
            continue
        y, x = draw_pairs(cfg, rng, (n_h, H))
        pick = np.argsort(x, axis=1, kind="stable")[:, h - 1]
        chosen = y[np.arange(n_h), pick]
        ranks.extend([h] * n_h)
        values.extend(chosen.tolist())
        sets.append(y)
    data = RssDataset.from_arrays(ranks, values, set_size=H)
    return (data, sets) if return_sets else data


def rss_prop_simulate(
    H: int,
    allocation,
    p: float,
    seed: int = 0,
    rng: Optional[np.random.Generator] = None,
) -> RssDataset:
    """Binary RSS data under perfect ranking.

    The h-th smallest of H Bernoulli(p) draws is 1 exactly when at least
    ``H - h + 1`` of them are 1, so each record is drawn directly from
    Bernoulli(p_h) with that binomial tail probability.
    """
    if not 0.0 <= p <= 1.0:
        raise DataError(f"p must be in [0, 1], got {p}")
    allocation = allocation if isinstance(allocation, Allocation) else Allocation(allocation)
    if len(allocation) != H:
        raise DataError("allocation length does not match set size")
    if rng is None:
        rng = seeded_rng(seed)
    records = []
    for h, n_h in enumerate(allocation.counts, start=1):
        p_h = binomial_tail(H, H - h + 1, p)
        draws = rng.random(n_h) < p_h
        records.extend(RssRecord(rank=h, y=float(v)) for v in draws)
    return RssDataset.from_arrays(
        [r.rank for r in records], [r.y for r in records], set_size=H, kind="binary"
    )


def simulate_population(
    size: int,
    dist: Dist = "normal",
    rho: float = 1.0,
    delta: float = 0.0,
    t_df: float = 3.0,
    sdlog: float = 1.0,
    seed: int = 0,
) -> PopulationFrame:
    """A finite population of ``(ID, X, Y)`` rows from the linear ranking model."""
    if size < 1:
        raise DataError("population size must be positive")
    cfg = SimConfig(1, Allocation([1]), dist, rho, delta, t_df, sdlog, seed)
    y, x = draw_pairs(cfg, seeded_rng(seed), size)
    return PopulationFrame.from_arrays(x=x, y=y)
