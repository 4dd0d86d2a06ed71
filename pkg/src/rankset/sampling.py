"""Ranked set sampling from a finite population.

Each cycle serves the strata that still need observations, in ascending rank
order. For rank h a simple random sample of H units is drawn from the
current pool, ordered by the auxiliary variable, and the h-th smallest unit
is measured. Strata leave the schedule once their quota is met, which gives
the incomplete-cycle structure of unbalanced designs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal, Optional

import numpy as np

from .core import Allocation, PopulationFrame, RssDataset, RssRecord, validate_dataset
from .errors import DataError, InfeasibleError
from .numerics import seeded_rng

PoolPolicy = Literal["discard_set", "return_unmeasured"]
POOL_POLICIES = ("discard_set", "return_unmeasured")


@dataclass(frozen=True)
class SamplingConfig:
    set_size: int
    allocation: Allocation
    pool_policy: PoolPolicy = "discard_set"
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.allocation, Allocation):
            object.__setattr__(self, "allocation", Allocation(self.allocation))
        if self.set_size < 2:
            raise DataError(f"set size must be at least 2, got {self.set_size}")
        if len(self.allocation) != self.set_size:
            raise DataError(
                f"allocation length {len(self.allocation)} does not match set size {self.set_size}"
            )
        if self.allocation.total() < 1:
            raise DataError("allocation must request at least one unit")
        if self.pool_policy not in POOL_POLICIES:
            raise DataError(f"unknown pool policy {self.pool_policy!r}")

    def required_population(self) -> int:
        """Smallest population that guarantees every draw can be made."""
        H, n = self.set_size, self.allocation.total()
        if self.pool_policy == "discard_set":
            return H * n
        return n - 1 + H


def check_feasible(pop_size: int, cfg: SamplingConfig) -> None:
    need = cfg.required_population()
    if pop_size < need:
        raise InfeasibleError(
            f"population of {pop_size} units is too small: {cfg.pool_policy} with set size "
            f"{cfg.set_size} and {cfg.allocation.total()} measured units needs {need}"
        )


def draw_selection(
    x: np.ndarray,
    cfg: SamplingConfig,
    rng: np.random.Generator,
    on_set: Optional[Callable[[int, np.ndarray, int], None]] = None,
) -> list[tuple[int, int]]:
    """Run the cycle schedule and return ``(rank, population index)`` pairs.

    Pairs come back in collection order. ``on_set(rank, drawn_indices,
    chosen_index)`` is called for every ranked set, in drawing order.
    """
    check_feasible(len(x), cfg)
    H = cfg.set_size
    pool = np.arange(len(x))
    pool_size = len(pool)
    remaining = list(cfg.allocation.counts)
    picks: list[tuple[int, int]] = []
    while any(remaining):
        for h in range(1, H + 1):
            if remaining[h - 1] == 0:
                continue
            # partial Fisher-Yates: move H random pool slots to the tail
            for j in range(H):
                k = int(rng.integers(0, pool_size - j))
                last = pool_size - 1 - j
                pool[k], pool[last] = pool[last], pool[k]
            drawn = pool[pool_size - H : pool_size].copy()
            tiebreak = rng.random(H)
            order = np.lexsort((tiebreak, x[drawn]))
            pos = order[h - 1]
            chosen = int(drawn[pos])
            if on_set is not None:
                on_set(h, drawn, chosen)
            picks.append((h, chosen))
            remaining[h - 1] -= 1
            if cfg.pool_policy == "discard_set":
                pool_size -= H
            else:
                slot = pool_size - H + int(pos)
                last = pool_size - 1
                pool[slot], pool[last] = pool[last], pool[slot]
                pool_size -= 1
    return picks


def _sorted_by_rank(picks: list[tuple[int, int]]) -> list[tuple[int, int]]:
    return sorted(picks, key=lambda p: p[0])


def rss_sample(
    pop: PopulationFrame,
    cfg: SamplingConfig,
    rng: Optional[np.random.Generator] = None,
) -> RssDataset:
    """Draw a ranked set sample from ``pop``.

    Records are grouped by rank, cycle order preserved within a rank. When
    the frame has no outcome column the records carry ``y=None`` and form a
    selection sheet; units whose outcome is missing in the frame are also
    emitted with ``y=None`` for the caller to drop.
    """
    if rng is None:
        rng = seeded_rng(cfg.seed)
    picks = _sorted_by_rank(draw_selection(pop.x, cfg, rng))
    records = []
    for h, idx in picks:
        y = None
        if pop.y is not None and not np.isnan(pop.y[idx]):
            y = float(pop.y[idx])
        records.append(RssRecord(rank=h, y=y, id=pop.ids[idx]))
    return validate_dataset(RssDataset(cfg.set_size, tuple(records), "continuous"))


def rss_prop_sample(
    pop: PopulationFrame,
    cfg: SamplingConfig,
    rng: Optional[np.random.Generator] = None,
) -> RssDataset:
    """Binary variant of :func:`rss_sample` under perfect ranking (y = x)."""
    if not np.all((pop.x == 0) | (pop.x == 1)):
        raise DataError("binary sampling requires x in {0, 1} on every row")
    if rng is None:
        rng = seeded_rng(cfg.seed)
    picks = _sorted_by_rank(draw_selection(pop.x, cfg, rng))
    records = [RssRecord(rank=h, y=float(pop.x[idx]), id=pop.ids[idx]) for h, idx in picks]
    return validate_dataset(RssDataset(cfg.set_size, tuple(records), "binary"))


def srs_sample(pop: PopulationFrame, n: int, rng: np.random.Generator) -> np.ndarray:
    """Indices of a simple random sample without replacement."""
    if n > len(pop):
        raise InfeasibleError(f"cannot draw {n} units from a population of {len(pop)}")
    return rng.choice(len(pop), size=n, replace=False)
