"""Monte Carlo coverage studies comparing RSS designs with SRS.

Replicate ``r`` draws from its own generator seeded by ``(seed, r)``, so
the aggregate does not depend on execution order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
from scipy import stats

from .allocate import balanced_allocation, design_report
from .core import Allocation, PopulationFrame, RssDataset, RssRecord
from .errors import DataError, InfeasibleError, RankSetError
from .infer import rss_auc_estimate, rss_auc_test, rss_t_test, srs_t_test
from .io import read_population
from .numerics import spawn_rng
from .sampling import SamplingConfig, draw_selection
from .simulate import simulate_population

SCENARIOS = ("one_sample_mean", "two_sample_auc")

ONE_SAMPLE_DEFAULT_POP = {
    "dist": "lognormal",
    "sdlog": 0.3,
    "rho": 0.9,
    "delta": 0.0,
    "size": 10000,
}
TWO_SAMPLE_DEFAULT_POPS = (
    {"dist": "normal", "rho": 0.8, "delta": 0.0, "size": 5000},
    {"dist": "normal", "rho": 0.8, "delta": 1.7345, "size": 5000},
)


@dataclass(frozen=True)
class BenchConfig:
    scenario: str = "one_sample_mean"
    replicates: int = 500
    set_size: int = 3
    allocations: tuple = ((10, 10, 10),)
    populations: tuple = (ONE_SAMPLE_DEFAULT_POP,)
    missing_rate: float = 0.1
    alpha: float = 0.05
    seed: int = 2024

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise DataError(f"unknown scenario {self.scenario!r}")
        if self.replicates < 1:
            raise DataError("replicates must be at least 1")
        if not 0.0 <= self.missing_rate < 1.0:
            raise DataError(f"missing_rate must be in [0, 1), got {self.missing_rate}")
        if not 0.0 < self.alpha < 1.0:
            raise DataError(f"alpha must be in (0, 1), got {self.alpha}")
        allocs = tuple(tuple(int(c) for c in a) for a in self.allocations)
        for a in allocs:
            if len(a) != self.set_size:
                raise DataError(f"allocation {list(a)} does not match set size {self.set_size}")
        need = 1 if self.scenario == "one_sample_mean" else 2
        if len(allocs) != need or len(self.populations) != need:
            raise DataError(f"{self.scenario} needs {need} allocation(s) and population(s)")
        object.__setattr__(self, "allocations", allocs)
        object.__setattr__(self, "populations", tuple(self.populations))

    @classmethod
    def from_dict(cls, raw: dict) -> "BenchConfig":
        raw = dict(raw)
        scenario = raw.get("scenario", "one_sample_mean")
        if "population" in raw:
            raw["populations"] = [raw.pop("population")]
        if scenario == "two_sample_auc":
            raw.setdefault("allocations", [[5, 10, 15], [15, 10, 5]])
            raw.setdefault("populations", list(TWO_SAMPLE_DEFAULT_POPS))
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise DataError(f"unknown bench config keys: {sorted(unknown)}")
        return cls(**raw)

    @classmethod
    def from_json(cls, path) -> "BenchConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
        cfg = cls.from_dict(raw)
        base = Path(path).parent
        pops = []
        for source in cfg.populations:
            if isinstance(source, str):
                source = {"csv": source}
            if "csv" in source and not Path(source["csv"]).is_absolute():
                source = {**source, "csv": str(base / source["csv"])}
            pops.append(source)
        return cls(**{**cfg.__dict__, "populations": tuple(pops)})


@dataclass(frozen=True)
class BenchRow:
    method: str
    mean_n: float
    coverage: float
    mean_ci_length: float


@dataclass
class BenchResult:
    rows: list
    truth: float
    replicates: int
    skipped: int = 0
    notes: list = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["method,mean_n,coverage,mean_ci_length"]
        for r in self.rows:
            lines.append(f"{r.method},{r.mean_n:.7g},{r.coverage:.7g},{r.mean_ci_length:.7g}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        width = max(len(r.method) for r in self.rows)
        out = [f"{'method':<{width}}  {'mean_n':>10}  {'coverage':>10}  {'ci_length':>10}"]
        for r in self.rows:
            out.append(
                f"{r.method:<{width}}  {r.mean_n:>10.7g}  {r.coverage:>10.7g}  {r.mean_ci_length:>10.7g}"
            )
        out.append(f"true value: {self.truth:.7g}; replicates: {self.replicates}, skipped: {self.skipped}")
        return "\n".join(out) + "\n"

    def row(self, method: str) -> BenchRow:
        return next(r for r in self.rows if r.method == method)


def load_population(source: Any, seed: int) -> PopulationFrame:
    """Population from ``{"csv": path}`` or a synthetic description
    ``{"dist", "rho", "delta", "t_df", "sdlog", "size"}``."""
    if isinstance(source, str):
        source = {"csv": source}
    if "csv" in source:
        pop = read_population(source["csv"])
        if not pop.has_y:
            raise DataError(f"{source['csv']}: bench populations need a Y column")
        return pop
    source = dict(source)
    size = int(source.pop("size", 10000))
    pop_seed = int(source.pop("seed", seed))
    allowed = {"dist", "rho", "delta", "t_df", "sdlog"}
    if set(source) - allowed:
        raise DataError(f"unknown synthetic population keys: {sorted(set(source) - allowed)}")
    return simulate_population(size, seed=pop_seed, **source)


class _Tally:
    def __init__(self):
        self.n, self.hit, self.length = [], [], []

    def add(self, n: int, lo: float, hi: float, truth: float):
        self.n.append(n)
        self.hit.append(lo <= truth <= hi)
        self.length.append(hi - lo)

    def row(self, name: str) -> BenchRow:
        if not self.n:
            return BenchRow(name, math.nan, math.nan, math.nan)
        return BenchRow(
            name, float(np.mean(self.n)), float(np.mean(self.hit)), float(np.mean(self.length))
        )


def _rss_from_pool(pop: PopulationFrame, pool: np.ndarray, alloc, H: int, rng):
    """RSS from the units ``pool`` of ``pop``; returns records and drawn indices."""
    cfg = SamplingConfig(H, Allocation(alloc), "discard_set")
    drawn: list[int] = []
    picks = draw_selection(pop.x[pool], cfg, rng, on_set=lambda h, d, c: drawn.extend(d.tolist()))
    picks.sort(key=lambda p: p[0])
    records = [(h, int(pool[i])) for h, i in picks]
    return records, pool[np.asarray(drawn, dtype=int)]


def bench_one_sample_mean(cfg: BenchConfig, pop: Optional[PopulationFrame] = None) -> BenchResult:
    """Original URSS (BRSS with missing outcomes), design-updated RSS and
    an SRS of the updated size, each with a t interval for the mean."""
    if cfg.scenario != "one_sample_mean":
        raise DataError("config is not a one_sample_mean scenario")
    if pop is None:
        pop = load_population(cfg.populations[0], cfg.seed)
    if not pop.has_y:
        raise DataError("population needs outcomes")
    observed = np.flatnonzero(~np.isnan(pop.y))
    truth = float(np.mean(pop.y[observed]))
    H = cfg.set_size
    tallies = {k: _Tally() for k in ("original_urss", "updated_rss", "srs")}
    skipped = 0
    notes: list[str] = []
    all_units = np.arange(len(pop))
    for rep in range(cfg.replicates):
        rng = spawn_rng(cfg.seed, rep)
        try:
            picks, drawn = _rss_from_pool(pop, all_units, cfg.allocations[0], H, rng)
            miss = rng.random(len(picks)) < cfg.missing_rate
            kept = [
                RssRecord(h, float(pop.y[i]), pop.ids[i])
                for (h, i), m in zip(picks, miss)
                if not m and not np.isnan(pop.y[i])
            ]
            original = RssDataset(H, tuple(kept))
            t_org = rss_t_test(original, mu0=truth, alpha=cfg.alpha, df_method="sample")

            report = design_report(original)
            choice = min(
                ("adjusted_neyman", "lrc"), key=lambda k: sum(report.additions[k])
            )
            add = report.additions[choice]
            updated = original
            if sum(add) > 0:
                pool = np.setdiff1d(all_units, drawn, assume_unique=True)
                extra, _ = _rss_from_pool(pop, pool, add, H, rng)
                recs = tuple(
                    RssRecord(h, float(pop.y[i]), pop.ids[i])
                    for h, i in extra
                    if not np.isnan(pop.y[i])
                )
                updated = RssDataset(H, original.records + recs)
            t_upd = rss_t_test(updated, mu0=truth, alpha=cfg.alpha, df_method="sample")

            n_srs = len(updated)
            srs_idx = rng.choice(observed, size=n_srs, replace=False)
            t_srs = srs_t_test(pop.y[srs_idx], mu0=truth, alpha=cfg.alpha)
        except RankSetError as exc:
            skipped += 1
            if len(notes) < 5:
                notes.append(f"replicate {rep}: {exc}")
            continue
        tallies["original_urss"].add(len(original), t_org.ci_lower, t_org.ci_upper, truth)
        tallies["updated_rss"].add(len(updated), t_upd.ci_lower, t_upd.ci_upper, truth)
        tallies["srs"].add(n_srs, t_srs.ci_lower, t_srs.ci_upper, truth)
    rows = [t.row(k) for k, t in tallies.items()]
    return BenchResult(rows, truth, cfg.replicates, skipped, notes)


def population_auc(y1: np.ndarray, y2: np.ndarray) -> float:
    """``P(Y2 > Y1) + P(Y2 = Y1)/2`` over all cross pairs, via mid-ranks."""
    ranks = stats.rankdata(np.concatenate([y1, y2]))
    n1, n2 = len(y1), len(y2)
    r2 = ranks[n1:].sum()
    return float((r2 - n2 * (n2 + 1) / 2.0) / (n1 * n2))


def _auc_interval(d1: RssDataset, d2: RssDataset, delta0: float, alpha: float):
    try:
        res = rss_auc_test(d1, d2, delta0=delta0, alpha=alpha)
        return res.ci_lower, res.ci_upper
    except InfeasibleError:
        # all pseudo-values tie: the interval collapses onto the estimate
        est = rss_auc_estimate(d1, d2)
        return est, est


def bench_two_sample_auc(cfg: BenchConfig, pops=None) -> BenchResult:
    """URSS, BRSS and SRS interval estimates of the AUC between two groups."""
    if cfg.scenario != "two_sample_auc":
        raise DataError("config is not a two_sample_auc scenario")
    if pops is None:
        pops = [load_population(source, cfg.seed + g) for g, source in enumerate(cfg.populations)]
    for p in pops:
        if not p.has_y:
            raise DataError("population needs outcomes")
    ys = [p.y[~np.isnan(p.y)] for p in pops]
    truth = population_auc(ys[0], ys[1])
    if not 0.0 < truth < 1.0:
        raise DataError(f"population AUC {truth} leaves nothing to estimate")
    H = cfg.set_size
    urss_alloc = cfg.allocations
    brss_alloc = [balanced_allocation(H, sum(a)).counts for a in urss_alloc]
    tallies = {k: _Tally() for k in ("urss", "brss", "srs")}
    skipped = 0
    notes: list[str] = []

    def rss_pair(allocs, rng):
        out = []
        for pop, alloc in zip(pops, allocs):
            picks, _ = _rss_from_pool(pop, np.arange(len(pop)), alloc, H, rng)
            recs = tuple(RssRecord(h, float(pop.y[i]), pop.ids[i]) for h, i in picks)
            out.append(RssDataset(H, recs).dropna())
        return out

    for rep in range(cfg.replicates):
        rng = spawn_rng(cfg.seed, rep)
        try:
            u1, u2 = rss_pair(urss_alloc, rng)
            b1, b2 = rss_pair(brss_alloc, rng)
            s = [
                RssDataset.from_arrays([1] * sum(a), rng.choice(y, size=sum(a), replace=False), set_size=1)
                for y, a in zip(ys, urss_alloc)
            ]
            results = {
                "urss": (len(u1) + len(u2), _auc_interval(u1, u2, truth, cfg.alpha)),
                "brss": (len(b1) + len(b2), _auc_interval(b1, b2, truth, cfg.alpha)),
                "srs": (len(s[0]) + len(s[1]), _auc_interval(s[0], s[1], truth, cfg.alpha)),
            }
        except RankSetError as exc:
            skipped += 1
            if len(notes) < 5:
                notes.append(f"replicate {rep}: {exc}")
            continue
        for k, (n, (lo, hi)) in results.items():
            tallies[k].add(n, lo, hi, truth)
    rows = [t.row(k) for k, t in tallies.items()]
    return BenchResult(rows, truth, cfg.replicates, skipped, notes)


def run_bench(cfg: BenchConfig) -> BenchResult:
    if cfg.scenario == "one_sample_mean":
        return bench_one_sample_mean(cfg)
    return bench_two_sample_auc(cfg)
