"""Shared domain types for ranked set samples.

Ranks are 1-based throughout. A dataset keeps its records in the order they
were collected, so within a rank stratum the r-th record is the r-th
measurement of that stratum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Literal, Mapping, Optional, Sequence

import numpy as np

from .errors import DataError

Kind = Literal["continuous", "binary"]
Alternative = Literal["two_sided", "less", "greater"]

KINDS = ("continuous", "binary")
ALTERNATIVES = ("two_sided", "less", "greater")
METHODS = ("z", "t", "elr", "sign", "prop", "auc")


def normalize_alternative(alternative: str) -> str:
    """Accept ``two.sided`` / ``two-sided`` / ``two_sided`` spellings."""
    alt = alternative.strip().lower().replace(".", "_").replace("-", "_")
    if alt not in ALTERNATIVES:
        raise DataError(f"unknown alternative {alternative!r}")
    return alt


@dataclass(frozen=True)
class RssRecord:
    rank: int
    y: Optional[float] = None
    id: Any = None

    @property
    def missing(self) -> bool:
        return self.y is None or (isinstance(self.y, float) and math.isnan(self.y))


@dataclass(frozen=True)
class Allocation:
    """Per-stratum sample counts ``(n_1, ..., n_H)``."""

    counts: tuple[int, ...]

    def __init__(self, counts: Iterable[int]):
        values = []
        for c in counts:
            if isinstance(c, float):
                if not c.is_integer():
                    raise DataError(f"allocation counts must be integers, got {c}")
            ic = int(c)
            if ic < 0:
                raise DataError(f"allocation counts must be non-negative, got {ic}")
            values.append(ic)
        object.__setattr__(self, "counts", tuple(values))

    def total(self) -> int:
        return sum(self.counts)

    @property
    def set_size(self) -> int:
        return len(self.counts)

    @property
    def balanced(self) -> bool:
        return len(set(self.counts)) <= 1

    def __len__(self) -> int:
        return len(self.counts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.counts)

    def __getitem__(self, i):
        return self.counts[i]

    def __sub__(self, other) -> tuple[int, ...]:
        other = tuple(other)
        if len(other) != len(self):
            raise DataError("allocations have different set sizes")
        return tuple(a - b for a, b in zip(self.counts, other))

    def dominates(self, other) -> bool:
        other = tuple(other)
        if len(other) != len(self):
            raise DataError("allocations have different set sizes")
        return all(a >= b for a, b in zip(self.counts, other))

    def __repr__(self) -> str:
        return f"Allocation({list(self.counts)})"


@dataclass(frozen=True)
class RssDataset:
    """An RSS sample: records ``(rank, id, y)`` with a fixed set size H."""

    set_size: int
    records: tuple[RssRecord, ...]
    kind: Kind = "continuous"

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))

    @classmethod
    def from_arrays(
        cls,
        ranks: Sequence[int],
        y: Optional[Sequence[Optional[float]]] = None,
        *,
        set_size: Optional[int] = None,
        ids: Optional[Sequence[Any]] = None,
        kind: Kind = "continuous",
    ) -> "RssDataset":
        ranks = [int(r) for r in ranks]
        if set_size is None:
            set_size = max(ranks) if ranks else 0
        if y is None:
            y = [None] * len(ranks)
        if ids is None:
            ids = [None] * len(ranks)
        if not (len(ranks) == len(y) == len(ids)):
            raise DataError("ranks, y and ids must have equal length")
        records = [
            RssRecord(rank=r, y=_as_outcome(v), id=i) for r, v, i in zip(ranks, y, ids)
        ]
        return validate_dataset(cls(set_size=int(set_size), records=tuple(records), kind=kind))

    @classmethod
    def from_strata(
        cls, strata: Sequence[Sequence[float]], kind: Kind = "continuous"
    ) -> "RssDataset":
        """Build from one outcome list per rank, ``strata[h-1]`` for rank h."""
        ranks = [h + 1 for h, ys in enumerate(strata) for _ in ys]
        ys = [v for vals in strata for v in vals]
        return cls.from_arrays(ranks, ys, set_size=len(strata), kind=kind)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def ranks(self) -> np.ndarray:
        return np.array([r.rank for r in self.records], dtype=int)

    @property
    def y(self) -> np.ndarray:
        return np.array(
            [np.nan if r.missing else float(r.y) for r in self.records], dtype=float
        )

    @property
    def ids(self) -> list:
        return [r.id for r in self.records]

    @property
    def has_ids(self) -> bool:
        return any(r.id is not None for r in self.records)

    @property
    def has_y(self) -> bool:
        return any(not r.missing for r in self.records)

    @property
    def has_missing(self) -> bool:
        return any(r.missing for r in self.records)

    @property
    def balanced(self) -> bool:
        return stratum_counts(self).balanced

    def dropna(self) -> "RssDataset":
        """Drop records whose outcome is missing."""
        kept = tuple(r for r in self.records if not r.missing)
        return RssDataset(self.set_size, kept, self.kind)

    def with_kind(self, kind: Kind) -> "RssDataset":
        return validate_dataset(RssDataset(self.set_size, self.records, kind))

    def concat(self, other: "RssDataset") -> "RssDataset":
        if other.set_size != self.set_size or other.kind != self.kind:
            raise DataError("cannot concatenate datasets with different set size or kind")
        return RssDataset(self.set_size, self.records + other.records, self.kind)

    def shifted(self, c: float) -> "RssDataset":
        """Copy with ``c`` added to every observed outcome."""
        recs = tuple(
            r if r.missing else RssRecord(r.rank, float(r.y) + c, r.id) for r in self.records
        )
        return RssDataset(self.set_size, recs, self.kind)


def _as_outcome(v) -> Optional[float]:
    if v is None:
        return None
    v = float(v)
    if math.isnan(v):
        return None
    return v


def validate_dataset(data: RssDataset) -> RssDataset:
    """Check the dataset invariants and return it unchanged."""
    if data.kind not in KINDS:
        raise DataError(f"unknown dataset kind {data.kind!r}")
    if data.set_size < 1:
        raise DataError(f"set size must be positive, got {data.set_size}")
    if not data.records:
        raise DataError("empty dataset")
    for i, rec in enumerate(data.records):
        if not 1 <= rec.rank <= data.set_size:
            raise DataError(
                f"rank out of range: record {i} has rank {rec.rank}, set size is {data.set_size}"
            )
        if rec.missing:
            continue
        if not math.isfinite(float(rec.y)):
            raise DataError(f"non-finite outcome in record {i}")
        if data.kind == "binary" and float(rec.y) not in (0.0, 1.0):
            raise DataError(f"non-binary outcome {rec.y} in record {i}")
    return data


def stratum_counts(data: RssDataset) -> Allocation:
    counts = [0] * data.set_size
    for rec in data.records:
        counts[rec.rank - 1] += 1
    return Allocation(counts)


def partition_by_rank(data: RssDataset) -> list[np.ndarray]:
    """Outcomes grouped by rank, in record order; index 0 holds rank 1."""
    groups: list[list[float]] = [[] for _ in range(data.set_size)]
    for rec in data.records:
        groups[rec.rank - 1].append(np.nan if rec.missing else float(rec.y))
    return [np.asarray(g, dtype=float) for g in groups]


@dataclass(frozen=True)
class PopulationFrame:
    """A finite population: unit ids, auxiliary ``x`` and optional outcome ``y``.

    Missing outcomes are stored as NaN. ``y is None`` means the frame has no
    outcome column at all.
    """

    ids: tuple
    x: np.ndarray
    y: Optional[np.ndarray] = None

    def __post_init__(self):
        ids = tuple(self.ids)
        x = np.array(self.x, dtype=float)
        if x.ndim != 1 or len(x) != len(ids):
            raise DataError("ids and x must be one-dimensional and of equal length")
        if not np.all(np.isfinite(x)):
            raise DataError("auxiliary variable x must be present and finite on every row")
        if len(set(ids)) != len(ids):
            raise DataError("population ids are not unique")
        x.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "x", x)
        if self.y is not None:
            y = np.array(
                [np.nan if v is None else v for v in self.y], dtype=float
            )
            if len(y) != len(ids):
                raise DataError("y must have one entry per population row")
            y.setflags(write=False)
            object.__setattr__(self, "y", y)

    @classmethod
    def from_arrays(cls, x, y=None, ids=None) -> "PopulationFrame":
        x = np.asarray(x, dtype=float)
        if ids is None:
            ids = range(1, len(x) + 1)
        return cls(ids=tuple(ids), x=x, y=y)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def has_y(self) -> bool:
        return self.y is not None

    def subset(self, index) -> "PopulationFrame":
        index = np.asarray(index, dtype=int)
        return PopulationFrame(
            ids=tuple(self.ids[i] for i in index),
            x=self.x[index],
            y=None if self.y is None else self.y[index],
        )


@dataclass(frozen=True)
class TestResult:
    estimate: float
    ci_lower: float
    ci_upper: float
    statistic: float
    p_value: float
    method: str
    alpha: float = 0.05
    alternative: str = "two_sided"
    df: Optional[float] = None
    feasible: bool = True
    profile: Any = field(default=None, compare=False, repr=False)

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.method not in METHODS:
            raise DataError(f"unknown method {self.method!r}")
        if self.alternative not in ALTERNATIVES:
            raise DataError(f"unknown alternative {self.alternative!r}")
        if not 0.0 < self.alpha < 1.0:
            raise DataError(f"alpha must be in (0, 1), got {self.alpha}")
        object.__setattr__(self, "p_value", min(1.0, max(0.0, float(self.p_value))))

    @property
    def ci(self) -> tuple[float, float]:
        return (self.ci_lower, self.ci_upper)

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "ci": [self.ci_lower, self.ci_upper],
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "method": self.method,
            "alpha": self.alpha,
            "alternative": self.alternative.replace("_", "."),
            "feasible": self.feasible,
        }


@dataclass(frozen=True)
class DesignReport:
    original: Allocation
    recommendations: Mapping[str, Any]
    additions: Mapping[str, tuple[int, ...]]
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        out: dict = {"original": list(self.original.counts)}
        for name, alloc in self.recommendations.items():
            out[name] = list(alloc.counts) if isinstance(alloc, Allocation) else list(alloc)
        out["additions"] = {k: list(v) for k, v in self.additions.items()}
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out
