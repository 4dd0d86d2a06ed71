import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from rankset import (
    PopulationFrame,
    RssDataset,
    SamplingConfig,
    StratumStats,
    adjusted_neyman,
    integer_neyman,
    lrc_allocation,
    rss_elr_test,
    rss_sample,
    rss_t_test,
    stratum_counts,
)
from rankset.allocate import beats_balanced, ratio_consistent

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
allocations = st.lists(st.integers(0, 6), min_size=2, max_size=5).filter(lambda a: sum(a) > 0)


@settings(max_examples=60, deadline=None)
@given(alloc=allocations, seed=st.integers(0, 2**32), policy=st.sampled_from(["discard_set", "return_unmeasured"]))
def test_sampling_honours_the_allocation(alloc, seed, policy):
    cfg = SamplingConfig(len(alloc), tuple(alloc), policy, seed)
    x = np.random.default_rng(seed).normal(size=cfg.required_population())
    data = rss_sample(PopulationFrame.from_arrays(x, x), cfg)
    assert stratum_counts(data).counts == tuple(alloc)
    assert len(set(data.ids)) == len(data)


@settings(max_examples=80, deadline=None)
@given(sd=st.lists(st.floats(0.01, 10), min_size=2, max_size=6), extra=st.integers(0, 40))
def test_integer_neyman_total_and_seeding(sd, extra):
    total = len(sd) + extra
    got = integer_neyman(StratumStats.from_sd(sd), total)
    assert got.total() == total and min(got) >= 1


@settings(max_examples=60, deadline=None)
@given(
    sd=st.lists(st.floats(0.05, 5), min_size=2, max_size=4),
    original=st.lists(st.integers(1, 8), min_size=4, max_size=4),
)
def test_design_rules_never_drop_units(sd, original):
    original = tuple(original[: len(sd)])
    stats = StratumStats.from_sd(sd)
    assert adjusted_neyman(original, stats).dominates(original)
    lrc = lrc_allocation(original, stats)
    assert lrc.dominates(original)
    assert ratio_consistent(stats.sd, lrc.counts) and beats_balanced(stats.sd, lrc.counts)


strata = st.lists(st.lists(finite, min_size=2, max_size=8), min_size=1, max_size=4)


@settings(max_examples=60, deadline=None)
@given(groups=strata, shift=st.floats(-100, 100))
def test_t_interval_shifts_with_the_data(groups, shift):
    data = RssDataset.from_strata(groups)
    a, b = rss_t_test(data, mu0=0.0), rss_t_test(data.shifted(shift), mu0=shift)
    scale = 1 + abs(shift) + max(abs(v) for g in groups for v in g)
    assert abs(b.estimate - a.estimate - shift) <= 1e-9 * scale
    if np.isfinite(a.ci_lower):
        assert abs(b.ci_lower - a.ci_lower - shift) <= 1e-9 * scale


@settings(max_examples=40, deadline=None)
@given(groups=st.lists(st.lists(st.floats(-50, 50), min_size=2, max_size=8, unique=True), min_size=1, max_size=4),
       frac=st.floats(0.05, 0.95))
def test_elr_weights_satisfy_constraints(groups, frac):
    data = RssDataset.from_strata(groups)
    lo = np.mean([min(g) for g in groups])
    hi = np.mean([max(g) for g in groups])
    mu0 = lo + frac * (hi - lo)
    prof = rss_elr_test(data, mu0).profile
    H = len(groups)
    for w in prof.weights:
        assert abs(w.sum() - 1 / H) <= 1e-12
    mean = sum(float(w @ np.asarray(g)) for w, g in zip(prof.weights, groups))
    assert abs(mean - mu0) <= 1e-8 * (1 + abs(mu0))
    assert prof.neg2_log_lr >= 0
