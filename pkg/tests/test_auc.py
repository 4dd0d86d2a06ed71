import numpy as np
import pytest

from rankset import DataError, InfeasibleError, RssDataset, SimConfig, rss_auc_estimate, rss_auc_test, rss_simulate
from rankset.infer import auc_pseudo_values
from rankset.numerics import spawn_rng


def single(values):
    return RssDataset.from_arrays([1] * len(values), values, set_size=1)


@pytest.mark.parametrize(
    "g1, g2, expected",
    [([1, 2], [3], 1.0), ([1, 3], [3], 0.75), ([1, 2, 5], [1, 2, 5], 0.5)],
)
def test_estimate_examples(g1, g2, expected):
    assert rss_auc_estimate(single(g1), single(g2)) == pytest.approx(expected, abs=1e-15)


def test_single_stratum_equals_mann_whitney_double_loop():
    rng = np.random.default_rng(1)
    y1, y2 = np.round(rng.normal(0, 1, 17), 1), np.round(rng.normal(0.4, 1, 23), 1)
    u = sum((b > a) + 0.5 * (b == a) for a in y1 for b in y2)
    assert rss_auc_estimate(single(y1), single(y2)) == pytest.approx(u / (17 * 23), abs=1e-14)


def _weighted_auc(groups1, groups2):
    H1, H2 = len(groups1), len(groups2)
    total = 0.0
    for g1 in groups1:
        for g2 in groups2:
            for a in g1:
                for b in g2:
                    k = 1.0 if b > a else 0.5 if b == a else 0.0
                    total += k / (H1 * len(g1) * H2 * len(g2))
    return total


def test_stratified_estimate_against_loops():
    rng = np.random.default_rng(2)
    g1 = [list(rng.normal(0, 1, n)) for n in (3, 5, 4)]
    g2 = [list(rng.normal(1, 1, n)) for n in (6, 2, 3)]
    got = rss_auc_estimate(RssDataset.from_strata(g1), RssDataset.from_strata(g2))
    assert got == pytest.approx(_weighted_auc(g1, g2), abs=1e-14)


def test_pseudo_values_against_explicit_deletion():
    rng = np.random.default_rng(3)
    d1 = RssDataset.from_strata([rng.normal(0, 1, n) for n in (3, 4, 2)])
    d2 = RssDataset.from_strata([rng.normal(0.7, 1, n) for n in (2, 5, 3)])
    est, pseudo = auc_pseudo_values(d1, d2)
    N = len(d1) + len(d2)
    explicit = []
    for which, data in ((0, d1), (1, d2)):
        for i in range(len(data)):
            rest = RssDataset(data.set_size, data.records[:i] + data.records[i + 1 :])
            pair = (rest, d2) if which == 0 else (d1, rest)
            explicit.append(N * est - (N - 1) * rss_auc_estimate(*pair))
    assert np.allclose(pseudo, explicit, atol=1e-12)
    assert pseudo.mean() == pytest.approx(est, abs=1e-12)


def test_statistic_vanishes_at_the_estimate():
    rng = np.random.default_rng(4)
    d1 = RssDataset.from_strata([rng.normal(0, 1, 6) for _ in range(3)])
    d2 = RssDataset.from_strata([rng.normal(0.5, 1, 6) for _ in range(3)])
    est = rss_auc_estimate(d1, d2)
    res = rss_auc_test(d1, d2, delta0=est)
    assert res.statistic <= 1e-6 and res.p_value == pytest.approx(1.0, abs=1e-6)
    assert 0.0 <= res.ci_lower < est < res.ci_upper <= 1.0


def test_monotone_transform_invariance():
    rng = np.random.default_rng(5)
    d1 = RssDataset.from_strata([rng.normal(0, 1, n) for n in (4, 6, 5)])
    d2 = RssDataset.from_strata([rng.normal(0.3, 1, n) for n in (5, 3, 7)])

    def transform(d):
        return RssDataset.from_arrays(d.ranks, np.exp(3 * d.y) + d.y**3, set_size=d.set_size)

    a, b = rss_auc_test(d1, d2, 0.6), rss_auc_test(transform(d1), transform(d2), 0.6)
    assert b.estimate == a.estimate
    assert b.statistic == pytest.approx(a.statistic, abs=1e-12)
    assert b.ci == pytest.approx(a.ci, abs=1e-12)


def test_perfect_separation_keeps_interval_in_range():
    d1 = RssDataset.from_strata([[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]])
    d2 = RssDataset.from_strata([[1.1, 1.2], [1.3, 1.4], [1.5, 1.6]])
    with pytest.raises(InfeasibleError, match="exact tie"):
        rss_auc_test(d1, d2)


def test_jackknife_needs_two_per_stratum():
    with pytest.raises(DataError):
        rss_auc_test(RssDataset.from_strata([[1.0], [2.0, 3.0]]), RssDataset.from_strata([[1.0, 2.0], [2.0, 3.0]]))


@pytest.mark.slow
def test_null_coverage_balanced():
    reps, hits = 500, 0
    for r in range(reps):
        rng = spawn_rng(77, r)
        d1 = rss_simulate(SimConfig(3, (10, 10, 10), rho=0.8), rng=rng)
        d2 = rss_simulate(SimConfig(3, (10, 10, 10), rho=0.8), rng=rng)
        res = rss_auc_test(d1, d2, 0.5)
        hits += res.ci_lower <= 0.5 <= res.ci_upper
    assert 0.91 <= hits / reps <= 0.97
