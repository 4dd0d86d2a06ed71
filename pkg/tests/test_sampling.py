import numpy as np
import pytest

from rankset import (
    DataError,
    InfeasibleError,
    PopulationFrame,
    SamplingConfig,
    rss_prop_sample,
    rss_sample,
    stratum_counts,
)
from rankset.numerics import seeded_rng
from rankset.sampling import draw_selection, srs_sample


def iris_like(with_y=True, seed=3):
    # 150 rows, sepal-length-like auxiliary and a correlated petal-length-like outcome
    rng = np.random.default_rng(seed)
    x = np.round(rng.normal(5.8, 0.8, 150), 1)
    y = np.round(1.8 * x - 6.8 + rng.normal(0, 0.9, 150), 1) if with_y else None
    return PopulationFrame.from_arrays(x, y)


def test_iris_style_sample_with_outcome():
    data = rss_sample(iris_like(), SamplingConfig(3, (2, 2, 2), seed=1))
    assert len(data) == 6
    assert list(data.ranks) == [1, 1, 2, 2, 3, 3]
    assert data.has_ids and data.has_y
    assert len(set(data.ids)) == 6


def test_iris_style_sample_without_outcome():
    data = rss_sample(iris_like(with_y=False), SamplingConfig(3, (2, 2, 2), seed=1))
    assert len(data) == 6 and not data.has_y
    assert all(r.y is None for r in data.records)


def test_single_rank_one_set_takes_minimum():
    pop = PopulationFrame.from_arrays([4.0, 1.0, 9.0], [40.0, 10.0, 90.0])
    data = rss_sample(pop, SamplingConfig(3, (1, 0, 0)))
    assert data.records[0].y == 10.0


def test_prop_sample_ranks_and_constant_populations():
    pop = PopulationFrame.from_arrays(np.tile([0.0, 1.0], 40))
    data = rss_prop_sample(pop, SamplingConfig(3, (2, 2, 2), seed=4))
    assert list(data.ranks) == [1, 1, 2, 2, 3, 3]
    assert data.kind == "binary"
    zeros = rss_prop_sample(PopulationFrame.from_arrays(np.zeros(30)), SamplingConfig(3, (2, 2, 2)))
    ones = rss_prop_sample(PopulationFrame.from_arrays(np.ones(30)), SamplingConfig(3, (2, 2, 2)))
    assert set(zeros.y) == {0.0} and set(ones.y) == {1.0}


def test_prop_sample_rejects_continuous_auxiliary():
    with pytest.raises(DataError):
        rss_prop_sample(PopulationFrame.from_arrays(np.linspace(0, 1, 30)), SamplingConfig(3, (1, 1, 1)))


@pytest.mark.parametrize("policy", ["discard_set", "return_unmeasured"])
def test_instrumented_sets(policy):
    x = seeded_rng(5).normal(size=400)
    cfg = SamplingConfig(4, (2, 5, 1, 3), pool_policy=policy)
    seen = []

    def on_set(rank, drawn, chosen):
        seen.append((rank, drawn.copy(), chosen))

    picks = draw_selection(x, cfg, seeded_rng(9), on_set=on_set)
    assert [p[0] for p in picks] == [r for r, _, _ in seen]
    # incomplete cycles: every cycle serves unfinished strata in ascending order
    assert [r for r, _, _ in seen] == [1, 2, 3, 4, 1, 2, 4, 2, 4, 2, 2]
    used = set()
    for rank, drawn, chosen in seen:
        assert len(set(drawn)) == 4
        assert chosen == drawn[np.argsort(x[drawn])[rank - 1]]
        if policy == "discard_set":
            assert used.isdisjoint(drawn)
            used |= set(drawn)
        else:
            assert chosen not in used
            used.add(chosen)


@pytest.mark.parametrize("alloc", [(3, 10, 5), (0, 4, 0), (1, 1, 1, 1, 6)])
def test_allocation_fidelity(alloc):
    x = seeded_rng(1).normal(size=500)
    cfg = SamplingConfig(len(alloc), alloc, seed=2)
    data = rss_sample(PopulationFrame.from_arrays(x, x), cfg)
    assert stratum_counts(data).counts == alloc
    assert len(set(data.ids)) == sum(alloc)


def test_rank_strata_are_stochastically_ordered():
    x = seeded_rng(2).normal(size=3000)
    pop = PopulationFrame.from_arrays(x, x)
    means = np.zeros(3)
    for rep in range(150):
        data = rss_sample(pop, SamplingConfig(3, (10, 10, 10)), seeded_rng(rep))
        means += [data.y[data.ranks == h].mean() for h in (1, 2, 3)]
    means /= 150
    assert means[0] < means[1] < means[2]
    # about 3 Monte Carlo standard errors around the expected normal minimum of 3
    assert means[0] - x.mean() == pytest.approx(-0.846, abs=0.06)


def test_feasibility_bounds():
    cfg = SamplingConfig(3, (2, 2, 2))
    assert cfg.required_population() == 18
    assert SamplingConfig(3, (2, 2, 2), "return_unmeasured").required_population() == 8
    with pytest.raises(InfeasibleError):
        rss_sample(PopulationFrame.from_arrays(np.arange(17.0)), cfg)
    # the return policy's bound is tight: exactly n - 1 + H units suffice
    data = rss_sample(
        PopulationFrame.from_arrays(np.arange(8.0)), SamplingConfig(3, (2, 2, 2), "return_unmeasured")
    )
    assert len(set(data.ids)) == 6


def test_config_validation():
    with pytest.raises(DataError):
        SamplingConfig(1, (3,))
    with pytest.raises(DataError):
        SamplingConfig(3, (1, 1))
    with pytest.raises(DataError):
        SamplingConfig(2, (0, 0))


def test_same_seed_same_sample():
    pop = iris_like()
    a = rss_sample(pop, SamplingConfig(3, (3, 1, 2), seed=12))
    b = rss_sample(pop, SamplingConfig(3, (3, 1, 2), seed=12))
    assert a == b


def test_srs_sample_distinct():
    idx = srs_sample(iris_like(), 20, seeded_rng(0))
    assert len(set(idx.tolist())) == 20
