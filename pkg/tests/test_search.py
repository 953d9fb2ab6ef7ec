import math

import numpy as np
import pytest
from scipy import stats

from tristable.market import Kind, parse_market, serialize_market
from tristable.rules import TripleRule
from tristable.search import (
    ConfigError, SearchConfig, all_markets, conjecture_campaign, conjectures_violated,
    exhaustive_campaign, local_search_min_stable, random_market,
)
from tristable.stability import Mode, count_stable


def test_random_market_is_seeded():
    assert random_market(4, "full", 9) == random_market(4, "full", 9)
    assert random_market(4, "full", 9) != random_market(4, "full", 10)
    assert random_market(3, "circular", [5, 2]) == random_market(3, "circular", [5, 2])


def test_random_market_documented_draw():
    rng = np.random.default_rng(3)
    first = tuple((rng.permutation(8) + 1).tolist())
    m = random_market(4, "full", 3)
    assert m.prefs[0][0] == (first[:4], first[4:])


def test_random_lists_are_uniform():
    """Chi-square test on a_1's list over 10^4 circular n=3 draws."""
    counts = {}
    for s in range(10_000):
        key = random_market(3, Kind.CIRCULAR, [77, s]).prefs[0][0][0]
        counts[key] = counts.get(key, 0) + 1
    assert len(counts) == 6
    _, p = stats.chisquare(list(counts.values()))
    assert p > 1e-3


def test_all_markets_counts():
    assert sum(1 for _ in all_markets(2, Kind.CIRCULAR)) == 64
    assert sum(1 for _ in all_markets(1, Kind.FULL)) == 8
    ms = list(all_markets(2, Kind.CIRCULAR))
    keys = [serialize_market(m) for m in ms]
    assert len(set(keys)) == 64


def test_conjecture_labels():
    assert conjectures_violated("strongest", "strict", 0) == ["strongest-link-existence", "strongest-link-two-stable"]
    assert conjectures_violated("strongest", "strict", 1) == ["strongest-link-two-stable"]
    assert conjectures_violated("strongest", "strict", 2) == []
    assert conjectures_violated("circular", "strict", 0) == ["circular-existence"]
    assert conjectures_violated("circular", "weak", 0) == []
    assert conjectures_violated("weakest", "strict", 0) == []


def test_campaign_small_strongest_finds_two_stable_violations():
    """At n=2 some markets have exactly one stable matching; each is reported
    and the count checks out against a fresh recount."""
    rep = conjecture_campaign(2, "strongest", 1000, seed=0)
    assert rep.violations
    for v in rep.violations:
        assert v.conjectures == ("strongest-link-two-stable",)
        assert count_stable(v.market, "strongest").count == v.count == 1
        again = parse_market(serialize_market(v.market))
        assert again.fingerprint() == v.fingerprint


def test_campaign_jobs_independent():
    a = conjecture_campaign(3, "circular", 60, seed=5)
    b = conjecture_campaign(3, "circular", 60, seed=5, jobs=3)
    assert a.summary() == b.summary()
    assert a.histogram == b.histogram
    assert sum(a.histogram.values()) == 60


def test_campaign_argmin_is_first_minimum():
    rep = conjecture_campaign(2, "circular", 50, seed=1)
    counts = [count_stable(random_market(2, "circular", [1, i]), "circular").count for i in range(50)]
    assert rep.min_count == min(counts)
    assert rep.argmin_index == counts.index(min(counts))


def test_campaign_config_errors():
    with pytest.raises(ConfigError):
        conjecture_campaign(6, "circular", 1)
    with pytest.raises(ConfigError):
        conjecture_campaign(2, "circular", -1)


def test_exhaustive_n2_circular():
    rep = exhaustive_campaign(2, "circular")
    assert rep.samples == 64
    assert rep.min_count >= 1
    assert not rep.violations


def test_exhaustive_limit():
    rep = exhaustive_campaign(3, "circular", limit=10)
    assert rep.samples == 10


def test_local_search_monotone_and_deterministic():
    cfg = SearchConfig(n=3, rule="circular", seed=2, max_sweeps=50)
    t1 = local_search_min_stable(cfg)
    t2 = local_search_min_stable(cfg)
    assert t1.records() == t2.records()
    counts = [c for _, c in t1.steps]
    assert all(x > y for x, y in zip(counts, counts[1:]))
    assert t1.final_count == count_stable(t1.final, "circular").count
    assert t1.reason in {"local-minimum", "counterexample", "budget"}
    assert t1.final_count >= 1


def test_local_search_jobs_independent():
    cfg = SearchConfig(n=3, rule="circular", seed=4, max_sweeps=5)
    assert local_search_min_stable(cfg).records() == local_search_min_stable(cfg, jobs=2).records()


def test_local_search_budget():
    trace = local_search_min_stable(SearchConfig(n=3, rule="circular", seed=0, max_sweeps=1))
    assert trace.sweeps == 1
    assert trace.reason in {"budget", "local-minimum", "counterexample"}


def test_local_search_finds_weakest_link_counterexample_from_fixture(weakest4):
    trace = local_search_min_stable(SearchConfig(n=4, rule="weakest", start=weakest4, neighbors=3))
    assert trace.counterexample and trace.reason == "counterexample" and trace.sweeps == 0


def test_local_search_sampled_neighbors_full():
    cfg = SearchConfig(n=2, rule="weakest", seed=1, neighbors=5, max_sweeps=20)
    trace = local_search_min_stable(cfg)
    assert trace.records()[-1]["stable"] == trace.final_count


@pytest.mark.parametrize("kw", [
    dict(n=0, rule="circular"), dict(n=6, rule="circular"),
    dict(n=2, rule="circular", max_sweeps=0), dict(n=2, rule="circular", neighbors=0),
])
def test_search_config_errors(kw):
    with pytest.raises(ConfigError):
        SearchConfig(**kw)


def test_search_config_start_checks(weakest4):
    with pytest.raises(ConfigError):
        SearchConfig(n=3, rule="weakest", start=weakest4)
    with pytest.raises(ValueError):
        SearchConfig(n=4, rule="circular", start=weakest4)


def test_n1_has_single_matching():
    rep = conjecture_campaign(1, "strongest", 3)
    assert rep.min_count == 1 and len(rep.violations) == 3
    assert math.factorial(1) ** 2 == 1
