import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import sample_case_market
from tristable import constructive
from tristable.constructive import (
    ChainTriple, ConstructionError, Relabeling, case_of, construct_stable, construct_stable_3,
    construct_stable_4, content_levels, favorite_counts, find_11i_triples, guarantee_holds,
    holds_11j_condition,
)
from tristable.market import AgentId, D, Gender, Kind, M, Matching, W, circular_market
from tristable.search import all_markets, random_market
from tristable.stability import count_stable, enumerate_matchings, is_stable


def _scan_chains(m):
    """Direct favorite-chain census, independent of the library's helpers."""
    out = {}
    n = m.n
    fav = [[m.prefs[g][i][0].index(1) for i in range(n)] for g in range(3)]
    for g in range(3):
        for i in range(n):
            j = fav[g][i]
            k = fav[(g + 1) % 3][j]
            back = m.prefs[(g + 2) % 3][k][0][i]
            out.setdefault(back, []).append((g, i, j, k))
    return out


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 5), seed=st.integers(0, 2**31))
def test_11i_census_matches_direct_scan(n, seed):
    m = random_market(n, Kind.CIRCULAR, seed)
    census = find_11i_triples(m)
    direct = _scan_chains(m)
    assert sorted(census) == sorted(direct)
    for i, chains in census.items():
        assert [(ct.x.gender, ct.x.index, ct.y.index, ct.z.index) for ct in chains] == direct[i]
        assert all(ct.label == f"11{i}" for ct in chains)
    assert sum(len(v) for v in census.values()) == 3 * n
    for j in range(1, n + 2):
        assert holds_11j_condition(m, j) == all(i >= j for i in direct)


def test_favorite_counts_sum():
    m = random_market(4, Kind.CIRCULAR, 8)
    cnt = favorite_counts(m)
    assert sum(cnt.values()) == 12 and len(cnt) == 12


def test_content_levels(circular4):
    levels = content_levels(circular4, Matching.identity(4))
    assert levels[W(0)] == 1
    assert levels[D(3)] == circular4.prefs[2][3][0][3]


# -- relabeling --------------------------------------------------------------

perm4 = st.permutations(list(range(4)))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**31), r1=st.integers(0, 2), r2=st.integers(0, 2),
       p=st.tuples(perm4, perm4, perm4), q=st.tuples(perm4, perm4, perm4))
def test_relabeling_round_trip_and_composition(seed, r1, r2, p, q):
    m = random_market(4, Kind.CIRCULAR, seed)
    f = Relabeling(r1, tuple(map(tuple, p)))
    g = Relabeling(r2, tuple(map(tuple, q)))
    assert f.inverse().apply(f.apply(m)) == m
    assert f.apply(f.inverse().apply(m)) == m
    assert g.apply(f.apply(m)) == f.then(g).apply(m)
    w = f.apply(m)
    for mt in list(enumerate_matchings(4))[::37]:
        assert is_stable(w, "circular", mt) == is_stable(m, "circular", f.map_matching(mt))
    x = AgentId(Gender.MAN, 2)
    assert f.to_original(x).gender == Gender((1 + r1) % 3)


def test_relabeling_rejects_bad_input():
    with pytest.raises(ValueError):
        Relabeling(0, ((0, 0), (0, 1), (0, 1)))
    with pytest.raises(ConstructionError):
        Relabeling.build(3, leads=[[1, 1], [], []])


def test_restrict_recompacts():
    m = circular_market(2, [[2, 1], [1, 2]], [[1, 2], [2, 1]], [[2, 1], [1, 2]])
    r = constructive._restrict(m, (0, 0, 0))
    assert r.n == 1 and r.prefs[0][0] == ((1,),)


# -- small sizes -------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2])
def test_exhaustive_small(n):
    for m in all_markets(n, Kind.CIRCULAR):
        res = construct_stable(m)
        assert not res.fallback and is_stable(m, "circular", res.matching)


# -- n = 3 -------------------------------------------------------------------

def test_n3_every_distinguished_agent():
    for s in range(300):
        m = random_market(3, Kind.CIRCULAR, [3, s])
        for x in m.agents():
            res = construct_stable_3(m, x)
            assert is_stable(m, "circular", res.matching)
            assert guarantee_holds(m, res.matching, x)


def test_n3_branch_coverage():
    seen = set()
    for s in range(2000):
        m = random_market(3, Kind.CIRCULAR, [31, s])
        seen.add(construct_stable_3(m).branch)
    assert seen == {"case=112", "case=111/contains-distinguished",
                    "case=111/contains-favorite", "case=111/elsewhere"}


def test_guarantee_can_fail_for_other_matchings():
    m = random_market(3, Kind.CIRCULAR, 0)
    bad = [mt for mt in enumerate_matchings(3) if not guarantee_holds(m, mt, W(0))]
    assert bad


# -- n = 4 -------------------------------------------------------------------

def test_n4_random_no_fallback():
    branches = set()
    for s in range(400):
        m = random_market(4, Kind.CIRCULAR, [4, s])
        res = construct_stable_4(m)
        assert not res.fallback, res.discrepancy
        assert is_stable(m, "circular", res.matching)
        branches.add(res.branch.split("/")[0])
    assert {"case=111", "case=112"} <= branches


@pytest.mark.parametrize("case, label", [
    ("114", "case=114"), ("113-1", "case=113/subcase=1"), ("113-2", "case=113/subcase=2"),
])
def test_rare_cases(case, label):
    rng = np.random.default_rng(12)
    seen = set()
    for _ in range(150):
        m = sample_case_market(rng, case)
        res = construct_stable_4(m)
        assert not res.fallback, res.discrepancy
        assert is_stable(m, "circular", res.matching)
        assert res.branch.startswith(label)
        seen.add(res.branch)
    if case == "113-2":
        assert len(seen) >= 3


def test_case_of_matches_census(circular4):
    assert case_of(circular4) == min(_scan_chains(circular4))


def test_fallback_records_discrepancy(monkeypatch):
    m = random_market(4, Kind.CIRCULAR, 1)
    case = case_of(m)
    target = {1: "_case_111", 2: "_case_112", 3: "_case_113", 4: "_case_114"}[case]

    def broken(*args):
        raise ConstructionError("expected pattern failed: injected")

    monkeypatch.setattr(constructive, target, broken)
    res = construct_stable_4(m)
    assert res.fallback
    assert res.discrepancy["type"] == "DISCREPANCY"
    assert "injected" in res.discrepancy["reason"]
    assert res.discrepancy["fingerprint"] == m.fingerprint()
    assert is_stable(m, "circular", res.matching)
    assert res.matching == count_stable(m, "circular").first


def test_unstable_branch_output_falls_back(monkeypatch):
    m = random_market(4, Kind.CIRCULAR, 2)
    target = {1: "_case_111", 2: "_case_112", 3: "_case_113", 4: "_case_114"}[case_of(m)]
    unstable = next(mt for mt in enumerate_matchings(4) if not is_stable(m, "circular", mt))
    monkeypatch.setattr(constructive, target, lambda *a: (Relabeling.build(4), unstable, "case=injected"))
    res = construct_stable_4(m)
    assert res.fallback and "unstable result" in res.discrepancy["reason"]


def test_construct_rejects_bad_markets(weakest4):
    with pytest.raises(ValueError):
        construct_stable(weakest4)
    with pytest.raises(ValueError):
        construct_stable(random_market(5, Kind.CIRCULAR, 0))
