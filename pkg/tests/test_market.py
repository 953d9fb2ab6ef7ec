import pytest
from hypothesis import given, settings, strategies as st

from tristable.fixtures import fixture_text
from tristable.market import (
    AgentId, D, Gender, Kind, M, MarketError, Matching, W, circular_market, pad_market,
    parse_market, parse_matching, rank_of, serialize_market,
)
from tristable.search import random_market
from tristable.stability import count_stable, is_stable, enumerate_matchings


def test_parse_weakest_fixture(weakest4):
    assert weakest4.kind is Kind.FULL
    assert weakest4.n == 4
    assert weakest4.ranks(W(0)) == ((2, 8, 3, 7), (5, 1, 4, 6))
    assert weakest4.ranks(D(3)) == ((8, 7, 5, 3), (1, 6, 2, 4))


def test_parse_n1():
    m = parse_market("3gsm v1 kind=circular n=1\na_1: [1]\nb_1: [1]\nc_1: [1]\n")
    assert m.kind is Kind.CIRCULAR and m.n == 1


def test_parse_rejects_non_permutation():
    text = fixture_text("weakest4").replace("a_1: [2,8,3,7 | 5,1,4,6]", "a_1: [1,2,3,3 | 4,5,6,7]")
    with pytest.raises(MarketError, match="a_1.*not a permutation of 1..8"):
        parse_market(text)


@pytest.mark.parametrize("text, needle", [
    ("", "empty"),
    ("3gsm v2 kind=full n=1\n", "bad header"),
    ("3gsm v1 kind=circular n=2\na_1: [1,2]\na_2: [2,1]\nb_1: [1,2]\nb_2: [1,2]\nc_1: [1,2]\n", "missing agents: c_2"),
    ("3gsm v1 kind=circular n=1\na_1: [1]\nb_1: [1]\nc_1: [1 | 2]\n", "c_1: circular"),
    ("3gsm v1 kind=full n=1\na_1: [1 | 2]\nb_1: [2 | 1]\nc_1: [1]\n", "c_1: full"),
    ("3gsm v1 kind=circular n=2\na_1: [1]\n", "a_1: block"),
    ("3gsm v1 kind=circular n=1\na_1: [1]\na_1: [1]\n", "a_1: listed twice"),
    ("3gsm v1 kind=circular n=1\na_2: [1]\n", "a_2: index exceeds"),
    ("3gsm v1 kind=circular n=1\na_1: [x]\n", "a_1: non-integer"),
])
def test_parse_errors(text, needle):
    with pytest.raises(MarketError, match=needle):
        parse_market(text)


def test_serialize_circular_row(circular4):
    text = serialize_market(circular4)
    assert "a_1: [1,2,4,3]\n" in text
    assert text.splitlines()[0] == "3gsm v1 kind=circular n=4"


def test_fixture_files_are_canonical():
    for name in ("weakest4", "circular4"):
        text = fixture_text(name)
        assert serialize_market(parse_market(text)) == text


def test_roundtrip_n1():
    m = circular_market(1, [[1]], [[1]], [[1]])
    assert parse_market(serialize_market(m)) == m


@pytest.mark.parametrize("kind", ["circular", "full"])
@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_roundtrip_random_seed0(kind, n):
    m = random_market(n, kind, 0)
    text = serialize_market(m)
    assert parse_market(text) == m
    assert serialize_market(parse_market(text)) == text


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 6), kind=st.sampled_from(["circular", "full"]), seed=st.integers(0, 2**32))
def test_roundtrip_property(n, kind, seed):
    m = random_market(n, kind, seed)
    assert parse_market(serialize_market(m)) == m


def test_parse_tolerates_whitespace_and_comments(circular4):
    text = "# comment\n" + serialize_market(circular4).replace(",", ", ").replace("a_1:", "a_1 :") + "\n\n"
    assert parse_market(text) == circular4


def test_rank_of_examples(weakest4, circular4):
    assert rank_of(weakest4, M(2), D(0)) == 7
    assert rank_of(circular4, D(1), W(0)) == 1


def test_rank_of_undefined_across_uncared_gender(circular4):
    with pytest.raises(MarketError, match="rank undefined for kind circular"):
        rank_of(circular4, W(0), D(0))


@pytest.mark.parametrize("kind", ["circular", "full"])
def test_exactly_one_rank_one_partner(kind):
    m = random_market(4, kind, 3)
    for x in m.agents():
        partners = [AgentId(g, j) for g in Gender if g != x.gender for j in range(m.n)]
        ones = []
        for p in partners:
            try:
                if rank_of(m, x, p) == 1:
                    ones.append(p)
            except MarketError:
                pass
        assert len(ones) == 1
        assert m.favorite(x) == ones[0]


def test_pad_circular_dummy_rank():
    m = random_market(2, "circular", 1)
    p = pad_market(m, 3)
    for x in m.agents():
        assert p.ranks(x)[0][2] == 3
    for g in Gender:
        assert p.prefs[g][2] == ((1, 2, 3),)


def test_pad_identity(weakest4):
    assert pad_market(weakest4, 4) == weakest4


def test_pad_rejects_shrink(weakest4):
    with pytest.raises(MarketError):
        pad_market(weakest4, 3)


@pytest.mark.parametrize("kind", ["circular", "full"])
def test_pad_preserves_ranks(kind):
    m = random_market(3, kind, 11)
    p = pad_market(m, 5)
    for x in m.agents():
        for g in Gender:
            for j in range(m.n):
                y = AgentId(g, j)
                try:
                    r = rank_of(m, x, y)
                except MarketError:
                    continue
                assert rank_of(p, x, y) == r
    # dummies come after every real partner, first block first
    if kind == "full":
        assert p.ranks(W(0)) == (m.ranks(W(0))[0] + (7, 8), m.ranks(W(0))[1] + (9, 10))


def test_pad_keeps_stable_count(circular4):
    """Stable matchings of the padded market that pair the dummies together
    are exactly the stable matchings of the original plus the dummy triple."""
    padded = pad_market(circular4, 5)
    rule = "circular"
    stable_extended = 0
    for mt in enumerate_matchings(4):
        ext = Matching(mt.man_of + (4,), mt.dog_of + (4,))
        assert is_stable(padded, rule, ext) == is_stable(circular4, rule, mt)
        stable_extended += is_stable(padded, rule, ext)
    assert stable_extended == count_stable(circular4, rule).count == 66


def test_pad_keeps_stable_count_full(weakest4):
    padded = pad_market(weakest4, 5)
    for mt in list(enumerate_matchings(4))[::7]:
        ext = Matching(mt.man_of + (4,), mt.dog_of + (4,))
        assert not is_stable(padded, "weakest", ext)


def test_matching_validation():
    with pytest.raises(MarketError):
        Matching((0, 0), (0, 1))
    mt = Matching.from_triples([(1, 0, 1), (0, 1, 0)])
    assert mt.man_of == (1, 0) and mt.dog_of == (0, 1)
    assert parse_matching(str(mt)) == mt
    assert mt.triple_of(M(0)) == (1, 0, 1)
    assert mt.triple_of(D(0)) == (0, 1, 0)


def test_agent_names():
    assert str(AgentId(Gender.DOG, 2)) == "c_3"
    assert AgentId.parse("b_4") == M(3)
    with pytest.raises(MarketError):
        AgentId.parse("d_1")
