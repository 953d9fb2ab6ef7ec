"""Stable matchings for circular markets with n <= 4, built case by case.

Every construction follows one deduction chain over favorites: it identifies
the agents that play fixed roles, relabels the market so those agents get
fixed working indices (``Relabeling``), checks that the expected preference
pattern really holds in working labels, emits a matching in working labels
and maps it back. Each result is checked against the brute-force stability
oracle before it is returned.

Working labels below are written 1-based (``a1`` is woman 0) so the code can
be read against the usual dot diagrams.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .market import AgentId, Gender, Kind, Market, Matching, Triple, circular_market
from .rules import TripleRule
from .stability import first_stable, find_blocking_triple, is_stable

log = logging.getLogger(__name__)

CIRC = TripleRule.CIRCULAR


class ConstructionError(AssertionError):
    """A case-analysis step did not hold or produced an unstable matching."""


# -- circular-market helpers ---------------------------------------------------

def _rank(m: Market, x: AgentId, y: AgentId) -> int:
    assert y.gender == Gender(x.gender).cared
    return m.prefs[x.gender][x.index][0][y.index]


def _choice(m: Market, x: AgentId, k: int) -> AgentId:
    """The partner ``x`` ranks k-th."""
    return AgentId(Gender(x.gender).cared, m.prefs[x.gender][x.index][0].index(k))


def _fav(m: Market, x: AgentId) -> AgentId:
    return _choice(m, x, 1)


def _need_circular(m: Market, n: Optional[int] = None) -> None:
    if m.kind is not Kind.CIRCULAR:
        raise ValueError("constructive routines need a circular market")
    if n is not None and m.n != n:
        raise ValueError(f"expected n={n}, got n={m.n}")


def content_levels(m: Market, mt: Matching) -> dict[AgentId, int]:
    """For every agent, the rank of the partner it cares about in ``mt``."""
    out = {}
    for x in m.agents():
        t = mt.triple_of(x)
        out[x] = _rank(m, x, AgentId(Gender(x.gender).cared, t[Gender(x.gender).cared]))
    return out


def guarantee_holds(m: Market, mt: Matching, x: AgentId) -> bool:
    """``x`` is 1-content, or ``x``'s favorite is 1-content and ``x`` is 2-content."""
    lv = content_levels(m, mt)
    return lv[x] == 1 or (lv[_fav(m, x)] == 1 and lv[x] == 2)


# -- favorite chains -----------------------------------------------------------

@dataclass(frozen=True)
class ChainTriple:
    """``x``'s favorite ``y``'s favorite ``z`` ranks ``x`` as ``back_rank``."""

    x: AgentId
    y: AgentId
    z: AgentId
    back_rank: int

    @property
    def label(self) -> str:
        return f"11{self.back_rank}"


def find_11i_triples(m: Market) -> dict[int, list[ChainTriple]]:
    """Favorite chains from every agent, grouped by back rank.

    Each group lists chains in start-agent order (a_1..a_n, b_1.., c_1..).
    """
    _need_circular(m)
    out: dict[int, list[ChainTriple]] = {}
    for x in m.agents():
        y = _fav(m, x)
        z = _fav(m, y)
        ct = ChainTriple(x, y, z, _rank(m, z, x))
        out.setdefault(ct.back_rank, []).append(ct)
    return dict(sorted(out.items()))


def holds_11j_condition(m: Market, j: int) -> bool:
    """No chain triple with back rank below ``j``."""
    return all(i >= j for i in find_11i_triples(m))


def favorite_counts(m: Market) -> Counter:
    """How many agents have each agent as their favorite."""
    cnt: Counter = Counter({x: 0 for x in m.agents()})
    for x in m.agents():
        cnt[_fav(m, x)] += 1
    return cnt


# -- relabeling ----------------------------------------------------------------

@dataclass(frozen=True)
class Relabeling:
    """Working labels for a circular market.

    Working gender ``g`` is original gender ``(g + rotation) % 3``, and working
    index ``i`` of that gender is original index ``perms[g][i]``. Rotating
    genders preserves the circular structure, so a market can be viewed from
    any gender's side.
    """

    rotation: int
    perms: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]

    def __post_init__(self) -> None:
        n = len(self.perms[0])
        for p in self.perms:
            if sorted(p) != list(range(n)):
                raise ValueError(f"{p} is not a permutation")

    @classmethod
    def build(cls, n: int, rotation: int = 0, leads: Sequence[Sequence[int]] = ((), (), ())) -> "Relabeling":
        """Working indices 0.. go to ``leads[g]`` in order, then the rest ascending."""
        perms = []
        for g in range(3):
            head = list(leads[g])
            if len(set(head)) != len(head):
                raise ConstructionError(f"relabeling roles collide: {head}")
            perms.append(tuple(head + [i for i in range(n) if i not in head]))
        return cls(rotation % 3, tuple(perms))

    @property
    def n(self) -> int:
        return len(self.perms[0])

    def original_gender(self, g: int) -> Gender:
        return Gender((g + self.rotation) % 3)

    def to_original(self, x: AgentId) -> AgentId:
        return AgentId(self.original_gender(x.gender), self.perms[x.gender][x.index])

    def apply(self, m: Market) -> Market:
        _need_circular(m)
        n = m.n
        groups = []
        for g in range(3):
            og = self.original_gender(g)
            nxt = self.perms[(g + 1) % 3]
            rows = []
            for i in range(n):
                v = m.prefs[og][self.perms[g][i]][0]
                rows.append([v[nxt[j]] for j in range(n)])
            groups.append(rows)
        return circular_market(n, *groups)

    def inverse(self) -> "Relabeling":
        r = self.rotation
        perms = []
        for h in range(3):
            p = self.perms[(h - r) % 3]
            inv = [0] * len(p)
            for i, v in enumerate(p):
                inv[v] = i
            perms.append(tuple(inv))
        return Relabeling((-r) % 3, tuple(perms))

    def then(self, other: "Relabeling") -> "Relabeling":
        """Relabeling equal to applying ``self`` and then ``other``."""
        perms = tuple(
            tuple(self.perms[(g + other.rotation) % 3][i] for i in other.perms[g]) for g in range(3)
        )
        return Relabeling((self.rotation + other.rotation) % 3, perms)

    def map_triples(self, triples: Sequence[Sequence[int]]) -> list[Triple]:
        out = []
        for t in triples:
            orig = [0, 0, 0]
            for g in range(3):
                orig[self.original_gender(g)] = self.perms[g][t[g]]
            out.append(Triple(*orig))
        return out

    def map_matching(self, mt: Matching) -> Matching:
        return Matching.from_triples(self.map_triples(mt.triples()))


def _restrict(m: Market, drop: Sequence[int]) -> Market:
    """Remove working index ``drop[g]`` from each gender and recompact ranks."""
    groups = []
    for g in range(3):
        keep = [i for i in range(m.n) if i != drop[g]]
        keep_next = [j for j in range(m.n) if j != drop[(g + 1) % 3]]
        rows = []
        for i in keep:
            v = m.prefs[g][i][0]
            order = sorted(keep_next, key=lambda j: v[j])
            rows.append([order.index(j) + 1 for j in keep_next])
        groups.append(rows)
    return circular_market(m.n - 1, *groups)


def _complete(n: int, triples: list[tuple[int, int, int]]) -> Matching:
    """Fill the unused agents in ascending index order."""
    used = [{t[g] for t in triples} for g in range(3)]
    rest = [[i for i in range(n) if i not in used[g]] for g in range(3)]
    return Matching.from_triples(list(triples) + list(zip(*rest)))


# working-label shorthands (1-based)
def a(i: int) -> AgentId:
    return AgentId(Gender.WOMAN, i - 1)


def b(i: int) -> AgentId:
    return AgentId(Gender.MAN, i - 1)


def c(i: int) -> AgentId:
    return AgentId(Gender.DOG, i - 1)


def _t(*triples: tuple[int, int, int]) -> Matching:
    return Matching.from_triples([(x - 1, y - 1, z - 1) for x, y, z in triples])


def _expect(ok: bool, what: str) -> None:
    if not ok:
        raise ConstructionError(f"expected pattern failed: {what}")


# -- results -------------------------------------------------------------------

@dataclass
class Construction:
    matching: Optional[Matching]
    branch: str
    fallback: bool = False
    discrepancy: Optional[dict] = None
    relabeling: Optional[Relabeling] = field(default=None, repr=False)

    @property
    def counterexample(self) -> bool:
        """No stable matching exists at all (only possible after a fallback)."""
        return self.matching is None


def _rotation_to(m: Market, x: AgentId) -> tuple[Relabeling, Market]:
    rel = Relabeling.build(m.n, rotation=x.gender)
    return rel, rel.apply(m)


# -- n = 3 ---------------------------------------------------------------------

def _three_working(w: Market) -> tuple[Matching, str]:
    """Working market with a1 -> b1 -> c1 as favorites; a1 is the distinguished agent."""
    n = w.n
    _expect(_fav(w, a(1)) == b(1) and _fav(w, b(1)) == c(1), "a1 -> b1 -> c1")
    full = next(
        ((i, _fav(w, AgentId(Gender.WOMAN, i)).index, _fav(w, _fav(w, AgentId(Gender.WOMAN, i))).index)
         for i in range(n)
         if _fav(w, _fav(w, _fav(w, AgentId(Gender.WOMAN, i)))) == AgentId(Gender.WOMAN, i)),
        None,
    )
    if full is not None:
        ta, tb, tc = full
        if tb == 0:
            if ta == 0:
                return _complete(n, [full]), "111/contains-distinguished"
            # a1 loses b1 to the chain triple and takes her second choice
            second = _choice(w, a(1), 2).index
            dog = min(k for k in range(n) if k != tc)
            return _complete(n, [full, (0, second, dog)]), "111/contains-favorite"
        dog = 0 if tc != 0 else _choice(w, b(1), 2).index
        return _complete(n, [full, (0, 0, dog)]), "111/elsewhere"
    raise ConstructionError("no chain triple with back rank 1; caller must relabel for the 112 pattern")


def construct_stable_3(m: Market, distinguished: AgentId = AgentId(Gender.WOMAN, 0)) -> Construction:
    """Stable matching of a circular n=3 market in which ``distinguished`` is
    1-content, or is 2-content while its favorite is 1-content."""
    _need_circular(m, 3)
    x = AgentId(Gender(distinguished.gender), distinguished.index)
    rot, r = _rotation_to(m, x)
    x0 = AgentId(Gender.WOMAN, x.index)
    y0 = _fav(r, x0)
    z0 = _fav(r, y0)
    if holds_11j_condition(r, 2):
        # no 111 triple: c1's favorite a2, her favorite b2, his favorite c2
        a2 = _fav(r, z0)
        b2 = _fav(r, a2)
        c2 = _fav(r, b2)
        rel = Relabeling.build(3, leads=[[x0.index, a2.index], [y0.index, b2.index], [z0.index, c2.index]])
        w = rel.apply(r)
        _expect(_fav(w, a(1)) == b(1) and _fav(w, b(1)) == c(1) and _fav(w, c(1)) == a(2), "a1 -> b1 -> c1 -> a2")
        _expect(_fav(w, a(2)) == b(2) and _fav(w, b(2)) == c(2), "a2 -> b2 -> c2")
        mt_w, branch = Matching.identity(3), "112"
    else:
        rel = Relabeling.build(3, leads=[[x0.index], [y0.index], [z0.index]])
        w = rel.apply(r)
        mt_w, branch = _three_working(w)
    full = rot.then(rel)
    mt = full.map_matching(mt_w)
    if not is_stable(m, CIRC, mt):
        raise ConstructionError(
            f"n=3 branch {branch} produced an unstable matching\n{m}{mt}\n"
            f"blocked by {find_blocking_triple(m, CIRC, mt).blocking}"
        )
    if not guarantee_holds(m, mt, x):
        raise ConstructionError(f"n=3 branch {branch} broke the content guarantee for {x}\n{m}{mt}")
    return Construction(mt, f"case={branch}", relabeling=full)


# -- n = 4 ---------------------------------------------------------------------

def _case_111(m: Market, chain: ChainTriple) -> tuple[Relabeling, Matching, str]:
    """Set the 1-content triple aside and solve the remaining 3-market."""
    rot, r = _rotation_to(m, chain.x)
    x0 = AgentId(Gender.WOMAN, chain.x.index)
    y0, z0 = _fav(r, x0), _fav(r, _fav(r, x0))
    rel = Relabeling.build(4, leads=[[x0.index], [y0.index], [z0.index]])
    w = rel.apply(r)
    _expect(_fav(w, a(1)) == b(1) and _fav(w, b(1)) == c(1) and _fav(w, c(1)) == a(1), "a1 b1 c1 all 1-content")
    sub = construct_stable_3(_restrict(w, (0, 0, 0)), a(1))
    triples = [(0, 0, 0)] + [(t.a + 1, t.b + 1, t.c + 1) for t in sub.matching.triples()]
    return rot.then(rel), Matching.from_triples(triples), f"case=111/residual={sub.branch[5:]}"


def _case_112(m: Market, chain: ChainTriple) -> tuple[Relabeling, Matching, str]:
    rot, r = _rotation_to(m, chain.x)
    x0 = AgentId(Gender.WOMAN, chain.x.index)
    y0 = _fav(r, x0)
    z0 = _fav(r, y0)
    a2 = _fav(r, z0)
    b2 = _fav(r, a2)
    c2 = _fav(r, b2)
    rel = Relabeling.build(4, leads=[[x0.index, a2.index], [y0.index, b2.index], [z0.index, c2.index]])
    w = rel.apply(r)
    _expect(_fav(w, a(1)) == b(1) and _fav(w, b(1)) == c(1), "a1 -> b1 -> c1")
    _expect(_fav(w, c(1)) == a(2) and _rank(w, c(1), a(1)) == 2, "c1 ranks a2 first, a1 second")
    _expect(_fav(w, a(2)) == b(2) and _fav(w, b(2)) == c(2), "a2 -> b2 -> c2")
    # set a1 b1 c1 aside; the 3-matching must favor a2 (working a1 of the rest)
    sub = construct_stable_3(_restrict(w, (0, 0, 0)), a(1))
    triples = [(0, 0, 0)] + [(t.a + 1, t.b + 1, t.c + 1) for t in sub.matching.triples()]
    return rot.then(rel), Matching.from_triples(triples), f"case=112/residual={sub.branch[5:]}"


def _women_take_favorites(w: Market) -> Matching:
    """Every woman gets her favorite man; men get their favorite dog when free."""
    taken: set[int] = set()
    triples = []
    for i in range(w.n):
        man = _fav(w, AgentId(Gender.WOMAN, i))
        want = _fav(w, man).index
        dog = want if want not in taken else min(k for k in range(w.n) if k not in taken)
        taken.add(dog)
        triples.append((i, man.index, dog))
    return Matching.from_triples(triples)


def _case_114(m: Market) -> tuple[Relabeling, Matching, str]:
    counts = favorite_counts(m)
    _expect(all(v == 1 for v in counts.values()), "no two agents share a favorite")
    rel = Relabeling.build(4)
    return rel, _women_take_favorites(m), "case=114"


def _subcase_1(m: Market) -> tuple[Relabeling, Matching, str]:
    """Every agent is the favorite of zero or two agents."""
    w0 = m
    cnt = favorite_counts(w0)
    liked = sorted(x.index for x, k in cnt.items() if x.gender == Gender.MAN and k == 2)
    _expect(len(liked) == 2, "exactly two men are favorites")
    B1, B4 = (AgentId(Gender.MAN, i) for i in liked)
    C1, C4 = _fav(w0, B1), _fav(w0, B4)
    A3, A4 = _choice(w0, C1, 1), _choice(w0, C1, 2)
    A2, A1 = _choice(w0, C4, 1), _choice(w0, C4, 2)
    others_b = [x for x in (AgentId(Gender.MAN, i) for i in range(4)) if x not in (B1, B4)]
    B2 = next((x for x in others_b if _fav(w0, x) == C1), None)
    B3 = next((x for x in others_b if _fav(w0, x) == C4), None)
    _expect(B2 is not None and B3 is not None, "the unfavored men point at c1 and c4")
    others_c = [x for x in (AgentId(Gender.DOG, i) for i in range(4)) if x not in (C1, C4)]
    C3 = next((x for x in others_c if _fav(w0, x) == A3), None)
    C2 = next((x for x in others_c if _fav(w0, x) == A2), None)
    _expect(C2 is not None and C3 is not None, "the unfavored dogs point at a2 and a3")
    rel = Relabeling.build(4, leads=[
        [A1.index, A2.index, A3.index, A4.index],
        [B1.index, B2.index, B3.index, B4.index],
        [C1.index, C2.index, C3.index, C4.index],
    ])
    w = rel.apply(w0)
    _expect(_fav(w, a(1)) == b(1) and _fav(w, a(2)) == b(1), "a1, a2 -> b1")
    _expect(_fav(w, a(3)) == b(4) and _fav(w, a(4)) == b(4), "a3, a4 -> b4")
    _expect(_fav(w, b(1)) == c(1) and _fav(w, b(2)) == c(1), "b1, b2 -> c1")
    _expect(_fav(w, b(3)) == c(4) and _fav(w, b(4)) == c(4), "b3, b4 -> c4")
    _expect(_choice(w, c(1), 1) == a(3) and _choice(w, c(1), 2) == a(4), "c1 ranks a3, a4 first")
    _expect(_choice(w, c(4), 1) == a(2) and _choice(w, c(4), 2) == a(1), "c4 ranks a2, a1 first")
    _expect(_fav(w, c(2)) == a(2) and _fav(w, c(3)) == a(3), "c2 -> a2, c3 -> a3")
    # forced second choices: b3, b4 -> c4 -> a2 push b3, b4 below second place for a2, etc.
    _expect(_choice(w, a(2), 2) == b(2), "a2's second choice is b2")
    _expect(_choice(w, a(3), 2) == b(3), "a3's second choice is b3")
    _expect(_choice(w, b(1), 2) == c(3), "b1's second choice is c3")
    _expect(_choice(w, b(4), 2) == c(2), "b4's second choice is c2")
    return rel, _t((1, 1, 3), (2, 2, 1), (3, 3, 4), (4, 4, 2)), "case=113/subcase=1"


def _blocks(w: Market, mt: Matching, t: tuple[int, int, int]) -> bool:
    """Whether the working triple ``t`` (1-based) strictly blocks ``mt``."""
    lv = content_levels(w, mt)
    tri = Triple(t[0] - 1, t[1] - 1, t[2] - 1)
    for x in tri.agents():
        cared = Gender(x.gender).cared
        if _rank(w, x, AgentId(cared, tri[cared])) >= lv[x]:
            return False
    return True


def _subcase_2(m: Market) -> tuple[Relabeling, Matching, str]:
    """Some agent is the favorite of exactly one agent, none of three or more."""
    cnt = favorite_counts(m)
    pivot = min(x for x, k in cnt.items() if k == 1)
    # view the market so that the singly-favored agent is a man
    rot = Relabeling.build(4, rotation=(pivot.gender - 1) % 3)
    r = rot.apply(m)
    cnt = favorite_counts(r)
    men = [AgentId(Gender.MAN, i) for i in range(4)]
    if all(cnt[x] == 1 for x in men):
        return rot, _women_take_favorites(r), "case=113/subcase=2/distinct-favorites"
    pattern = sorted(cnt[x] for x in men)
    _expect(pattern == [0, 1, 1, 2], f"men favored by 2, 1, 1, 0 women (got {pattern})")
    B1 = next(x for x in men if cnt[x] == 2)
    B3, B4 = (x for x in men if cnt[x] == 1)
    B2 = next(x for x in men if cnt[x] == 0)
    C1 = _fav(r, B1)
    admirers = [x for x in (AgentId(Gender.WOMAN, i) for i in range(4)) if _fav(r, x) == B1]
    A1 = next((x for x in admirers if _rank(r, C1, x) == 3), None)
    A2 = next((x for x in admirers if _rank(r, C1, x) == 4), None)
    _expect(A1 is not None and A2 is not None, "c1 ranks b1's admirers 3 and 4")
    A3 = next(x for x in (AgentId(Gender.WOMAN, i) for i in range(4)) if _fav(r, x) == B3)
    A4 = next(x for x in (AgentId(Gender.WOMAN, i) for i in range(4)) if _fav(r, x) == B4)
    C3 = _fav(r, B3)
    _expect(C3 != C1 and _fav(r, B4) != C1, "neither b3 nor b4 favors c1")

    def relabel(a3: AgentId, a4: AgentId, b3: AgentId, b4: AgentId, c2: AgentId, c4: AgentId) -> tuple[Relabeling, Market]:
        rel = Relabeling.build(4, leads=[
            [A1.index, A2.index, a3.index, a4.index],
            [B1.index, B2.index, b3.index, b4.index],
            [C1.index, c2.index, C3.index, c4.index],
        ])
        return rot.then(rel), rel.apply(r)

    if _fav(r, B4) != C3:
        C4 = _fav(r, B4)
        C2 = next(x for x in (AgentId(Gender.DOG, i) for i in range(4)) if x not in (C1, C3, C4))
        full, w = relabel(A3, A4, B3, B4, C2, C4)
        _expect(_fav(w, b(4)) == c(4), "b4 -> c4")
        return full, Matching.identity(4), "case=113/subcase=2/distinct-dogs"

    C2, C4 = (x for x in (AgentId(Gender.DOG, i) for i in range(4)) if x not in (C1, C3))
    full, w = relabel(A3, A4, B3, B4, C2, C4)
    _expect(_fav(w, b(3)) == c(3) and _fav(w, b(4)) == c(3), "b3, b4 -> c3")
    first = Matching.identity(4)
    if not _blocks(w, first, (2, 4, 3)):
        return full, first, "case=113/subcase=2/first-candidate"
    second = _t((1, 1, 1), (2, 2, 2), (3, 3, 4), (4, 4, 3))
    if not _blocks(w, second, (2, 3, 3)):
        return full, second, "case=113/subcase=2/second-candidate"
    # both candidates blocked: a2 prefers b3 and b4 to b2, so one of them is her second choice
    _expect(_choice(w, a(2), 2) in (b(3), b(4)), "a2's second choice is b3 or b4")
    suffix = ""
    if _choice(w, a(2), 2) == b(4):
        full, w = relabel(A4, A3, B4, B3, C2, C4)
        suffix = "/mirrored"
    _expect(_choice(w, a(2), 2) == b(3), "a2's second choice is b3")
    _expect(_fav(w, c(3)) == a(1), "c3 -> a1")
    _expect(_choice(w, a(1), 2) == b(2), "a1's second choice is b2")
    return full, _t((1, 2, 2), (2, 1, 1), (3, 3, 3), (4, 4, 4)), "case=113/subcase=2/swap" + suffix


def _case_113(m: Market) -> tuple[Relabeling, Matching, str]:
    cnt = favorite_counts(m)
    _expect(max(cnt.values()) <= 2, "nobody is the favorite of three or more")
    if all(k in (0, 2) for k in cnt.values()):
        return _subcase_1(m)
    return _subcase_2(m)


def _discrepancy(m: Market, branch: str, reason: str, mt: Optional[Matching]) -> dict:
    return {
        "type": "DISCREPANCY",
        "branch": branch,
        "reason": reason,
        "market": m.__str__(),
        "fingerprint": m.fingerprint(),
        "fallback_matching": [str(t) for t in mt.triples()] if mt else None,
        "counterexample": mt is None,
    }


def case_of(m: Market) -> int:
    """Smallest back rank over all favorite chains (1..4)."""
    _need_circular(m, 4)
    return min(find_11i_triples(m))


def construct_stable_4(m: Market) -> Construction:
    """Stable matching of a circular n=4 market by the 111/112/113/114 case split.

    If a branch's expected pattern fails or its matching is unstable, the
    result comes from exhaustive search instead and carries a discrepancy
    record.
    """
    _need_circular(m, 4)
    census = find_11i_triples(m)
    case = min(census)
    branch = f"case=11{case}"
    try:
        if case == 1:
            rel, mt_w, branch = _case_111(m, census[1][0])
        elif case == 2:
            rel, mt_w, branch = _case_112(m, census[2][0])
        elif case == 3:
            rel, mt_w, branch = _case_113(m)
        else:
            rel, mt_w, branch = _case_114(m)
        mt = rel.map_matching(mt_w)
        if not is_stable(m, CIRC, mt):
            raise ConstructionError(
                f"unstable result, blocked by {find_blocking_triple(m, CIRC, mt).blocking}"
            )
        return Construction(mt, branch, relabeling=rel)
    except ConstructionError as err:
        log.warning("case analysis failed on %s (%s): %s", m.fingerprint(), branch, err)
        fb = first_stable(m, CIRC)
        return Construction(fb, branch, fallback=True,
                            discrepancy=_discrepancy(m, branch, str(err), fb))


def construct_stable(m: Market, distinguished: AgentId = AgentId(Gender.WOMAN, 0)) -> Construction:
    """Dispatch on market size (1 <= n <= 4)."""
    _need_circular(m)
    if m.n == 4:
        return construct_stable_4(m)
    if m.n == 3:
        return construct_stable_3(m, distinguished)
    if m.n in (1, 2):
        # a_1 with her favorite and his favorite leaves nobody able to block
        y = _fav(m, a(1))
        mt = _complete(m.n, [(0, y.index, _fav(m, y).index)])
        assert is_stable(m, CIRC, mt)
        return Construction(mt, f"n={m.n}/favorites")
    raise ValueError(f"no construction for n={m.n}; only n <= 4 is covered")
