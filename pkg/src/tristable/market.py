"""Agents, markets and matchings, plus the ``3gsm v1`` text format.

Preferences are stored as rank vectors: entry ``j`` of a block is the rank
(1 = best) the agent gives to agent ``j`` of the ranked gender. Indices are
0-based in code and 1-based in files and reports.
"""
from __future__ import annotations

import enum
import hashlib
import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence


class MarketError(ValueError):
    """Malformed or inconsistent market data."""


class Gender(enum.IntEnum):
    WOMAN = 0
    MAN = 1
    DOG = 2

    @property
    def letter(self) -> str:
        return "abc"[self]

    @property
    def cared(self) -> "Gender":
        """The gender this one ranks under the circular rule."""
        return Gender((self + 1) % 3)


class Kind(str, enum.Enum):
    CIRCULAR = "circular"
    FULL = "full"


class AgentId(NamedTuple):
    gender: Gender
    index: int

    def __str__(self) -> str:
        return f"{Gender(self.gender).letter}_{self.index + 1}"

    @classmethod
    def parse(cls, name: str) -> "AgentId":
        m = re.fullmatch(r"\s*([abc])_?(\d+)\s*", name)
        if not m or int(m.group(2)) < 1:
            raise MarketError(f"bad agent name {name!r}")
        return cls(Gender("abc".index(m.group(1))), int(m.group(2)) - 1)


def W(i: int) -> AgentId:
    return AgentId(Gender.WOMAN, i)


def M(i: int) -> AgentId:
    return AgentId(Gender.MAN, i)


def D(i: int) -> AgentId:
    return AgentId(Gender.DOG, i)


class Triple(NamedTuple):
    a: int
    b: int
    c: int

    def member(self, gender: int) -> int:
        return self[gender]

    def agents(self) -> tuple[AgentId, AgentId, AgentId]:
        return (W(self.a), M(self.b), D(self.c))

    def with_agent(self, agent: AgentId) -> "Triple":
        """The triple obtained when ``agent`` replaces the member of its gender."""
        parts = list(self)
        parts[agent.gender] = agent.index
        return Triple(*parts)

    def __str__(self) -> str:
        return f"a_{self.a + 1} b_{self.b + 1} c_{self.c + 1}"


def ranked_genders(gender: int, kind: Kind) -> tuple[Gender, ...]:
    """Genders an agent ranks, in block order.

    Full lists hold the two other genders in woman, man, dog order (women
    list men then dogs, men list women then dogs, dogs list women then men).
    """
    g = Gender(gender)
    if kind is Kind.CIRCULAR:
        return (g.cared,)
    return tuple(h for h in Gender if h != g)


def _is_perm(values: Sequence[int], size: int) -> bool:
    return sorted(values) == list(range(1, size + 1))


@dataclass(frozen=True)
class Market:
    """A 3G matching market.

    ``prefs[g][i]`` is a tuple of rank blocks for agent ``i`` of gender ``g``;
    one block of length n for circular markets, two blocks (ordered as in
    :func:`ranked_genders`) jointly forming a permutation of 1..2n for full
    markets.
    """

    n: int
    kind: Kind
    prefs: tuple[tuple[tuple[tuple[int, ...], ...], ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.n < 1:
            raise MarketError("n must be at least 1")
        prefs = tuple(
            tuple(tuple(tuple(int(r) for r in block) for block in agent) for agent in gender)
            for gender in self.prefs
        )
        object.__setattr__(self, "prefs", prefs)
        if len(prefs) != 3:
            raise MarketError("a market has exactly three genders")
        nblocks = 1 if self.kind is Kind.CIRCULAR else 2
        for g, agents in enumerate(prefs):
            if len(agents) != self.n:
                raise MarketError(
                    f"gender {Gender(g).letter} has {len(agents)} agents, expected n={self.n}"
                )
            for i, blocks in enumerate(agents):
                who = AgentId(Gender(g), i)
                if len(blocks) != nblocks:
                    raise MarketError(
                        f"{who}: {len(blocks)} rank blocks, {self.kind.value} markets need {nblocks}"
                    )
                for block in blocks:
                    if len(block) != self.n:
                        raise MarketError(f"{who}: block of length {len(block)}, expected {self.n}")
                flat = [r for block in blocks for r in block]
                if not _is_perm(flat, nblocks * self.n):
                    raise MarketError(
                        f"{who}: ranks {list(flat)} are not a permutation of 1..{nblocks * self.n}"
                    )

    @property
    def max_rank(self) -> int:
        return self.n if self.kind is Kind.CIRCULAR else 2 * self.n

    def agents(self) -> Iterator[AgentId]:
        """All 3n agents in a_1..a_n, b_1..b_n, c_1..c_n order."""
        for g in Gender:
            for i in range(self.n):
                yield AgentId(g, i)

    def ranks(self, agent: AgentId) -> tuple[tuple[int, ...], ...]:
        return self.prefs[agent.gender][agent.index]

    def combined(self, agent: AgentId) -> tuple[int, ...]:
        """The agent's rank blocks concatenated into one vector."""
        return tuple(r for block in self.ranks(agent) for r in block)

    def with_ranks(self, agent: AgentId, flat: Sequence[int]) -> "Market":
        """Copy with ``agent``'s concatenated rank vector replaced."""
        blocks = tuple(
            tuple(flat[k * self.n:(k + 1) * self.n]) for k in range(len(self.ranks(agent)))
        )
        prefs = [list(g) for g in self.prefs]
        prefs[agent.gender][agent.index] = blocks
        return Market(self.n, self.kind, tuple(tuple(g) for g in prefs))

    def favorite(self, agent: AgentId) -> AgentId:
        """The agent's rank-1 partner."""
        for gender, block in zip(ranked_genders(agent.gender, self.kind), self.ranks(agent)):
            if 1 in block:
                return AgentId(gender, block.index(1))
        raise AssertionError("unreachable: every rank vector contains 1")

    def fingerprint(self) -> str:
        return hashlib.sha256(serialize_market(self).encode()).hexdigest()[:16]

    def __str__(self) -> str:
        return serialize_market(self)


def rank_of(m: Market, agent: AgentId, partner: AgentId) -> int:
    """Rank ``agent`` gives ``partner``; lower is better."""
    if not (0 <= agent.index < m.n and 0 <= partner.index < m.n):
        raise MarketError(f"agent index out of range for n={m.n}")
    genders = ranked_genders(agent.gender, m.kind)
    if partner.gender not in genders:
        raise MarketError(
            f"rank undefined for kind {m.kind.value}: {agent} does not rank {partner}"
        )
    return m.ranks(agent)[genders.index(partner.gender)][partner.index]


def circular_market(n: int, women, men, dogs) -> Market:
    """Build a circular market from three lists of rank vectors."""
    return Market(n, Kind.CIRCULAR, tuple(
        tuple((tuple(v),) for v in group) for group in (women, men, dogs)
    ))


def full_market(n: int, women, men, dogs) -> Market:
    """Build a full market from three lists of ``(block, block)`` pairs."""
    return Market(n, Kind.FULL, tuple(
        tuple(tuple(tuple(b) for b in v) for v in group) for group in (women, men, dogs)
    ))


# -- matchings ---------------------------------------------------------------

@dataclass(frozen=True)
class Matching:
    """Woman ``i`` is matched with man ``man_of[i]`` and dog ``dog_of[i]``."""

    man_of: tuple[int, ...]
    dog_of: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "man_of", tuple(int(x) for x in self.man_of))
        object.__setattr__(self, "dog_of", tuple(int(x) for x in self.dog_of))
        n = len(self.man_of)
        if len(self.dog_of) != n:
            raise MarketError("man_of and dog_of differ in length")
        for name, perm in (("man_of", self.man_of), ("dog_of", self.dog_of)):
            if sorted(perm) != list(range(n)):
                raise MarketError(f"{name}={list(perm)} is not a permutation of 0..{n - 1}")

    @property
    def n(self) -> int:
        return len(self.man_of)

    @classmethod
    def from_triples(cls, triples: Sequence[Sequence[int]]) -> "Matching":
        n = len(triples)
        man_of, dog_of = [-1] * n, [-1] * n
        for a, b, c in triples:
            if not 0 <= a < n or man_of[a] != -1:
                raise MarketError(f"triples {list(triples)} do not partition the agents")
            man_of[a], dog_of[a] = b, c
        return cls(tuple(man_of), tuple(dog_of))

    @classmethod
    def identity(cls, n: int) -> "Matching":
        return cls(tuple(range(n)), tuple(range(n)))

    def triples(self) -> list[Triple]:
        return [Triple(a, b, c) for a, (b, c) in enumerate(zip(self.man_of, self.dog_of))]

    def triple_of(self, agent: AgentId) -> Triple:
        if agent.gender == Gender.WOMAN:
            a = agent.index
        elif agent.gender == Gender.MAN:
            a = self.man_of.index(agent.index)
        else:
            a = self.dog_of.index(agent.index)
        return Triple(a, self.man_of[a], self.dog_of[a])

    def __str__(self) -> str:
        return "\n".join(str(t) for t in self.triples())


def parse_matching(text: str) -> Matching:
    """Parse ``a_i b_j c_k`` lines."""
    triples = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        names = line.replace(",", " ").split()
        if len(names) != 3:
            raise MarketError(f"bad matching line {line!r}")
        ids = [AgentId.parse(x) for x in names]
        if [int(x.gender) for x in ids] != [0, 1, 2]:
            raise MarketError(f"matching line {line!r} must list a woman, a man and a dog")
        triples.append(tuple(x.index for x in ids))
    return Matching.from_triples(triples)


# -- file format -------------------------------------------------------------

_HEADER = re.compile(r"3gsm\s+v1\s+kind=(circular|full)\s+n=(\d+)")
_ROW = re.compile(r"([abc]_\d+)\s*:\s*\[(.*)\]")


def _ints(text: str, who: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise MarketError(f"{who}: non-integer rank in [{text}]") from None


def parse_market(text: str) -> Market:
    """Parse a ``3gsm v1`` document. Blank lines and ``#`` comments are ignored."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise MarketError("empty market document")
    header = _HEADER.fullmatch(lines[0])
    if not header:
        raise MarketError(f"bad header {lines[0]!r}; expected '3gsm v1 kind=<circular|full> n=<N>'")
    kind, n = Kind(header.group(1)), int(header.group(2))
    if n < 1:
        raise MarketError("n must be at least 1")
    rows: dict[AgentId, tuple[tuple[int, ...], ...]] = {}
    for line in lines[1:]:
        row = _ROW.fullmatch(line)
        if not row:
            raise MarketError(f"bad agent line {line!r}")
        who = AgentId.parse(row.group(1))
        if who.index >= n:
            raise MarketError(f"{who}: index exceeds n={n}")
        if who in rows:
            raise MarketError(f"{who}: listed twice")
        parts = row.group(2).split("|")
        if kind is Kind.CIRCULAR and len(parts) != 1:
            raise MarketError(f"{who}: circular markets take a single rank block")
        if kind is Kind.FULL and len(parts) != 2:
            raise MarketError(f"{who}: full markets take two rank blocks separated by '|'")
        blocks = tuple(_ints(p, str(who)) for p in parts)
        for block in blocks:
            if len(block) != n:
                raise MarketError(f"{who}: block {list(block)} has length {len(block)}, n={n}")
        flat = [r for b in blocks for r in b]
        if not _is_perm(flat, len(blocks) * n):
            raise MarketError(
                f"{who}: ranks {flat} are not a permutation of 1..{len(blocks) * n}"
            )
        rows[who] = blocks
    missing = [str(AgentId(Gender(g), i)) for g in Gender for i in range(n)
               if AgentId(Gender(g), i) not in rows]
    if missing:
        raise MarketError(f"missing agents: {', '.join(missing)}")
    prefs = tuple(tuple(rows[AgentId(g, i)] for i in range(n)) for g in Gender)
    return Market(n, kind, prefs)


def serialize_market(m: Market) -> str:
    out = [f"3gsm v1 kind={m.kind.value} n={m.n}"]
    for who in m.agents():
        blocks = " | ".join(",".join(str(r) for r in b) for b in m.ranks(who))
        out.append(f"{who}: [{blocks}]")
    return "\n".join(out) + "\n"


# -- padding -----------------------------------------------------------------

def pad_market(m: Market, target_n: int) -> Market:
    """Add dummy agents until every gender has ``target_n`` members.

    Real agents rank dummies after every real agent, dummies in index order
    (for full lists: first-block dummies, then second-block dummies). Dummies
    rank everyone in index order.
    """
    if target_n < m.n:
        raise MarketError(f"target_n={target_n} is smaller than n={m.n}")
    if target_n == m.n:
        return m
    n, t = m.n, target_n
    extra = t - n
    prefs = []
    for g in Gender:
        agents = []
        for i in range(n):
            blocks = m.prefs[g][i]
            nb = len(blocks)
            top = nb * n
            agents.append(tuple(
                block + tuple(range(top + k * extra + 1, top + (k + 1) * extra + 1))
                for k, block in enumerate(blocks)
            ))
        nb = len(m.prefs[g][0])
        for _ in range(extra):
            agents.append(tuple(tuple(range(k * t + 1, (k + 1) * t + 1)) for k in range(nb)))
        prefs.append(tuple(agents))
    return Market(t, m.kind, tuple(prefs))
