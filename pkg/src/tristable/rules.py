"""Triple-preference rules.

Every rule reduces an agent's view of a triple to one integer (lower is
better), so comparing triples is comparing integers.
"""
from __future__ import annotations

import enum
from functools import lru_cache

import numpy as np

from .market import AgentId, Gender, Kind, Market, MarketError, Triple, ranked_genders, rank_of


class RuleError(ValueError):
    """Rule used with a market of the wrong kind."""


class TripleRule(str, enum.Enum):
    CIRCULAR = "circular"
    WEAKEST = "weakest"
    STRONGEST = "strongest"

    @property
    def kind(self) -> Kind:
        return Kind.CIRCULAR if self is TripleRule.CIRCULAR else Kind.FULL


class Cmp(enum.Enum):
    BETTER = "better"
    EQUAL = "equal"
    WORSE = "worse"


def check_rule(m: Market, rule: TripleRule) -> TripleRule:
    rule = TripleRule(rule)
    if m.kind is not rule.kind:
        raise RuleError(f"rule {rule.value} needs a {rule.kind.value} market, got {m.kind.value}")
    return rule


def triple_value(m: Market, rule: TripleRule, agent: AgentId, t: Triple) -> int:
    """Value of ``t`` for ``agent`` as if the agent took its gender's seat in ``t``."""
    rule = check_rule(m, rule)
    ranks = [
        rank_of(m, agent, AgentId(g, t[g])) for g in ranked_genders(agent.gender, m.kind)
    ]
    if rule is TripleRule.STRONGEST:
        return min(ranks)
    # circular has one rank; weakest link takes the worse partner
    return max(ranks)


def compare_triples(m: Market, rule: TripleRule, agent: AgentId, t1: Triple, t2: Triple) -> Cmp:
    v1 = triple_value(m, rule, agent, t1)
    v2 = triple_value(m, rule, agent, t2)
    if v1 < v2:
        return Cmp.BETTER
    if v1 == v2:
        return Cmp.EQUAL
    return Cmp.WORSE


def rank_matrices(m: Market) -> list[list[np.ndarray]]:
    """``out[g][k][i, j]``: rank agent i of gender g gives agent j of its k-th ranked gender."""
    return [
        [np.array([m.prefs[g][i][k] for i in range(m.n)], dtype=np.int16)
         for k in range(len(m.prefs[g][0]))]
        for g in Gender
    ]


@lru_cache(maxsize=512)
def value_tensors(m: Market, rule: TripleRule) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Triple values for all n^3 triples, one ``(n, n, n)`` array per gender.

    ``out[g][a, b, c]`` is the value the gender-``g`` member of ``(a, b, c)``
    assigns to that triple. Arrays are read-only.
    """
    rule = check_rule(m, rule)
    R = rank_matrices(m)
    n = m.n
    shape = (n, n, n)
    if rule is TripleRule.CIRCULAR:
        va = R[0][0][:, :, None]          # woman a ranks man b
        vb = R[1][0][None, :, :]          # man b ranks dog c
        vc = R[2][0].T[:, None, :]        # dog c ranks woman a
        out = [np.broadcast_to(v, shape) for v in (va, vb, vc)]
    else:
        pick = np.minimum if rule is TripleRule.STRONGEST else np.maximum
        va = pick(R[0][0][:, :, None], R[0][1][:, None, :])
        vb = pick(R[1][0].T[:, :, None], R[1][1][None, :, :])
        vc = pick(R[2][0].T[:, None, :], R[2][1].T[None, :, :])
        out = [np.broadcast_to(v, shape) for v in (va, vb, vc)]
    result = tuple(np.ascontiguousarray(v) for v in out)
    for v in result:
        v.flags.writeable = False
    return result


def embed_circular(m: Market, cared_on_top: bool) -> Market:
    """Full market inducing the same triple order as the circular market ``m``.

    The cared-about gender keeps its circular order and occupies combined
    ranks 1..n (``cared_on_top``) or n+1..2n; the other gender fills the
    remaining ranks in index order. With the cared gender on top the
    strongest-link rule reproduces the circular preferences; with it at the
    bottom the weakest-link rule does.
    """
    if m.kind is not Kind.CIRCULAR:
        raise MarketError("embed_circular needs a circular market")
    n = m.n
    cared_off, other_off = (0, n) if cared_on_top else (n, 0)
    prefs = []
    for g in Gender:
        agents = []
        for i in range(n):
            cared = tuple(r + cared_off for r in m.prefs[g][i][0])
            other = tuple(range(other_off + 1, other_off + n + 1))
            blocks = tuple(
                cared if h == g.cared else other for h in ranked_genders(g, Kind.FULL)
            )
            agents.append(blocks)
        prefs.append(tuple(agents))
    return Market(n, Kind.FULL, tuple(prefs))


def embedding_rule(cared_on_top: bool) -> TripleRule:
    return TripleRule.STRONGEST if cared_on_top else TripleRule.WEAKEST
