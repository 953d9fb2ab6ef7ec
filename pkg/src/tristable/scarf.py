"""Balanced collections of triples and realizability of utility goals.

Everything here is exact: weights are :class:`fractions.Fraction` and the
feasibility test is a phase-one simplex over the rationals with Bland's
rule, which cannot cycle.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .market import AgentId, Gender, Market, Matching, Triple, circular_market
from .rules import TripleRule, check_rule, triple_value, value_tensors
from .stability import GuardError, MAX_COUNT_N, matching_arrays


class ReconstructionError(AssertionError):
    """The built-in non-balanced instance failed its own consistency checks."""


@dataclass(frozen=True)
class TripleCollection:
    n: int
    triples: tuple[Triple, ...]

    def __post_init__(self) -> None:
        ts = tuple(Triple(*t) for t in self.triples)
        if len(set(ts)) != len(ts):
            raise ValueError("duplicate triples in collection")
        for t in ts:
            if not all(0 <= x < self.n for x in t):
                raise ValueError(f"triple {t} out of range for n={self.n}")
        object.__setattr__(self, "triples", tuple(sorted(ts)))

    def containing(self, agent: AgentId) -> list[Triple]:
        return [t for t in self.triples if t[agent.gender] == agent.index]

    def __iter__(self):
        return iter(self.triples)

    def __len__(self) -> int:
        return len(self.triples)


Weighting = dict[Triple, Fraction]


def parse_collection(text: str, n: Optional[int] = None) -> TripleCollection:
    """One ``i j k`` line (1-based woman, man, dog) per triple."""
    triples = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 3:
            raise ValueError(f"bad triple line {line!r}")
        triples.append(Triple(*(int(p) - 1 for p in parts)))
    if n is None:
        n = max((max(t) for t in triples), default=-1) + 1
    return TripleCollection(n, tuple(triples))


def _persons(n: int) -> list[AgentId]:
    return [AgentId(g, i) for g in Gender for i in range(n)]


def weighting_errors(c: TripleCollection, weights: Mapping[Triple, Fraction]) -> list[str]:
    """Violated constraints of a weighting; empty means it is valid."""
    errs = []
    for t, w in weights.items():
        if t not in c.triples:
            errs.append(f"weight on triple {t} outside the collection")
        if w < 0:
            errs.append(f"negative weight {w} on {t}")
    for x in _persons(c.n):
        total = sum((Fraction(weights.get(t, 0)) for t in c.containing(x)), Fraction(0))
        if total != 1:
            errs.append(f"{x}: weights sum to {total}")
    return errs


def feasible_nonnegative(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Optional[list[Fraction]]:
    """A point ``x >= 0`` with ``A x = b``, or None. Exact phase-one simplex."""
    m = len(A)
    nv = len(A[0]) if m else 0
    rows = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        row = [Fraction(sign * v) for v in A[i]]
        row += [Fraction(int(i == k)) for k in range(m)]
        row.append(Fraction(sign * b[i]))
        rows.append(row)
    basis = list(range(nv, nv + m))
    cost = [Fraction(0)] * nv + [Fraction(1)] * m
    width = nv + m
    while True:
        reduced = [
            cost[j] - sum((cost[basis[i]] * rows[i][j] for i in range(m)), Fraction(0))
            for j in range(width)
        ]
        enter = next((j for j in range(width) if reduced[j] < 0), None)
        if enter is None:
            break
        leave = None
        for i in range(m):
            if rows[i][enter] > 0:
                ratio = rows[i][-1] / rows[i][enter]
                if leave is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            # unbounded below cannot happen: the phase-one objective is >= 0
            raise AssertionError("phase-one simplex unbounded")
        piv = rows[leave][enter]
        rows[leave] = [v / piv for v in rows[leave]]
        for i in range(m):
            if i != leave and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [v - f * p for v, p in zip(rows[i], rows[leave])]
        basis[leave] = enter
    x = [Fraction(0)] * width
    for i, j in enumerate(basis):
        x[j] = rows[i][-1]
    if any(x[nv:]):
        return None
    return x[:nv]


def is_balanced_collection(c: TripleCollection) -> Optional[Weighting]:
    """Nonnegative rational weights summing to 1 over each person's triples, if any exist."""
    persons = _persons(c.n)
    if not c.triples:
        return None
    A = [[Fraction(int(t[x.gender] == x.index)) for t in c.triples] for x in persons]
    x = feasible_nonnegative(A, [Fraction(1)] * len(persons))
    if x is None:
        return None
    weights = dict(zip(c.triples, x))
    assert not weighting_errors(c, weights)
    return weights


# -- utility goals -----------------------------------------------------------

@dataclass(frozen=True)
class UtilityVector:
    """``goals[g][i]``: the worst triple value agent ``(g, i)`` accepts."""

    goals: tuple[tuple[int, ...], ...]

    @classmethod
    def uniform(cls, n: int, goal: int) -> "UtilityVector":
        return cls(tuple((goal,) * n for _ in Gender))

    def __getitem__(self, agent: AgentId) -> int:
        return self.goals[agent.gender][agent.index]

    def check(self, m: Market) -> None:
        for x in m.agents():
            if not 1 <= self[x] <= m.max_rank:
                raise ValueError(f"goal {self[x]} for {x} outside 1..{m.max_rank}")


def realizable_for_triple(m: Market, rule: TripleRule, u: UtilityVector, t: Triple) -> bool:
    check_rule(m, rule)
    return all(triple_value(m, rule, x, t) <= u[x] for x in Triple(*t).agents())


def find_realization(m: Market, rule: TripleRule, u: UtilityVector) -> Optional[Matching]:
    """Lexicographically first matching meeting every goal, if one exists."""
    rule = check_rule(m, rule)
    if m.n > MAX_COUNT_N:
        raise GuardError(f"exhaustive enumeration refused for n={m.n} > {MAX_COUNT_N}")
    u.check(m)
    va, vb, vc = value_tensors(m, rule)
    man, dog = matching_arrays(m.n)
    women = np.arange(m.n)[None, :]
    goals = [np.array(g) for g in u.goals]
    ok = (
        (va[women, man, dog] <= goals[0][women]).all(axis=1)
        & (vb[women, man, dog] <= goals[1][man]).all(axis=1)
        & (vc[women, man, dog] <= goals[2][dog]).all(axis=1)
    )
    hits = np.flatnonzero(ok)
    if not len(hits):
        return None
    k = hits[0]
    return Matching(tuple(man[k]), tuple(dog[k]))


# -- the 3+3+3 non-balanced instance ----------------------------------------

# Each agent's two acceptable partners (ranks 1 and 2, in index order).
_TOP_TWO = {
    Gender.WOMAN: ((0, 2), (0, 1), (1, 2)),
    Gender.MAN: ((0, 2), (1, 2), (0, 1)),
    Gender.DOG: ((0, 1), (1, 2), (0, 2)),
}
_SHADED = ((1, 0, 0), (1, 1, 1), (0, 0, 2), (0, 2, 0), (2, 1, 2), (2, 2, 1))
_ALL_TRIANGLES = _SHADED + ((0, 0, 0), (2, 1, 1))


@dataclass(frozen=True)
class NonBalancedInstance:
    market: Market
    collection: TripleCollection
    utility: UtilityVector


def _ranks_from_top_two(top: tuple[int, int], n: int = 3) -> tuple[int, ...]:
    ranks = [0] * n
    ranks[top[0]], ranks[top[1]] = 1, 2
    rest = iter(range(3, n + 1))
    return tuple(r if r else next(rest) for r in ranks)


def build_nonbalanced_instance() -> NonBalancedInstance:
    """Circular n=3 market whose goal-2 utility vector is realizable on every
    triple of a balanced collection but not globally.

    Raises :class:`ReconstructionError` if the instance does not satisfy its
    defining properties.
    """
    n = 3
    market = circular_market(n, *(
        [_ranks_from_top_two(t) for t in _TOP_TWO[g]] for g in Gender
    ))
    collection = TripleCollection(n, tuple(Triple(*t) for t in _SHADED))
    utility = UtilityVector.uniform(n, 2)
    rule = TripleRule.CIRCULAR

    for x in _persons(n):
        k = len(collection.containing(x))
        if k != 2:
            raise ReconstructionError(f"{x} lies in {k} collection triples, expected 2")
    good = {t for t in (Triple(a, b, c) for a in range(n) for b in range(n) for c in range(n))
            if realizable_for_triple(market, rule, utility, t)}
    if good != {Triple(*t) for t in _ALL_TRIANGLES}:
        raise ReconstructionError(f"goal-satisfying triples {sorted(good)} differ from the drawn triangles")
    with_a2 = sorted(t for t in good if t.a == 1)
    if with_a2 != [Triple(1, 0, 0), Triple(1, 1, 1)]:
        raise ReconstructionError(f"triples containing a_2: {with_a2}")
    if find_realization(market, rule, utility) is not None:
        raise ReconstructionError("goal-2 utility vector is globally realizable")
    return NonBalancedInstance(market, collection, utility)


@dataclass
class Stage:
    name: str
    passed: bool
    detail: str


@dataclass
class BalanceReport:
    stages: list[Stage]
    weighting: Optional[Weighting]

    @property
    def ok(self) -> bool:
        return all(s.passed for s in self.stages)

    @property
    def message(self) -> str:
        if self.ok:
            return "circular 3GSM is not a balanced game - witness verified"
        failed = next(s for s in self.stages if not s.passed)
        return f"witness FAILED at stage {failed.name}: {failed.detail}"


def verify_not_balanced_game(instance: Optional[NonBalancedInstance] = None) -> BalanceReport:
    """Check the three facts that make the instance a non-balancedness witness."""
    inst = instance or build_nonbalanced_instance()
    m, c, u = inst.market, inst.collection, inst.utility
    rule = TripleRule.CIRCULAR
    stages = []

    weights = is_balanced_collection(c)
    half = {t: Fraction(1, 2) for t in c}
    half_errs = weighting_errors(c, half)
    stages.append(Stage(
        "balanced",
        weights is not None and not half_errs,
        "all weights 1/2 validate" if not half_errs else "; ".join(half_errs),
    ))

    bad = [t for t in c if not realizable_for_triple(m, rule, u, t)]
    stages.append(Stage(
        "per-triple-realizable",
        not bad,
        f"{len(c) - len(bad)}/{len(c)} collection triples meet every goal",
    ))

    found = find_realization(m, rule, u)
    stages.append(Stage(
        "globally-unrealizable",
        found is None,
        "no matching meets every goal" if found is None else f"realized by {found.triples()}",
    ))
    return BalanceReport(stages, weights)

