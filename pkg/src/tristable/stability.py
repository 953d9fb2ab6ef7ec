"""Blocking triples, stability predicates and brute-force counting.

Two independent routes decide stability. :func:`find_blocking_triple` scans
triples one by one through :func:`~tristable.rules.triple_value`;
:func:`count_stable` evaluates every matching at once with numpy arrays
built by :func:`~tristable.rules.value_tensors`. The test suite checks that
they agree.
"""
from __future__ import annotations

import enum
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from .market import AgentId, Gender, Market, MarketError, Matching, Triple
from .rules import Cmp, TripleRule, check_rule, triple_value, value_tensors

MAX_COUNT_N = 6
# matchings per vectorized batch; keeps the (batch, n, n, n) masks small
_BATCH_CELLS = 1 << 22


class Mode(str, enum.Enum):
    STRICT = "strict"
    WEAK = "weak"


class GuardError(ValueError):
    """Instance too large for exhaustive enumeration."""


@dataclass(frozen=True)
class BlockingReport:
    mode: Mode
    blocking: Optional[Triple] = None
    witnesses: tuple[Cmp, ...] = ()

    def __bool__(self) -> bool:
        return self.blocking is not None


def _current_values(m: Market, rule: TripleRule, mt: Matching) -> dict[AgentId, int]:
    return {x: triple_value(m, rule, x, mt.triple_of(x)) for x in m.agents()}


def find_blocking_triple(
    m: Market,
    rule: TripleRule,
    mt: Matching,
    mode: Mode = Mode.STRICT,
    short_circuit: bool = True,
) -> BlockingReport:
    """First blocking triple in lexicographic ``(a, b, c)`` order, if any.

    With ``short_circuit`` (strict mode only) agents whose current value is 1
    are skipped, since they cannot strictly improve.
    """
    rule = check_rule(m, rule)
    mode = Mode(mode)
    if mt.n != m.n:
        raise MarketError(f"matching has size {mt.n}, market has n={m.n}")
    cur = _current_values(m, rule, mt)
    skip = short_circuit and mode is Mode.STRICT

    def open_(agent: AgentId) -> bool:
        return not (skip and cur[agent] == 1)

    n = m.n
    for a in range(n):
        wa = AgentId(Gender.WOMAN, a)
        if not open_(wa):
            continue
        for b in range(n):
            mb = AgentId(Gender.MAN, b)
            if not open_(mb):
                continue
            for c in range(n):
                dc = AgentId(Gender.DOG, c)
                if not open_(dc):
                    continue
                t = Triple(a, b, c)
                wit = []
                for x in (wa, mb, dc):
                    v = triple_value(m, rule, x, t)
                    wit.append(Cmp.BETTER if v < cur[x] else Cmp.EQUAL if v == cur[x] else Cmp.WORSE)
                if mode is Mode.STRICT:
                    hit = all(w is Cmp.BETTER for w in wit)
                else:
                    hit = Cmp.WORSE not in wit and Cmp.BETTER in wit
                if hit:
                    return BlockingReport(mode, t, tuple(wit))
    return BlockingReport(mode)


def is_stable(m: Market, rule: TripleRule, mt: Matching) -> bool:
    return not find_blocking_triple(m, rule, mt, Mode.STRICT)


def is_strongly_stable(m: Market, rule: TripleRule, mt: Matching) -> bool:
    return not find_blocking_triple(m, rule, mt, Mode.WEAK)


def enumerate_matchings(n: int) -> Iterator[Matching]:
    """All n!^2 matchings, ordered lexicographically by ``(man_of, dog_of)``."""
    perms = list(itertools.permutations(range(n)))
    for man_of in perms:
        for dog_of in perms:
            yield Matching(man_of, dog_of)


@lru_cache(maxsize=8)
def matching_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(man_of, dog_of)`` arrays of shape ``(n!^2, n)`` in enumeration order."""
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp).reshape(-1, n)
    k = len(perms)
    man = np.repeat(perms, k, axis=0)
    dog = np.tile(perms, (k, 1))
    man.flags.writeable = False
    dog.flags.writeable = False
    return man, dog


def blocked_mask(m: Market, rule: TripleRule, mode: Mode, man: np.ndarray, dog: np.ndarray) -> np.ndarray:
    """Boolean array: which of the given matchings have a (weakly) blocking triple."""
    va, vb, vc = value_tensors(m, check_rule(m, rule))
    k, n = man.shape
    rows = np.arange(k)[:, None]
    women = np.arange(n)[None, :]
    cur_a = va[women, man, dog]
    cur_b = np.empty_like(cur_a)
    cur_b[rows, man] = vb[women, man, dog]
    cur_c = np.empty_like(cur_a)
    cur_c[rows, dog] = vc[women, man, dog]
    ca = cur_a[:, :, None, None]
    cb = cur_b[:, None, :, None]
    cc = cur_c[:, None, None, :]
    if Mode(mode) is Mode.STRICT:
        hit = (va < ca) & (vb < cb) & (vc < cc)
    else:
        hit = (va <= ca) & (vb <= cb) & (vc <= cc) & ((va < ca) | (vb < cb) | (vc < cc))
    return hit.reshape(k, -1).any(axis=1)


def _guard(n: int) -> None:
    if n > MAX_COUNT_N:
        raise GuardError(f"exhaustive enumeration refused for n={n} > {MAX_COUNT_N}")


def _stable_indices(m: Market, rule: TripleRule, mode: Mode, lo: int, hi: int) -> np.ndarray:
    man, dog = matching_arrays(m.n)
    step = max(1, _BATCH_CELLS // m.n ** 3)
    found = []
    for s in range(lo, hi, step):
        e = min(hi, s + step)
        mask = blocked_mask(m, rule, mode, man[s:e], dog[s:e])
        found.append(np.flatnonzero(~mask) + s)
    return np.concatenate(found) if found else np.zeros(0, dtype=np.intp)


@dataclass(frozen=True)
class StableCount:
    count: int
    matchings: Optional[tuple[Matching, ...]] = None
    first: Optional[Matching] = field(default=None, compare=False)


def _chunks(total: int, jobs: int) -> list[tuple[int, int]]:
    size = math.ceil(total / jobs)
    return [(s, min(total, s + size)) for s in range(0, total, size)]


def count_stable(
    m: Market,
    rule: TripleRule,
    mode: Mode = Mode.STRICT,
    with_list: bool = False,
    jobs: int = 1,
) -> StableCount:
    """Number of matchings with no (weakly) blocking triple.

    ``jobs > 1`` splits the matching space across worker processes; the
    result does not depend on the number of workers.
    """
    rule = check_rule(m, rule)
    mode = Mode(mode)
    _guard(m.n)
    total = math.factorial(m.n) ** 2
    if jobs > 1 and total >= 4 * jobs:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(
                _stable_indices, *zip(*[(m, rule, mode, lo, hi) for lo, hi in _chunks(total, jobs)])
            ))
        idx = np.concatenate(parts)
    else:
        idx = _stable_indices(m, rule, mode, 0, total)
    man, dog = matching_arrays(m.n)
    first = Matching(tuple(man[idx[0]]), tuple(dog[idx[0]])) if len(idx) else None
    listed = None
    if with_list:
        listed = tuple(Matching(tuple(man[i]), tuple(dog[i])) for i in idx)
    return StableCount(int(len(idx)), listed, first)


def stable_set(m: Market, rule: TripleRule, mode: Mode = Mode.STRICT) -> frozenset[Matching]:
    return frozenset(count_stable(m, rule, mode, with_list=True).matchings or ())


def has_stable(m: Market, rule: TripleRule, mode: Mode = Mode.STRICT) -> bool:
    """True as soon as one stable matching is found."""
    rule = check_rule(m, rule)
    _guard(m.n)
    man, dog = matching_arrays(m.n)
    step = max(1, min(len(man), 2048))
    for s in range(0, len(man), step):
        if not blocked_mask(m, rule, mode, man[s:s + step], dog[s:s + step]).all():
            return True
    return False


def first_stable(m: Market, rule: TripleRule, mode: Mode = Mode.STRICT) -> Optional[Matching]:
    """Lexicographically least stable matching, or None."""
    return count_stable(m, rule, mode).first
