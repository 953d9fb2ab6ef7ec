"""Random markets, local search for markets with few stable matchings, and
sampled conjecture campaigns.

Randomness comes from numpy's ``default_rng`` (PCG64). A market is drawn by
taking one ``rng.permutation`` per agent in a_1..a_n, b_1..b_n, c_1..c_n
order; full-list agents draw a permutation of 1..2n and split it into their
two blocks. Campaign sample ``i`` uses the seed sequence ``[seed, i]``, so
results do not depend on how samples are spread over workers.
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .market import AgentId, Gender, Kind, Market
from .rules import TripleRule, check_rule
from .stability import Mode, count_stable

log = logging.getLogger(__name__)

MAX_SEARCH_N = 5
Seed = Union[int, Sequence[int]]


class ConfigError(ValueError):
    pass


def random_market(n: int, kind: Kind, seed: Seed) -> Market:
    kind = Kind(kind)
    if n < 1:
        raise ConfigError("n must be at least 1")
    rng = np.random.default_rng(seed)
    width = 1 if kind is Kind.CIRCULAR else 2
    prefs = []
    for _ in Gender:
        agents = []
        for _ in range(n):
            flat = (rng.permutation(width * n) + 1).tolist()
            agents.append(tuple(tuple(flat[k * n:(k + 1) * n]) for k in range(width)))
        prefs.append(tuple(agents))
    return Market(n, kind, tuple(prefs))


def all_markets(n: int, kind: Kind = Kind.CIRCULAR) -> Iterator[Market]:
    """Every market of size ``n``, lexicographic in the agents' rank vectors."""
    kind = Kind(kind)
    width = 1 if kind is Kind.CIRCULAR else 2
    perms = list(itertools.permutations(range(1, width * n + 1)))
    for combo in itertools.product(perms, repeat=3 * n):
        prefs = tuple(
            tuple(
                tuple(tuple(p[k * n:(k + 1) * n]) for k in range(width))
                for p in combo[g * n:(g + 1) * n]
            )
            for g in range(3)
        )
        yield Market(n, kind, prefs)


# -- local search ------------------------------------------------------------

@dataclass(frozen=True)
class SearchConfig:
    """Local-search settings.

    ``neighbors=None`` tries every alternative permutation of each agent's
    list; an integer ``k`` tries ``k`` random alternatives instead (a
    budgeted variant for full lists, where an agent has (2n)! - 1 of them).
    """

    n: int
    rule: TripleRule
    mode: Mode = Mode.STRICT
    seed: int = 0
    max_sweeps: int = 1000
    neighbors: Optional[int] = None
    start: Optional[Market] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "rule", TripleRule(self.rule))
        object.__setattr__(self, "mode", Mode(self.mode))
        if not 1 <= self.n <= MAX_SEARCH_N:
            raise ConfigError(f"search supports 1 <= n <= {MAX_SEARCH_N}, got {self.n}")
        if self.max_sweeps < 1:
            raise ConfigError("max_sweeps must be positive")
        if self.neighbors is not None and self.neighbors < 1:
            raise ConfigError("neighbors must be positive")
        if self.start is not None:
            if self.start.n != self.n:
                raise ConfigError(f"start market has n={self.start.n}, config n={self.n}")
            check_rule(self.start, self.rule)


@dataclass
class SearchTrace:
    steps: list[tuple[str, int]]
    final: Market
    final_count: int
    sweeps: int
    reason: str
    markets: list[Market] = field(default_factory=list, repr=False)

    @property
    def counterexample(self) -> bool:
        return self.final_count == 0

    def records(self) -> list[dict]:
        rows = [
            {"step": i, "fingerprint": fp, "stable": cnt}
            for i, (fp, cnt) in enumerate(self.steps)
        ]
        rows.append({
            "final": self.final.fingerprint(),
            "stable": self.final_count,
            "sweeps": self.sweeps,
            "reason": self.reason,
            "counterexample": self.counterexample,
        })
        return rows


def _alternatives(m: Market, agent: AgentId, k: Optional[int], rng: np.random.Generator) -> list[tuple[int, ...]]:
    current = m.combined(agent)
    size = len(current)
    if k is None:
        return [p for p in itertools.permutations(range(1, size + 1)) if p != current]
    total = 1
    for i in range(2, size + 1):
        total *= i
    want = min(k, total - 1)
    picked: set[tuple[int, ...]] = set()
    while len(picked) < want:
        p = tuple((rng.permutation(size) + 1).tolist())
        if p != current:
            picked.add(p)
    return sorted(picked)


def _count(m: Market, rule: TripleRule, mode: Mode) -> int:
    return count_stable(m, rule, mode).count


def _count_batch(args: tuple[list[Market], TripleRule, Mode]) -> list[int]:
    markets, rule, mode = args
    return [_count(m, rule, mode) for m in markets]


def local_search_min_stable(cfg: SearchConfig, jobs: int = 1) -> SearchTrace:
    """First-improvement local search minimizing the number of stable matchings.

    Agents are visited a_1..c_n and each agent's alternative lists in
    lexicographic order. The first neighbor with a strictly smaller count is
    adopted and the sweep restarts from a_1. With ``jobs > 1`` one agent's
    neighbors are counted in parallel, but adoption still picks the earliest
    improving neighbor.
    """
    rng = np.random.default_rng([cfg.seed, 1])
    market = cfg.start if cfg.start is not None else random_market(cfg.n, cfg.rule.kind, cfg.seed)
    best = _count(market, cfg.rule, cfg.mode)
    steps = [(market.fingerprint(), best)]
    markets = [market]
    sweeps = 0
    reason = "budget"
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        while True:
            if best == 0:
                reason = "counterexample"
                break
            if sweeps >= cfg.max_sweeps:
                reason = "budget"
                break
            sweeps += 1
            adopted = None
            for agent in market.agents():
                cands = [market.with_ranks(agent, alt)
                         for alt in _alternatives(market, agent, cfg.neighbors, rng)]
                if pool is not None and len(cands) > jobs:
                    size = -(-len(cands) // jobs)
                    batches = [(cands[i:i + size], cfg.rule, cfg.mode) for i in range(0, len(cands), size)]
                    counts = [c for part in pool.map(_count_batch, batches) for c in part]
                else:
                    counts = (_count(c, cfg.rule, cfg.mode) for c in cands)
                for cand, cnt in zip(cands, counts):
                    if cnt < best:
                        adopted = (cand, cnt)
                        break
                if adopted:
                    break
            if adopted is None:
                reason = "local-minimum"
                break
            market, best = adopted
            steps.append((market.fingerprint(), best))
            markets.append(market)
            log.info("sweep %d: stable count %d", sweeps, best)
    finally:
        if pool is not None:
            pool.shutdown()
    return SearchTrace(steps, market, best, sweeps, reason, markets)


# -- conjecture campaigns ----------------------------------------------------

def conjectures_violated(rule: TripleRule, mode: Mode, count: int) -> list[str]:
    """Labels of the open existence claims a stable count would refute."""
    if Mode(mode) is not Mode.STRICT:
        return []
    rule = TripleRule(rule)
    out = []
    if rule is TripleRule.STRONGEST:
        if count == 0:
            out.append("strongest-link-existence")
        if count <= 1:
            out.append("strongest-link-two-stable")
    elif rule is TripleRule.CIRCULAR and count == 0:
        out.append("circular-existence")
    return out


@dataclass(frozen=True)
class Violation:
    index: int
    count: int
    conjectures: tuple[str, ...]
    market: Market

    @property
    def fingerprint(self) -> str:
        return self.market.fingerprint()


@dataclass
class CampaignReport:
    n: int
    rule: TripleRule
    mode: Mode
    samples: int
    seed: int
    min_count: Optional[int] = None
    argmin: Optional[Market] = None
    argmin_index: Optional[int] = None
    histogram: dict[int, int] = field(default_factory=dict)
    violations: list[Violation] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "n": self.n,
            "rule": self.rule.value,
            "mode": self.mode.value,
            "samples": self.samples,
            "seed": self.seed,
            "min": self.min_count,
            "argmin": self.argmin.fingerprint() if self.argmin else None,
            "argmin_index": self.argmin_index,
            "violations": len(self.violations),
        }


def _campaign_market(n: int, kind: Kind, seed: int, i: int) -> Market:
    return random_market(n, kind, [seed, i])


def _campaign_counts(args: tuple[int, TripleRule, Mode, int, int, int]) -> list[int]:
    n, rule, mode, seed, lo, hi = args
    return [_count(_campaign_market(n, rule.kind, seed, i), rule, mode) for i in range(lo, hi)]


def _collect(report: CampaignReport, pairs: Iterable[tuple[int, Market, int]]) -> CampaignReport:
    for i, m, cnt in pairs:
        report.samples = i + 1
        report.histogram[cnt] = report.histogram.get(cnt, 0) + 1
        if report.min_count is None or cnt < report.min_count:
            report.min_count, report.argmin, report.argmin_index = cnt, m, i
        bad = conjectures_violated(report.rule, report.mode, cnt)
        if bad:
            report.violations.append(Violation(i, cnt, tuple(bad), m))
    return report


def conjecture_campaign(
    n: int,
    rule: TripleRule,
    samples: int,
    seed: int = 0,
    mode: Mode = Mode.STRICT,
    jobs: int = 1,
) -> CampaignReport:
    """Count stable matchings in ``samples`` random markets; report the minimum
    and every market refuting an open existence claim."""
    rule, mode = TripleRule(rule), Mode(mode)
    if not 1 <= n <= MAX_SEARCH_N:
        raise ConfigError(f"campaigns support 1 <= n <= {MAX_SEARCH_N}, got {n}")
    if samples < 0:
        raise ConfigError("samples must be non-negative")
    report = CampaignReport(n, rule, mode, 0, seed)
    if jobs > 1 and samples >= 2 * jobs:
        size = -(-samples // jobs)
        spans = [(lo, min(samples, lo + size)) for lo in range(0, samples, size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_campaign_counts, [(n, rule, mode, seed, lo, hi) for lo, hi in spans]))
        counts = [c for part in parts for c in part]
    else:
        counts = _campaign_counts((n, rule, mode, seed, 0, samples))
    pairs = ((i, _campaign_market(n, rule.kind, seed, i), c) for i, c in enumerate(counts))
    report = _collect(report, pairs)
    report.samples = samples
    return report


def exhaustive_campaign(n: int, rule: TripleRule = TripleRule.CIRCULAR, limit: Optional[int] = None,
                        mode: Mode = Mode.STRICT) -> CampaignReport:
    """Campaign over every market of size ``n`` (or the first ``limit`` of them).

    For circular n=3 this is about 10^7 markets and takes hours; it is an
    opt-in check, not part of the test suite.
    """
    rule, mode = TripleRule(rule), Mode(mode)
    report = CampaignReport(n, rule, mode, 0, seed=-1)
    markets = all_markets(n, rule.kind)
    if limit is not None:
        markets = itertools.islice(markets, limit)
    return _collect(report, ((i, m, _count(m, rule, mode)) for i, m in enumerate(markets)))
