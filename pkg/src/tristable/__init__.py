"""Three-gender stable matching: markets, stability, search and constructions."""

__version__ = "0.1.0"

from .market import AgentId, Gender, Kind, Market, MarketError, Matching, Triple, pad_market, parse_market, rank_of, serialize_market
from .rules import Cmp, RuleError, TripleRule, compare_triples, triple_value
from .stability import Mode, count_stable, enumerate_matchings, find_blocking_triple, is_stable, is_strongly_stable

__all__ = [
    "AgentId", "Cmp", "Gender", "Kind", "Market", "MarketError", "Matching", "Mode",
    "RuleError", "Triple", "TripleRule", "compare_triples", "count_stable",
    "enumerate_matchings", "find_blocking_triple", "is_stable", "is_strongly_stable",
    "pad_market", "parse_market", "rank_of", "serialize_market", "triple_value",
]
