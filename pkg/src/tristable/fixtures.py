"""Known counterexample markets shipped with the package."""
from __future__ import annotations

from functools import lru_cache
from importlib import resources

from .market import Market, parse_market


def fixture_text(name: str) -> str:
    return resources.files(__package__).joinpath("data").joinpath(f"{name}.3gsm").read_text()


@lru_cache(maxsize=None)
def weakest_link_counterexample() -> Market:
    """n=4 full market with no stable matching under the weakest-link rule."""
    return parse_market(fixture_text("weakest4"))


@lru_cache(maxsize=None)
def circular_strong_counterexample() -> Market:
    """n=4 circular market with no strongly stable matching."""
    return parse_market(fixture_text("circular4"))
