"""Samplers for circular n=4 markets in the rarer favorite-chain cases."""
from __future__ import annotations

from collections import Counter

import numpy as np

from tristable.constructive import case_of, favorite_counts
from tristable.market import circular_market

N = 4


def _favorites(rng: np.random.Generator, pattern: str) -> list[list[int]]:
    """fav[g][i]: index (in gender g+1) of agent (g, i)'s favorite."""
    while True:
        favs = []
        for _ in range(3):
            if pattern == "bijective":
                favs.append(list(rng.permutation(N)))
            elif pattern == "pairs":
                two = rng.choice(N, size=2, replace=False)
                favs.append(list(rng.permutation([two[0], two[0], two[1], two[1]])))
            else:
                favs.append(list(rng.integers(0, N, size=N)))
        counts = [Counter(f) for f in favs]
        if pattern == "mixed":
            if any(max(c.values()) > 2 for c in counts):
                continue
            if not any(1 in c.values() for c in counts):
                continue
        return favs


def sample_case_market(rng: np.random.Generator, case: str, tries: int = 10_000):
    """Circular n=4 market in ``case``: '114', '113-1' (counts 0/2) or '113-2'."""
    pattern = {"114": "bijective", "113-1": "pairs", "113-2": "mixed"}[case]
    floor = 4 if case == "114" else 3
    for _ in range(tries):
        favs = _favorites(rng, pattern)
        groups = []
        ok = True
        for g in range(3):
            # agents z of gender g; chain origins x of gender g+1 with fav(fav(x)) = z
            prev = (g + 1) % 3
            rows = []
            for z in range(N):
                origins = [x for x in range(N) if favs[(prev + 1) % 3][favs[prev][x]] == z]
                fav = favs[g][z]
                if fav in origins:
                    ok = False
                    break
                ranks = [0] * N
                ranks[fav] = 1
                high = [r for r in range(floor, N + 1)]
                if len(origins) > len(high):
                    ok = False
                    break
                for x, r in zip(origins, rng.permutation(high)):
                    ranks[x] = int(r)
                free = [r for r in range(2, N + 1) if r not in ranks]
                for x, r in zip([i for i in range(N) if ranks[i] == 0], rng.permutation(free)):
                    ranks[x] = int(r)
                rows.append(ranks)
            if not ok:
                break
            groups.append(rows)
        if not ok:
            continue
        m = circular_market(N, *groups)
        if case == "114" and case_of(m) == 4:
            return m
        if case.startswith("113") and case_of(m) == 3:
            counts = set(favorite_counts(m).values())
            if (case == "113-1") == counts.issubset({0, 2}):
                return m
    raise RuntimeError(f"no {case} market found in {tries} tries")
