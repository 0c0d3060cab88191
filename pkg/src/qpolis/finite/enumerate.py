"""Generators of finite T0 spaces: exhaustive up to homeomorphism, or seeded random.

A finite T0 space is the Alexandrov space of its specialization order, so
both generators work with partial orders given as sets of index pairs.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import permutations

from .space import FiniteSpace, bits


def _canonical(n, strict):
    best = None
    for perm in permutations(range(n)):
        key = tuple(sorted((perm[i], perm[j]) for i, j in strict))
        if best is None or key < best:
            best = key
    return best


@lru_cache(maxsize=None)
def posets_up_to_iso(n: int) -> tuple[tuple, ...]:
    """Strict orders on range(n), one per isomorphism class, canonical form."""
    if n == 0:
        return ((),)
    out = set()
    for strict in posets_up_to_iso(n - 1):
        below = {j: {i for i, jj in strict if jj == j} for j in range(n - 1)}
        above = {i: {j for ii, j in strict if ii == i} for i in range(n - 1)}
        for dmask in range(1 << (n - 1)):
            down = set(bits(dmask))
            if any(below[d] - down for d in down):
                continue
            for umask in range(1 << (n - 1)):
                up = set(bits(umask))
                if up & down or any(above[u] - up for u in up):
                    continue
                if any((d, u) not in strict for d in down for u in up):
                    continue
                new = set(strict) | {(d, n - 1) for d in down} | {(n - 1, u) for u in up}
                out.add(_canonical(n, new))
    return tuple(sorted(out))


def space_from_strict(n: int, strict) -> FiniteSpace:
    leq = set(strict) | {(i, i) for i in range(n)}
    return FiniteSpace.from_order(list(range(n)), leq)


def all_t0_spaces(max_points: int, min_points: int = 1):
    """Every finite T0 space with the given point counts, up to homeomorphism."""
    for n in range(min_points, max_points + 1):
        for strict in posets_up_to_iso(n):
            yield space_from_strict(n, strict)


def random_strict_order(rng: random.Random, n: int, density: float | None = None):
    density = rng.random() if density is None else density
    perm = list(range(n))
    rng.shuffle(perm)
    rel = set()
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < density:
                rel.add((perm[a], perm[b]))
    # transitive closure
    changed = True
    while changed:
        changed = False
        for i, j in list(rel):
            for jj, k in list(rel):
                if j == jj and (i, k) not in rel:
                    rel.add((i, k))
                    changed = True
    return rel


def random_t0_space(rng: random.Random, max_points: int, min_points: int = 1) -> FiniteSpace:
    n = rng.randint(min_points, max_points)
    return space_from_strict(n, random_strict_order(rng, n))
