"""Finite-level Borel codes: level 1 is an open, level > 1 a union of differences."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import QpolisError
from .space import FiniteSpace


@dataclass(frozen=True)
class BorelCode:
    level: int
    body: object  # open at level 1 (bit-set or open code), else tuple of (BorelCode, BorelCode)

    def __post_init__(self):
        if self.level < 1:
            raise QpolisError("SCHEMA_ERROR", "Borel level must be positive")
        if self.level == 1:
            if not isinstance(self.body, int) and not hasattr(self.body, "find"):
                raise QpolisError("SCHEMA_ERROR", "level-1 code must be an open")
            return
        object.__setattr__(self, "body", tuple(tuple(pair) for pair in self.body))
        for a, b in self.body:
            if a.level >= self.level or b.level >= self.level:
                raise QpolisError("SCHEMA_ERROR", "sub-code levels must decrease")

    @classmethod
    def open(cls, mask):
        return cls(1, mask)

    def opens(self):
        """All level-1 opens mentioned in the code."""
        if self.level == 1:
            yield self.body
            return
        for a, b in self.body:
            yield from a.opens()
            yield from b.opens()


def eval_borel(X: FiniteSpace, code: BorelCode) -> int:
    if code.level == 1:
        if not X.is_open(code.body):
            raise QpolisError("SCHEMA_ERROR", f"{code.body:b} is not open in the ambient space")
        return code.body
    out = 0
    for a, b in code.body:
        out |= eval_borel(X, a) & ~eval_borel(X, b)
    return out & X.full


def sigma2_sets(X: FiniteSpace) -> frozenset[int]:
    """Every finite union of differences of opens, by exhaustive closure."""
    diffs = {u & ~v for u in X.opens for v in X.opens}
    reach = {0}
    for d in sorted(diffs):
        reach |= {r | d for r in reach}
    return frozenset(reach)


def sigma_level_membership(X: FiniteSpace, mask: int, level: int) -> bool:
    """Is ``mask`` a Sigma^0_level set of X?

    On a finite space the hierarchy stops growing at level 2, so any level
    above 2 is answered with the level-2 result.
    """
    if level < 1:
        raise QpolisError("SCHEMA_ERROR", "level must be positive")
    if level == 1:
        return X.is_open(mask)
    return mask in sigma2_sets(X)


def sigma2_code(X: FiniteSpace, mask: int) -> BorelCode:
    """A level-2 code for ``mask``, built from the smallest difference pairs."""
    pairs = []
    covered = 0
    for u in X.opens:
        for v in X.opens:
            d = u & ~v
            if d and d & ~mask == 0 and d & ~covered:
                pairs.append((BorelCode.open(u), BorelCode.open(v)))
                covered |= d
    if covered != mask:
        raise QpolisError("NOT_SIGMA2", f"{mask:b} is not a union of differences of opens")
    return BorelCode(2, pairs)
