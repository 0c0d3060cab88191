"""Fixed enumerations of the rationals and of pairs of naturals.

Rationals are listed by height ``|p| + q`` (q > 0, gcd 1), ascending by value
within a height: 0, -1, 1, -2, -1/2, 1/2, 2, ...  A rational of height h sits
at position O(h^2), so simple rationals come early.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

_ALL: list[Fraction] = []
_POS: list[Fraction] = []
_INDEX: dict[Fraction, int] = {}
_height = 0


def _grow_to(k: int) -> None:
    global _height
    while len(_ALL) <= k:
        _height += 1
        h = _height
        batch = []
        for q in range(1, h + 1):
            p = h - q
            if gcd(p, q) != 1:
                continue
            batch.append(Fraction(p, q))
            if p:
                batch.append(Fraction(-p, q))
        for r in sorted(batch):
            _INDEX[r] = len(_ALL)
            _ALL.append(r)
            if r > 0:
                _POS.append(r)


def rational(k: int) -> Fraction:
    """The k-th rational of the enumeration."""
    _grow_to(k)
    return _ALL[k]


def positive_rational(k: int) -> Fraction:
    """The k-th positive rational, in the same order."""
    while len(_POS) <= k:
        _grow_to(len(_ALL) + 1)
    return _POS[k]


def height(q: Fraction) -> int:
    q = Fraction(q)
    return abs(q.numerator) + q.denominator


def rational_index(q) -> int:
    if not isinstance(q, Fraction):
        q = Fraction(q)
    while q not in _INDEX:
        _grow_to(len(_ALL) + 1)
    return _INDEX[q]


def first_rationals(n: int) -> list[Fraction]:
    if n <= 0:
        return []
    _grow_to(n - 1)
    return _ALL[:n]


def pair(i: int, k: int) -> int:
    """Cantor pairing: position of the k-th item of substream i."""
    return (i + k) * (i + k + 1) // 2 + k


def unpair(n: int) -> tuple[int, int]:
    w = (isqrt(8 * n + 1) - 1) // 2
    k = n - w * (w + 1) // 2
    return w - k, k


def simplest_between(a, b) -> Fraction:
    """The earliest-enumerated rational strictly between a and b.

    That is the least height, ties broken by value; found by trying each
    denominator in turn until it alone exceeds the best height seen.
    """
    lo, hi = sorted((Fraction(a), Fraction(b)))
    if lo == hi:
        raise ValueError("empty interval")
    if lo < 0 < hi:
        return Fraction(0)
    best = None
    q = 1
    while best is None or q < best[0]:
        if lo >= 0:
            p = (lo * q).__floor__() + 1
        else:
            p = (hi * q).__ceil__() - 1
        if lo < Fraction(p, q) < hi:
            cand = (abs(p) + q, Fraction(p, q))
            if best is None or cand < best:
                best = cand
        q += 1
    return best[1]
