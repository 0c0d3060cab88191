"""Completion of a countable metric space, copresented by formal balls.

Indices are ("B", i, r): the formal ball around the i-th point of D with
positive rational radius r.  ``B(b,s)`` is formally inside ``B(a,r)`` when
d(a,b) + s <= r, strictly inside when d(a,b) + s < r.  A point is a Cauchy
filter of formal balls:

    up          B(b,s) => B(a,r)       when B(b,s) is formally inside B(a,r)
    directed    B1 and B2 => some ball formally inside both
    small(n)    T => some ball of radius < 1/(2n)
    inner       B(a,r) => some ball strictly inside B(a,r)
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ..errors import QpolisError
from ..rationals import positive_rational, unpair
from .codes import TOP, CountableIndex, Copresentation, EnumOpenCode, OpenCode, Pi02Relation, \
    RelationFamily


def is_ball(label) -> bool:
    return isinstance(label, tuple) and len(label) == 3 and label[0] == "B"


@dataclass(frozen=True, eq=False)
class MetricData:
    """A countable metric space: ``point(i)`` and an exact distance ``dist(a, b)``.

    ``size`` is None for an infinite enumeration.
    """

    point: Callable[[int], object]
    dist: Callable[[object, object], Fraction]
    size: int | None = None

    @classmethod
    def finite(cls, points, dist):
        points = tuple(points)
        return cls(points.__getitem__, dist, len(points))

    def d(self, i, j) -> Fraction:
        return Fraction(self.dist(self.point(i), self.point(j)))

    def ball(self, k):
        """The k-th formal ball label."""
        if self.size is not None:
            if self.size == 0:
                return None
            return ("B", k % self.size, positive_rational(k // self.size))
        i, j = unpair(k)
        return ("B", i, positive_rational(j))

    def inside(self, inner, outer, strict=False) -> bool:
        _, b, s = inner
        _, a, r = outer
        total = self.d(a, b) + s
        return total < r if strict else total <= r


def spot_check(M: MetricData, samples=12, seed=0):
    n = samples if M.size is None else min(M.size, samples)
    idx = list(range(n))
    rng = random.Random(seed)
    triples = [(a, b, c) for a in idx for b in idx for c in idx]
    if len(triples) > 400:
        triples = rng.sample(triples, 400)
    for a, b, c in triples:
        dab = M.d(a, b)
        if dab < 0 or dab != M.d(b, a) or M.d(a, a) != 0 or M.d(a, c) > dab + M.d(b, c):
            raise QpolisError("METRIC_VIOLATION", f"metric axiom fails on points {a}, {b}, {c}",
                              triple=[a, b, c])


def _scan(M, obs, test):
    hits = [l for l in obs if is_ball(l) and test(l)]
    if not hits:
        return None
    return frozenset({min(hits, key=lambda l: (l[2], l[1]))})


def _balls(M, name, test):
    def item(k):
        b = M.ball(k)
        return frozenset({b}) if b is not None and test(b) else None
    return EnumOpenCode(name, item, lambda obs: _scan(M, obs, test))


def metric_completion(M: MetricData) -> Copresentation:
    spot_check(M)

    def contains(l):
        return (is_ball(l) and isinstance(l[1], int) and l[1] >= 0
                and (M.size is None or l[1] < M.size)
                and isinstance(l[2], Fraction) and l[2] > 0)
    index = CountableIndex("formal_balls", M.ball, contains)

    def up(k):
        i, j = unpair(k)
        b, a = M.ball(i), M.ball(j)
        if b is None or a is None or a == b or not M.inside(b, a):
            return None
        return Pi02Relation(OpenCode.basic(b), OpenCode.basic(a))

    def directed(k):
        i, j = unpair(k)
        b1, b2 = M.ball(i), M.ball(j)
        if b1 is None or b2 is None or i >= j:
            return None
        return Pi02Relation(OpenCode.basic(b1, b2),
                            _balls(M, "below_both", lambda c: M.inside(c, b1) and M.inside(c, b2)))

    def small(k):
        bound = Fraction(1, 2 * (k + 1))
        return Pi02Relation(TOP, _balls(M, f"radius<{bound}", lambda c: c[2] < bound))

    def inner(k):
        a = M.ball(k)
        if a is None:
            return None
        return Pi02Relation(OpenCode.basic(a),
                            _balls(M, "strictly_inside", lambda c: M.inside(c, a, strict=True)))

    fams = tuple(RelationFamily(name, None, fn, {"name": name})
                 for name, fn in (("up", up), ("directed", directed), ("small", small),
                                  ("inner", inner)))
    return Copresentation(index, fams, ("metric_completion",))


def dyadic_grid(max_denominator=64) -> MetricData:
    """Points j / max_denominator of [0, 1] with the usual distance."""
    pts = [Fraction(j, max_denominator) for j in range(max_denominator + 1)]
    return MetricData.finite(pts, lambda a, b: abs(a - b))
