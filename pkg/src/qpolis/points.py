"""Points as monotone observation streams, and relation checking on them.

A stream emits a finite set of labels at each step; ``observed(d)`` is the
union of steps 0..d, so observations only grow.  Only positive information is
ever observed, which is why a relation check has three outcomes: an antecedent
seen without its consequent is *pending*, and only an antecedent seen against
an empty consequent is a *violation*.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable

from .copres.codes import Copresentation
from .copres.dedekind import L, R
from .copres.metric import MetricData
from .errors import QpolisError
from .rationals import first_rationals, rational, rational_index, simplest_between, unpair

SATISFIED = "satisfied-so-far"
PENDING = "pending"
VIOLATED = "violated"


class PointStream:
    """Cursor over ``step(d)``; each label's first depth is cached, so memory
    stays linear in the number of labels seen."""

    def __init__(self, step: Callable[[int], frozenset], name="stream", params=None):
        self.step = step
        self.name = name
        self.params = params or {}
        self._first = {}   # label -> depth of first emission
        self._depth = -1   # steps run so far
        self._sets = {}    # a few recent observed(d), for binary searches

    def _advance(self, d):
        while self._depth < d:
            self._depth += 1
            for label in self.step(self._depth):
                self._first.setdefault(label, self._depth)

    def observed(self, d: int) -> frozenset:
        if d < 0:
            return frozenset()
        self._advance(d)
        if d not in self._sets:
            if len(self._sets) >= 64:
                self._sets.clear()
            self._sets[d] = frozenset(l for l, k in self._first.items() if k <= d)
        return self._sets[d]

    def depth_of(self, label, fuel: int):
        """Depth at which ``label`` is first observed, or None within fuel."""
        self._advance(fuel)
        k = self._first.get(label)
        return k if k is not None and k <= fuel else None

    def clone(self):
        return PointStream(self.step, self.name, self.params)

    def first_depth(self, test, fuel):
        """Least d <= fuel with test(observed(d)), or None."""
        if not test(self.observed(fuel)):
            return None
        lo, hi = 0, fuel
        while lo < hi:
            mid = (lo + hi) // 2
            if test(self.observed(mid)):
                hi = mid
            else:
                lo = mid + 1
        return lo


def constant_stream(labels, name="constant") -> PointStream:
    labels = frozenset(labels)
    return PointStream(lambda d: labels if d == 0 else frozenset(), name)


def listed_stream(steps, name="listed") -> PointStream:
    """Emit ``steps[d]`` at step d, nothing afterwards."""
    steps = [frozenset(s) for s in steps]
    return PointStream(lambda d: steps[d] if d < len(steps) else frozenset(), name)


def in_basic(p: PointStream, s, fuel: int):
    """Depth at which the basic open ``s`` is confirmed, or None (unknown)."""
    s = frozenset(s)
    return p.first_depth(lambda obs: s <= obs, fuel)


@dataclass
class CheckReport:
    fuel: int
    entries: list = field(default_factory=list)  # dicts: family, item, status, depth

    def count(self, status):
        return sum(1 for e in self.entries if e["status"] == status)

    @property
    def violated(self):
        return any(e["status"] == VIOLATED for e in self.entries)

    def to_json(self):
        return {"fuel": self.fuel,
                "counts": {s: self.count(s) for s in (SATISFIED, PENDING, VIOLATED)},
                "entries": self.entries}


def check_relations(p: PointStream, C: Copresentation, fuel: int) -> CheckReport:
    """Check finite families completely and the first ``fuel`` items of each
    countable family against ``observed(fuel)``."""
    obs = p.observed(fuel)
    report = CheckReport(fuel)
    for fam in C.families:
        for k, r in fam.relations(None if fam.finite else fuel):
            if r.antecedent.find(obs) is None:
                report.entries.append({"family": fam.name, "item": k, "status": SATISFIED,
                                       "depth": None})
                continue
            seen = p.first_depth(lambda o: r.antecedent.find(o) is not None, fuel)
            if r.consequent.find(obs) is not None:
                depth = p.first_depth(lambda o: r.consequent.find(o) is not None, fuel)
                status = SATISFIED
            else:
                depth = seen
                status = VIOLATED if r.consequent.finite and r.consequent.is_empty_code() else PENDING
            report.entries.append({"family": fam.name, "item": k, "status": status,
                                   "depth": depth})
    return report


# --- Dedekind streams -----------------------------------------------------


def rational_cut_stream(r) -> PointStream:
    """The cut of a rational r.  Step d classifies the d-th rational and adds a
    witness strictly between it and r, so roundedness is observed too; step 0
    also shows one label on each side."""
    r = Fraction(r)

    def step(d):
        out = set()
        if d == 0:
            out |= {L(simplest_between(r - 1, r)), R(simplest_between(r, r + 1))}
        q = rational(d)
        if q < r:
            out |= {L(q), L(simplest_between(q, r))}
        elif q > r:
            out |= {R(q), R(simplest_between(r, q))}
        return frozenset(out)
    return PointStream(step, "rational_cut", {"r": str(r)})


def real_to_stream(approx: Callable[[int], Fraction], name="real") -> PointStream:
    """Cut of x from approximations with |approx(n) - x| <= 1/n, read at n = 2^d.

    Step d emits L_q for each of the first d+1 rationals certified below x,
    R_q for those certified above, and one witness per emitted label between it
    and the current bound.
    """
    def step(d):
        n = 2 ** d
        a = Fraction(approx(n))
        lo, hi = a - Fraction(1, n), a + Fraction(1, n)
        out = {L(simplest_between(lo - 1, lo)), R(simplest_between(hi, hi + 1))}
        for q in first_rationals(d + 1):
            if q < lo:
                out |= {L(q), L(simplest_between(q, lo))}
            elif q > hi:
                out |= {R(q), R(simplest_between(hi, q))}
        return frozenset(out)
    return PointStream(step, name)


def separation(r, s):
    """A label observed by exactly one of the two rational cut streams, and the
    fuel after which both streams have decided it."""
    r, s = Fraction(r), Fraction(s)
    if r == s:
        raise ValueError("equal rationals are not separated")
    m = simplest_between(r, s)
    return (R(m) if r < s else L(m)), rational_index(m)


def sqrt_approx(m: int) -> Callable[[int], Fraction]:
    """Approximations of sqrt(m), m >= 1, by Newton's method from above."""
    def approx(n):
        x = Fraction(m + 1)
        while (x * x - m) / 2 > Fraction(1, n):
            x = (x + m / x) / 2
        return x
    return approx


def golden_approx(n):
    return (1 + sqrt_approx(5)(2 * n)) / 2


def e_approx(n):
    total, k = Fraction(1), 0
    while True:
        k += 1
        total += Fraction(1, factorial(k))
        if factorial(k) * k >= n:
            return total


def _atan_inv(x, tol):
    """atan(1/x) to within tol by the alternating series."""
    total, k = Fraction(0), 0
    while True:
        term = Fraction(1, (2 * k + 1) * x ** (2 * k + 1))
        total += term if k % 2 == 0 else -term
        if Fraction(1, (2 * k + 3) * x ** (2 * k + 3)) < tol:
            return total
        k += 1


def pi_approx(n):
    tol = Fraction(1, 40 * n)
    return 16 * _atan_inv(5, tol) - 4 * _atan_inv(239, tol)


CANNED_REALS = {
    "sqrt2": sqrt_approx(2),
    "golden": golden_approx,
    "e": e_approx,
    "pi": pi_approx,
    "one_third": lambda n: Fraction(1, 3),
}


# --- Baire space to the Sierpinski power -----------------------------------


def baire_to_spower(q: Callable[[int], int]) -> PointStream:
    """Position k of q belongs to substream i where (i, j) = unpair(k); index i
    is observed once a nonzero entry of substream i has been read."""
    def step(d):
        i, _ = unpair(d)
        return frozenset({i}) if q(d) != 0 else frozenset()
    return PointStream(step, "baire_to_spower")


def cylinder_image(prefix, m):
    """Image under the Baire map of the cylinder of ``prefix``, cut to indices < m:
    every superset of the indices forced by the prefix."""
    forced = {unpair(k)[0] for k, v in enumerate(prefix) if v != 0 and unpair(k)[0] < m}
    free = [i for i in range(m) if i not in forced]
    out = set()
    for mask in range(1 << len(free)):
        out.add(frozenset(forced) | {free[b] for b in range(len(free)) if (mask >> b) & 1})
    return out


# --- metric completion streams --------------------------------------------


def metric_point_stream(M: MetricData, dist_to_x: Callable[[int], Fraction],
                        name="metric_point") -> PointStream:
    """Formal balls B(a, r) with d(a, x) < r, from the exact distances
    ``dist_to_x(i)`` of x to the points of D.

    Step d looks at the d-th ball and adds witnesses centred at the nearest of
    the first points of D: a ball strictly inside the emitted one, when one
    exists, and a ball of radius 2^-j for the first j that fits.
    """
    def nearest(d):
        n = d + 1 if M.size is None else M.size
        return min(range(n), key=lambda i: (dist_to_x(i), i))

    def step(d):
        out = set()
        c = nearest(d)
        dc = Fraction(dist_to_x(c))
        j = 0
        while Fraction(1, 2 ** j) <= dc:
            j += 1
        out.add(("B", c, Fraction(1, 2 ** (j + d))))
        ball = M.ball(d)
        if ball is not None and Fraction(dist_to_x(ball[1])) < ball[2]:
            out.add(ball)
            slack = ball[2] - M.d(ball[1], c)
            if dc < slack:
                out.add(("B", c, (dc + slack) / 2))
        return frozenset(out)
    return PointStream(step, name)


def grid_point_stream(M: MetricData, i: int) -> PointStream:
    """Canonical stream of the i-th point of D."""
    return metric_point_stream(M, lambda a: M.d(a, i), f"grid_point({i})")


@dataclass(frozen=True)
class Limit:
    point: object
    depth: int
    ball: tuple


def cauchy_limit(p: PointStream, M: MetricData, n: int, fuel: int = 64) -> Limit:
    """Centre of an observed ball of radius <= 1/(2n): within 1/n of the limit."""
    bound = Fraction(1, 2 * n)
    for d in range(fuel + 1):
        small = sorted((l for l in p.observed(d) if l[2] <= bound), key=lambda l: (l[2], l[1]))
        if small:
            return Limit(M.point(small[0][1]), d, small[0])
    raise QpolisError("INSUFFICIENT_OBSERVATIONS",
                      f"no ball of radius <= {bound} within fuel {fuel}", fuel=fuel)
