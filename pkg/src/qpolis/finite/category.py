"""Baire category on finite spaces and the fibrewise category quantifiers.

On a finite space every countable family of dense opens is realised by a
finite one, so "comeager" means "contains a finite intersection of dense
opens" and all searches below are exhaustive.
"""

from __future__ import annotations

from ..errors import QpolisError
from .space import FiniteMap, FiniteSpace


def dense_opens(X: FiniteSpace, universe: int | None = None) -> list[int]:
    """Opens of the subspace on ``universe`` that meet every nonempty open."""
    universe = X.full if universe is None else universe
    traces = X.subspace_opens(universe)
    nonempty = [t for t in traces if t]
    return [t for t in traces if all(t & o for o in nonempty)]


def comeager_core(X: FiniteSpace, universe: int | None = None) -> int:
    """Intersection of all dense opens of the subspace."""
    universe = X.full if universe is None else universe
    core = universe
    for d in dense_opens(X, universe):
        core &= d
    return core


def is_comeager(X: FiniteSpace, A: int, universe: int | None = None) -> bool:
    universe = X.full if universe is None else universe
    core = comeager_core(X, universe)
    return core & ~A == 0


def is_meager(X: FiniteSpace, A: int, universe: int | None = None) -> bool:
    universe = X.full if universe is None else universe
    return is_comeager(X, universe & ~A, universe)


def is_baire_measurable(X: FiniteSpace, A: int, universe: int | None = None) -> bool:
    universe = X.full if universe is None else universe
    A &= universe
    return any(is_meager(X, A ^ u, universe) for u in X.subspace_opens(universe))


class _Fibers:
    """Per-map cache of fibres and their comeager cores."""

    def __init__(self, f: FiniteMap):
        self.f = f
        self.fibers = [f.fiber(y) for y in range(f.target.n)]
        self.cores = [comeager_core(f.source, fib) for fib in self.fibers]


def cat_exists(f: FiniteMap, A: int, _cache: _Fibers | None = None) -> int:
    """Points y whose fibre meets A in a non-meager set."""
    c = _cache or _Fibers(f)
    out = 0
    for y, core in enumerate(c.cores):
        # A & fiber is non-meager in the fiber iff it meets the core
        if A & core:
            out |= 1 << y
    return out


def cat_forall(f: FiniteMap, A: int, _cache: _Fibers | None = None) -> int:
    c = _cache or _Fibers(f)
    return f.target.full & ~cat_exists(f, f.source.full & ~A, c)


def is_fiberwise_weak_basis(f: FiniteMap, family, U: int, _cache=None) -> bool:
    c = _cache or _Fibers(f)
    X = f.source
    for fib in c.fibers:
        for v in X.subspace_opens(fib):
            if not v or v & ~U:
                continue
            if not any(w & ~U == 0 and w & fib and (w & fib) & ~v == 0 for w in family):
                return False
    return True


def _require_open(f: FiniteMap):
    if not f.is_continuous():
        raise QpolisError("NOT_CONTINUOUS", "map is not continuous")
    if not f.is_open_map():
        raise QpolisError("NOT_OPEN_MAP", "map is not open")


def _subsets(n):
    return range(1 << n)


def verify_bairequant_identities(f: FiniteMap) -> dict:
    """Exhaustively check the three category-quantifier identities for ``f``.

    (i)   E*(U) = f(U) for open U;
    (ii)  E*(A | B) = E*(A) | E*(B);
    (iii) E*(U - A) = union over W in a weak basis, W inside U, of
          f(W) - E*(W & A), for the full open lattice and for the
          minimal-neighbourhood basis as weak bases.
    The first failure in canonical order is reported.
    """
    _require_open(f)
    X = f.source
    c = _Fibers(f)
    counts = {"i": 0, "ii": 0, "iii": 0}
    for u in X.opens:
        counts["i"] += 1
        if cat_exists(f, u, c) != f.image(u):
            return _fail("i", counts, U=u)
    ex = [cat_exists(f, a, c) for a in _subsets(X.n)]
    for a in _subsets(X.n):
        for b in _subsets(X.n):
            counts["ii"] += 1
            if ex[a | b] != ex[a] | ex[b]:
                return _fail("ii", counts, A=a, B=b)
    families = {"opens": X.opens, "min_nbhds": tuple(sorted(set(X.min_nbhds())))}
    for name, family in families.items():
        for u in X.opens:
            if not is_fiberwise_weak_basis(f, family, u, c):
                return _fail("iii", counts, U=u, family=name, reason="not a weak basis")
            inside = [w for w in family if w & ~u == 0]
            for a in _subsets(X.n):
                counts["iii"] += 1
                rhs = 0
                for w in inside:
                    rhs |= f.image(w) & ~ex[w & a]
                if ex[u & ~a] != rhs:
                    return _fail("iii", counts, U=u, A=a, family=name)
    return {"ok": True, "checks": counts}


def verify_kuratowski_ulam(f: FiniteMap) -> dict:
    """Exhaustively check the three Kuratowski-Ulam clauses for every A."""
    _require_open(f)
    X, Y = f.source, f.target
    c = _Fibers(f)
    counts = {"i": 0, "ii": 0, "iii": 0}
    for a in _subsets(X.n):
        if not is_baire_measurable(X, a):
            continue
        counts["i"] += 1
        good = 0
        for y, fib in enumerate(c.fibers):
            if is_baire_measurable(X, a & fib, fib):
                good |= 1 << y
        if not is_comeager(Y, good):
            return _fail("i", counts, A=a)
        counts["ii"] += 1
        e, v = cat_exists(f, a, c), cat_forall(f, a, c)
        if not (is_baire_measurable(Y, e) and is_baire_measurable(Y, v)):
            return _fail("ii", counts, A=a)
        counts["iii"] += 1
        if is_meager(Y, e) != is_meager(X, a) or is_comeager(Y, v) != is_comeager(X, a):
            return _fail("iii", counts, A=a)
    return {"ok": True, "checks": counts}


def _fail(clause, counts, **witness):
    return {"ok": False, "checks": counts,
            "counterexample": {"clause": clause, **witness}}
