"""Order-theoretic views of a finite space: specialization, closure, sobriety,
the lower powerspace and the embedding x -> closure{x}."""

from __future__ import annotations

from ..errors import QpolisError
from .space import FiniteMap, FiniteSpace, bits


def specialization(X: FiniteSpace) -> frozenset[tuple]:
    """Pairs (x, y) of point identifiers with x <= y.

    x <= y iff every open containing x also contains y.
    """
    pairs = set()
    for i in range(X.n):
        nb = X.min_nbhd(i)
        for j in bits(nb):
            pairs.add((X.points[i], X.points[j]))
    return frozenset(pairs)


def closure(X: FiniteSpace, mask: int) -> int:
    """Smallest closed superset, i.e. the down-closure under specialization."""
    out = 0
    for c in X.closed_sets():
        if c & mask == mask:
            out = c if out == 0 else out & c
    return out if mask else 0


def saturation(X: FiniteSpace, mask: int) -> int:
    """Intersection of the opens containing ``mask`` (its up-closure)."""
    out = X.full
    for o in X.opens:
        if o & mask == mask:
            out &= o
    return out if mask else 0


def point_closure(X: FiniteSpace, k: int) -> int:
    return closure(X, 1 << k)


def is_irreducible(X: FiniteSpace, F: int) -> bool:
    if F == 0:
        return False
    closed = [c for c in X.closed_sets() if c & ~F == 0]
    for g in closed:
        for h in closed:
            if g | h == F and g != F and h != F:
                return False
    return True


def irreducible_closed_sets(X: FiniteSpace) -> list[int]:
    return [F for F in X.closed_sets() if is_irreducible(X, F)]


def sober_witness(X: FiniteSpace) -> dict[int, int]:
    """Map each irreducible closed set to its generic point index."""
    closures = {}
    for k in range(X.n):
        closures.setdefault(point_closure(X, k), k)
    out = {}
    for F in irreducible_closed_sets(X):
        if F not in closures:
            raise QpolisError("WITNESS_MISSING", f"irreducible {F:b} has no generic point")
        out[F] = closures[F]
    return out


def lower_powerspace(X: FiniteSpace) -> FiniteSpace:
    """Closed sets of X, topologised by the sets {F : F meets U}, U open.

    Points are the closed sets as frozensets of X's identifiers, listed in
    canonical (numeric bit-set) order.
    """
    closed = X.closed_sets()
    pts = [frozenset(X.names(c)) for c in closed]
    gens = []
    for u in X.opens:
        g = 0
        for idx, c in enumerate(closed):
            if c & u:
                g |= 1 << idx
        gens.append(g)
    return FiniteSpace(pts, gens)


def diamond(X: FiniteSpace, FX: FiniteSpace, u: int) -> int:
    """The subbasic open of FX of closed sets meeting ``u``."""
    m = 0
    for idx, F in enumerate(FX.points):
        if X.mask(F) & u:
            m |= 1 << idx
    return m


def down_map(X: FiniteSpace) -> FiniteMap:
    """x -> closure{x} into the lower powerspace; checked to pull back
    each diamond(U) to U."""
    FX = lower_powerspace(X)
    graph = tuple(FX.index(frozenset(X.names(point_closure(X, k)))) for k in range(X.n))
    f = FiniteMap(X, FX, graph)
    for u in X.opens:
        if f.preimage(diamond(X, FX, u)) != u:
            raise AssertionError(f"preimage of diamond({u:b}) is not {u:b}")
    return f


def is_essential(f: FiniteMap) -> bool:
    """True iff the saturation of f(U) is open for every open U."""
    return all(f.target.is_open(saturation(f.target, f.image(u))) for u in f.source.opens)
