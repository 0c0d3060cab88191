"""Finite topological spaces with the open-set lattice stored as bit-sets.

Point ``k`` of a space is bit ``1 << k``; a point-set is an ``int``.  The open
lattice is closed under union and intersection at construction and kept as a
sorted tuple, so the numeric bit-set order is the canonical order of opens.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as _cartesian

from ..errors import QpolisError


def bits(mask: int):
    """Indices of the set bits of ``mask``, ascending."""
    k = 0
    while mask:
        if mask & 1:
            yield k
        mask >>= 1
        k += 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def lattice_closure(generators, full: int) -> tuple[int, ...]:
    """Close a family of sets under finite unions and finite intersections.

    The empty set and ``full`` are always included.
    """
    meets = {full}
    for g in generators:
        meets |= {g & m for m in meets}
        meets.add(g)
    opens = {0}
    for m in sorted(meets):
        opens |= {m | o for o in opens}
    return tuple(sorted(opens))


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple
    opens: tuple[int, ...]
    _index: dict = field(default=None, repr=False, compare=False, hash=False)

    def __init__(self, points, opens, *, allow_non_t0=False):
        points = tuple(points)
        if len(set(points)) != len(points):
            raise QpolisError("SCHEMA_ERROR", "duplicate point identifiers")
        full = (1 << len(points)) - 1
        for o in opens:
            if o & ~full:
                raise QpolisError("SCHEMA_ERROR", f"open {o:b} mentions unknown points")
        closed = lattice_closure(opens, full)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "opens", closed)
        object.__setattr__(self, "_index", {p: k for k, p in enumerate(points)})
        if not allow_non_t0 and not self.is_t0():
            raise QpolisError("NOT_T0", "two points share exactly the same opens")

    # construction helpers

    @classmethod
    def from_sets(cls, points, opens, **kw):
        """Build from opens given as iterables of point identifiers."""
        points = tuple(points)
        index = {p: k for k, p in enumerate(points)}
        masks = []
        for o in opens:
            m = 0
            for p in o:
                if p not in index:
                    raise QpolisError("SCHEMA_ERROR", f"unknown point {p!r}")
                m |= 1 << index[p]
            masks.append(m)
        return cls(points, masks, **kw)

    @classmethod
    def from_order(cls, points, leq):
        """Alexandrov space of a partial order: opens are the up-sets.

        ``leq`` is a set of index pairs ``(i, j)`` meaning point i <= point j.
        """
        n = len(points)
        up = [1 << i for i in range(n)]
        for i, j in leq:
            up[i] |= 1 << j
        # minimal neighbourhoods generate the topology under unions alone
        return cls(points, up)

    @classmethod
    def t0_quotient(cls, points, opens):
        """Identify topologically indistinguishable points.

        Each quotient point is the tuple of the original identifiers it merges.
        """
        raw = cls(points, opens, allow_non_t0=True)
        classes: dict[tuple, list[int]] = {}
        for k in range(len(raw.points)):
            sig = tuple((o >> k) & 1 for o in raw.opens)
            classes.setdefault(sig, []).append(k)
        groups = sorted(classes.values())
        new_opens = []
        for o in raw.opens:
            m = 0
            for g_idx, g in enumerate(groups):
                if (o >> g[0]) & 1:
                    m |= 1 << g_idx
            new_opens.append(m)
        names = [tuple(raw.points[k] for k in g) for g in groups]
        return cls(names, new_opens)

    # basic queries

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    def index(self, point) -> int:
        return self._index[point]

    def mask(self, pts) -> int:
        m = 0
        for p in pts:
            m |= 1 << self._index[p]
        return m

    def names(self, mask: int) -> list:
        return [self.points[k] for k in bits(mask)]

    def is_open(self, mask: int) -> bool:
        return mask in self._open_set

    @property
    def _open_set(self):
        cache = self.__dict__.get("_open_set_cache")
        if cache is None:
            cache = frozenset(self.opens)
            object.__setattr__(self, "_open_set_cache", cache)
        return cache

    def is_closed(self, mask: int) -> bool:
        return self.is_open(self.full & ~mask)

    def closed_sets(self) -> tuple[int, ...]:
        return tuple(sorted(self.full & ~o for o in self.opens))

    def is_t0(self) -> bool:
        seen = set()
        for k in range(self.n):
            sig = tuple((o >> k) & 1 for o in self.opens)
            if sig in seen:
                return False
            seen.add(sig)
        return True

    def min_nbhd(self, k: int) -> int:
        """Smallest open containing point ``k``."""
        m = self.full
        for o in self.opens:
            if (o >> k) & 1:
                m &= o
        return m

    def min_nbhds(self) -> tuple[int, ...]:
        return tuple(self.min_nbhd(k) for k in range(self.n))

    def interior(self, mask: int) -> int:
        best = 0
        for o in self.opens:
            if o & ~mask == 0:
                best |= o
        return best

    def subspace_opens(self, universe: int) -> tuple[int, ...]:
        """Traces of the opens on ``universe`` (still in ambient bit positions)."""
        return tuple(sorted({o & universe for o in self.opens}))

    def subspace(self, universe: int) -> "FiniteSpace":
        """The subspace on ``universe`` with points re-indexed in ascending order."""
        keep = list(bits(universe))
        new_opens = []
        for o in self.subspace_opens(universe):
            m = 0
            for new_k, old_k in enumerate(keep):
                if (o >> old_k) & 1:
                    m |= 1 << new_k
            new_opens.append(m)
        return FiniteSpace([self.points[k] for k in keep], new_opens,
                           allow_non_t0=True)

    def product(self, other: "FiniteSpace") -> "FiniteSpace":
        """Binary product; point ``(a, b)`` has index ``i * other.n + j``."""
        pts = [(a, b) for a in self.points for b in other.points]
        boxes = []
        for u in self.opens:
            for v in other.opens:
                m = 0
                for i in bits(u):
                    for j in bits(v):
                        m |= 1 << (i * other.n + j)
                boxes.append(m)
        return FiniteSpace(pts, boxes)

    def to_json(self):
        return {"points": [_jsonable_point(p) for p in self.points],
                "opens": [[_jsonable_point(p) for p in self.names(o)] for o in self.opens]}

    @classmethod
    def from_json(cls, data):
        try:
            points = [_hashable(p) for p in data["points"]]
            opens = [[_hashable(p) for p in o] for o in data["opens"]]
        except (KeyError, TypeError) as exc:
            raise QpolisError("SCHEMA_ERROR", f"bad finite-space JSON: {exc}") from exc
        return cls.from_sets(points, opens)


def _jsonable_point(p):
    if isinstance(p, tuple):
        return [_jsonable_point(q) for q in p]
    if isinstance(p, frozenset):
        return sorted((_jsonable_point(q) for q in p), key=repr)
    return p


def _hashable(p):
    if isinstance(p, list):
        return tuple(_hashable(q) for q in p)
    return p


def sierpinski() -> FiniteSpace:
    """Points 0 and 1 with {1} open."""
    return FiniteSpace([0, 1], [0b10])


def discrete(n: int) -> FiniteSpace:
    return FiniteSpace(list(range(n)), [1 << k for k in range(n)])


def chain(n: int) -> FiniteSpace:
    """Points 0 < 1 < ... < n-1; the opens are the final segments."""
    return FiniteSpace.from_order(list(range(n)),
                                  {(i, j) for i in range(n) for j in range(i, n)})


def sierpinski_power(n: int) -> FiniteSpace:
    """S^n with points the subsets of range(n), as frozensets."""
    pts = [frozenset(k for k in range(n) if (m >> k) & 1) for m in range(1 << n)]
    gens = []
    for i in range(n):
        g = 0
        for m in range(1 << n):
            if (m >> i) & 1:
                g |= 1 << m
        gens.append(g)
    return FiniteSpace(pts, gens)


@dataclass(frozen=True)
class FiniteMap:
    source: FiniteSpace
    target: FiniteSpace
    graph: tuple[int, ...]  # graph[k] = target index of source point k

    @classmethod
    def from_dict(cls, source, target, mapping):
        try:
            graph = tuple(target.index(mapping[p]) for p in source.points)
        except KeyError as exc:
            raise QpolisError("SCHEMA_ERROR", f"map undefined or unknown at {exc}") from exc
        return cls(source, target, graph)

    @classmethod
    def identity(cls, space):
        return cls(space, space, tuple(range(space.n)))

    def image(self, mask: int) -> int:
        m = 0
        for k in bits(mask):
            m |= 1 << self.graph[k]
        return m

    def preimage(self, mask: int) -> int:
        m = 0
        for k, y in enumerate(self.graph):
            if (mask >> y) & 1:
                m |= 1 << k
        return m

    def fiber(self, y: int) -> int:
        return self.preimage(1 << y)

    def is_continuous(self) -> bool:
        return all(self.source.is_open(self.preimage(v)) for v in self.target.opens)

    def is_open_map(self) -> bool:
        return all(self.target.is_open(self.image(u)) for u in self.source.opens)

    def is_surjective(self) -> bool:
        return self.image(self.source.full) == self.target.full

    def is_embedding(self) -> bool:
        """Injective, continuous, and every source open is a preimage of a target open."""
        if len(set(self.graph)) != len(self.graph) or not self.is_continuous():
            return False
        traces = {self.preimage(v) for v in self.target.opens}
        return all(u in traces for u in self.source.opens)

    def to_json(self):
        return {"graph": {str(_jsonable_point(p)): _jsonable_point(self.target.points[y])
                          for p, y in zip(self.source.points, self.graph)}}


def all_maps(source: FiniteSpace, target: FiniteSpace):
    """Every function between the point sets, in lexicographic graph order."""
    for graph in _cartesian(range(target.n), repeat=source.n):
        yield FiniteMap(source, target, graph)
