"""Syntactic open codes, relation families and copresentations.

An index label is any hashable value.  A basic open is a frozenset ``s`` of
labels and stands for all points containing ``s``; the empty frozenset is the
whole space.  Open codes are unions of basic opens, either a finite tuple
(``OpenCode``) or an enumeration (``EnumOpenCode``).  A relation ``(U, V)``
imposes "U implies V".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..errors import QpolisError
from ..finite.space import FiniteSpace
from ..rationals import pair, unpair


def _untag(observed, tag):
    return frozenset(l[1] for l in observed
                     if isinstance(l, tuple) and len(l) == 2 and l[0] == tag)


def _gen_key(g):
    return (len(g), sorted(map(repr, g)))


@dataclass(frozen=True)
class OpenCode:
    generators: tuple = ()

    def __post_init__(self):
        gens = tuple(sorted({frozenset(g) for g in self.generators}, key=_gen_key))
        object.__setattr__(self, "generators", gens)

    finite = True

    @classmethod
    def basic(cls, *labels):
        return cls((frozenset(labels),))

    def is_empty_code(self) -> bool:
        return not self.generators

    def find(self, observed, fuel=None):
        """Least generator contained in ``observed``, or None."""
        for g in self.generators:
            if g <= observed:
                return g
        return None

    def contains_basic(self, s) -> bool:
        return self.find(frozenset(s)) is not None

    def labels(self):
        out = set()
        for g in self.generators:
            out |= g
        return out

    def meet(self, other):
        if not other.finite:
            return other.meet(self)
        return OpenCode(tuple(a | b for a in self.generators for b in other.generators))

    def join(self, other):
        if not other.finite:
            return other.join(self)
        return OpenCode(self.generators + other.generators)

    def retag(self, tag):
        return OpenCode(tuple(frozenset((tag, l) for l in g) for g in self.generators))

    def relabel(self, mapping):
        return OpenCode(tuple(frozenset(mapping[l] for l in g) for g in self.generators))

    def to_json(self, position):
        return [sorted(position[l] for l in g) for g in self.generators]


TOP = OpenCode((frozenset(),))
EMPTY = OpenCode(())


@dataclass(frozen=True, eq=False)
class EnumOpenCode:
    """Countable union of basic opens, ``item(k)`` for k = 0, 1, ...

    ``item`` may return None for a hole.  ``matcher(observed)`` must return a
    generator contained in ``observed`` whenever one exists among the items
    (it is the decision procedure used on finite observations); without a
    matcher the first ``fuel`` items are scanned.
    """

    name: str
    item: Callable[[int], Optional[frozenset]]
    matcher: Optional[Callable[[frozenset], Optional[frozenset]]] = None
    params: tuple = ()

    finite = False

    def find(self, observed, fuel=64):
        if self.matcher is not None:
            return self.matcher(observed)
        for k in range(fuel):
            g = self.item(k)
            if g is not None and g <= observed:
                return g
        return None

    def is_empty_code(self) -> bool:
        return False

    def meet(self, other):
        a = self
        if other.finite:
            gens = other.generators
            m = len(gens)
            if m == 0:
                return EMPTY

            def item(k, a=a):
                g = a.item(k // m)
                return None if g is None else g | gens[k % m]

            def matcher(obs, a=a):
                t = other.find(obs)
                g = a.find(obs)
                return None if t is None or g is None else g | t
        else:
            b = other

            def item(k, a=a, b=b):
                i, j = unpair(k)
                g, h = a.item(i), b.item(j)
                return None if g is None or h is None else g | h

            def matcher(obs, a=a, b=b):
                g, h = a.find(obs), b.find(obs)
                return None if g is None or h is None else g | h
        return EnumOpenCode(f"meet({self.name})", item, matcher)

    def join(self, other):
        a = self
        if other.finite:
            gens = other.generators
            m = len(gens)

            def item(k, a=a):
                return gens[k] if k < m else a.item(k - m)
        else:
            b = other

            def item(k, a=a, b=b):
                return a.item(k // 2) if k % 2 == 0 else b.item(k // 2)

        def matcher(obs, a=a):
            g = other.find(obs)
            return g if g is not None else a.find(obs)
        return EnumOpenCode(f"join({self.name})", item, matcher)

    def retag(self, tag):
        a = self

        def item(k):
            g = a.item(k)
            return None if g is None else frozenset((tag, l) for l in g)

        def matcher(obs):
            g = a.find(_untag(obs, tag))
            return None if g is None else frozenset((tag, l) for l in g)
        return EnumOpenCode(self.name, item, matcher, self.params)


@dataclass(frozen=True)
class Pi02Relation:
    antecedent: object
    consequent: object

    def labels(self):
        out = set()
        for code in (self.antecedent, self.consequent):
            if code.finite:
                out |= code.labels()
        return out


@dataclass(frozen=True, eq=False)
class RelationFamily:
    """A named family of relations; ``size`` None means countably infinite.

    ``item(k)`` may return None (a hole in the enumeration).  ``spec`` is the
    serialisable generator description used in JSON output.
    """

    name: str
    size: Optional[int]
    item: Callable[[int], Optional[Pi02Relation]]
    spec: dict = field(default_factory=dict)

    @classmethod
    def of(cls, name, relations):
        rels = tuple(relations)
        return cls(name, len(rels), rels.__getitem__, {"relations": rels})

    @property
    def finite(self):
        return self.size is not None

    def relations(self, limit=None):
        n = self.size if limit is None else (limit if self.size is None else min(limit, self.size))
        if n is None:
            raise QpolisError("UNSUPPORTED", f"family {self.name} is infinite")
        for k in range(n):
            r = self.item(k)
            if r is not None:
                yield k, r

    def retag(self, tag):
        f = self

        def item(k):
            r = f.item(k)
            return None if r is None else Pi02Relation(r.antecedent.retag(tag),
                                                      r.consequent.retag(tag))
        if self.finite:
            return RelationFamily.of(self.name, [item(k) for k in range(self.size)])
        return RelationFamily(self.name, self.size, item, dict(self.spec, tag=tag))

    def map(self, fn, name=None):
        f = self

        def item(k):
            r = f.item(k)
            return None if r is None else fn(r)
        if self.finite:
            return RelationFamily.of(name or self.name, [item(k) for k in range(self.size)])
        return RelationFamily(name or self.name, self.size, item, dict(self.spec))


@dataclass(frozen=True, eq=False)
class CountableIndex:
    name: str
    item: Callable[[int], object]
    contains: Callable[[object], bool]
    params: tuple = ()

    def retag(self, tag):
        idx = self

        def contains(l):
            return isinstance(l, tuple) and len(l) == 2 and l[0] == tag and idx.contains(l[1])
        return CountableIndex(self.name, lambda k: (tag, idx.item(k)), contains, self.params)


NATURALS = CountableIndex("naturals", lambda k: k, lambda l: isinstance(l, int) and l >= 0)


@dataclass(frozen=True, eq=False)
class Copresentation:
    indices: object  # tuple of labels, or CountableIndex
    families: tuple = ()
    provenance: tuple = ()

    def __post_init__(self):
        if not isinstance(self.indices, CountableIndex):
            object.__setattr__(self, "indices", tuple(self.indices))
        object.__setattr__(self, "families", tuple(self.families))
        self.validate()

    @property
    def finite_indices(self) -> bool:
        return not isinstance(self.indices, CountableIndex)

    @property
    def is_finite(self) -> bool:
        return (self.finite_indices and all(f.finite for f in self.families)
                and all(r.antecedent.finite and r.consequent.finite for r in self.relations()))

    def has_index(self, label) -> bool:
        if self.finite_indices:
            return label in self._index_set
        return self.indices.contains(label)

    @property
    def _index_set(self):
        s = self.__dict__.get("_idx_cache")
        if s is None:
            s = frozenset(self.indices)
            object.__setattr__(self, "_idx_cache", s)
        return s

    def relations(self, limit=None):
        """All relations (finite case) or the first ``limit`` items per family."""
        for fam in self.families:
            for _, r in fam.relations(limit):
                yield r

    def validate(self, sample=64):
        """Every label mentioned by a (sampled) relation must be an index."""
        for fam in self.families:
            for k, r in fam.relations(None if fam.finite else sample):
                bad = [l for l in r.labels() if not self.has_index(l)]
                if bad:
                    raise QpolisError("MALFORMED_RELATION",
                                      f"family {fam.name} item {k} uses unknown labels {bad!r}")

    def with_families(self, extra, note):
        return Copresentation(self.indices, self.families + tuple(extra),
                              self.provenance + (note,))

    # brute-force semantics (finite copresentations only)

    def denote(self, max_indices=22) -> list[frozenset]:
        """Every point of S^I satisfying all relations, in canonical order."""
        if not self.is_finite:
            raise QpolisError("UNSUPPORTED", "denotation needs finite indices and relations")
        labels = list(self.indices)
        n = len(labels)
        if n > max_indices:
            raise QpolisError("TOO_LARGE", f"{n} indices exceed brute-force limit {max_indices}")
        pos = {l: k for k, l in enumerate(labels)}

        def masks(code):
            out = []
            for g in code.generators:
                m = 0
                for l in g:
                    m |= 1 << pos[l]
                out.append(m)
            return out
        rels = [(masks(r.antecedent), masks(r.consequent)) for r in self.relations()]
        points = []
        for x in range(1 << n):
            ok = True
            for us, vs in rels:
                if any(u & ~x == 0 for u in us) and not any(v & ~x == 0 for v in vs):
                    ok = False
                    break
            if ok:
                points.append(x)
        return [frozenset(labels[k] for k in range(n) if (x >> k) & 1) for x in points]

    def to_finite_space(self) -> FiniteSpace:
        """The denotation with the subspace topology of S^I."""
        pts = self.denote()
        gens = []
        for l in self.indices:
            g = 0
            for k, p in enumerate(pts):
                if l in p:
                    g |= 1 << k
            gens.append(g)
        return FiniteSpace(pts, gens)


def code_mask(space: FiniteSpace, code) -> int:
    """Points of a denotation space (points are frozensets) lying in ``code``."""
    m = 0
    for k, p in enumerate(space.points):
        if code.find(p) is not None:
            m |= 1 << k
    return m


def family_union(*families):
    return tuple(f for fam in families for f in fam)


def enum_pairs(size_a, size_b):
    """Enumerate pairs of indices of two (possibly infinite) families."""
    if size_a is not None and size_b is not None:
        return size_a * size_b, lambda k: (k // size_b, k % size_b) if size_b else None
    return None, unpair


__all__ = ["OpenCode", "EnumOpenCode", "Pi02Relation", "RelationFamily", "CountableIndex",
           "Copresentation", "TOP", "EMPTY", "NATURALS", "code_mask", "pair", "unpair"]
