"""Finite posites: a poset of basic opens with covering relations.

Elements are referred to by index into ``carrier``; sets of elements are
bit-sets.  A posite carries a constructive stability witness: given a cover
(V, U) and U' <= U it returns a cover of U' refining V, with the refinement
map.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .copres.codes import TOP, Copresentation, OpenCode, Pi02Relation, RelationFamily
from .errors import QpolisError
from .finite.enumerate import random_strict_order
from .finite.space import FiniteSpace, bits
from .finite.transfer import finite_pi02_definition
from .points import PointStream


@dataclass(frozen=True, eq=False)
class Posite:
    carrier: tuple
    leq: frozenset                   # pairs (i, j) with i <= j, reflexive and transitive
    covers: tuple                    # pairs (bit-set of covering elements, covered element)
    witness: Optional[Callable] = None

    def __post_init__(self):
        object.__setattr__(self, "carrier", tuple(self.carrier))
        object.__setattr__(self, "leq", frozenset(self.leq) | {(i, i) for i in range(self.n)})
        object.__setattr__(self, "covers", tuple((int(v), int(u)) for v, u in self.covers))
        down = [0] * self.n
        up = [0] * self.n
        for i, j in self.leq:
            down[j] |= 1 << i
            up[i] |= 1 << j
        object.__setattr__(self, "_down", tuple(down))
        object.__setattr__(self, "_up", tuple(up))

    @property
    def n(self):
        return len(self.carrier)

    @property
    def full(self):
        return (1 << self.n) - 1

    def le(self, i, j) -> bool:
        return (self._down[j] >> i) & 1 == 1

    def down(self, i) -> int:
        return self._down[i]

    def up(self, i) -> int:
        return self._up[i]

    def upset(self, mask) -> int:
        out = 0
        for i in bits(mask):
            out |= self._up[i]
        return out

    def stability(self, c, u2):
        """Cover of ``u2`` refining cover ``c``, with its refinement map, or None."""
        if self.witness is not None:
            return self.witness(self, c, u2)
        return search_witness(self, c, u2)

    def with_covers(self, covers):
        return Posite(self.carrier, self.leq, covers, self.witness)

    def to_json(self):
        return {"carrier": list(self.carrier),
                "leq": sorted([self.carrier[i], self.carrier[j]] for i, j in self.leq if i != j),
                "covers": [{"U": self.carrier[u], "V": [self.carrier[v] for v in bits(vs)]}
                           for vs, u in self.covers]}


def search_witness(P: Posite, c, u2):
    """Least-index cover of u2 whose members each lie below some member of c."""
    vs, _ = P.covers[c]
    for k, (ws, target) in enumerate(P.covers):
        if target != u2:
            continue
        ref = {}
        for w in bits(ws):
            below = [v for v in bits(vs) if P.le(w, v)]
            if not below:
                break
            ref[w] = below[0]
        else:
            return k, ref
    return None


def from_order(carrier, leq_pairs, covers) -> Posite:
    """Posite from element names: ``leq_pairs`` (a, b) meaning a <= b and
    ``covers`` as (iterable of names, name); the order is closed transitively."""
    carrier = tuple(carrier)
    idx = {x: k for k, x in enumerate(carrier)}
    rel = {(idx[a], idx[b]) for a, b in leq_pairs} | {(k, k) for k in range(len(carrier))}
    changed = True
    while changed:
        extra = {(i, k) for i, j in rel for jj, k in rel if j == jj} - rel
        rel |= extra
        changed = bool(extra)
    cov = [(sum(1 << idx[v] for v in vs), idx[u]) for vs, u in covers]
    return Posite(carrier, frozenset(rel), tuple(cov))


def posite_from_json(data) -> Posite:
    """Read ``{"carrier": [...], "leq": [[a, b], ...], "covers": [{"U": u, "V": [...]}]}``."""
    try:
        carrier = [tuple(c) if isinstance(c, list) else c for c in data["carrier"]]
        leq = [tuple(p) for p in data.get("leq", [])]
        covers = [(c["V"], c["U"]) for c in data.get("covers", [])]
        return from_order(carrier, leq, covers)
    except (KeyError, TypeError, ValueError) as exc:
        raise QpolisError("SCHEMA_ERROR", f"bad posite JSON: {exc!r}") from exc


# --- axioms ---------------------------------------------------------------


def check_axioms(P: Posite) -> dict:
    checks = 0
    for i, j in P.leq:
        checks += 1
        if i != j and (j, i) in P.leq:
            return _fail(checks, "order", pair=[P.carrier[i], P.carrier[j]])
        for jj, k in P.leq:
            if jj == j and (i, k) not in P.leq:
                return _fail(checks, "order", pair=[P.carrier[i], P.carrier[k]])
    for c, (vs, u) in enumerate(P.covers):
        for v in bits(vs):
            checks += 1
            if not P.le(v, u):
                return _fail(checks, "pcpl", cover=c, element=P.carrier[v])
    for c, (vs, u) in enumerate(P.covers):
        for u2 in bits(P.down(u)):
            checks += 1
            w = P.stability(c, u2)
            if w is None:
                return _fail(checks, "stability", cover=c, element=P.carrier[u2])
            k, ref = w
            ws, target = P.covers[k]
            if target != u2 or set(ref) != set(bits(ws)) or not all(
                    (vs >> ref[x]) & 1 and P.le(x, ref[x]) for x in bits(ws)):
                return _fail(checks, "stability", cover=c, element=P.carrier[u2])
    return {"ok": True, "checks": checks, "counterexample": None}


def _fail(checks, clause, **details):
    return {"ok": False, "checks": checks, "counterexample": dict(clause=clause, **details)}


# --- set-theoretic predicates (brute force) ---------------------------------


def is_upset(P, mask):
    return P.upset(mask) == mask


def is_filter(P, mask):
    if mask == 0 or not is_upset(P, mask):
        return False
    return all(P.down(a) & P.down(b) & mask for a in bits(mask) for b in bits(mask))


def is_coideal(P, mask):
    return is_upset(P, mask) and all(vs & mask for vs, u in P.covers if (mask >> u) & 1)


def is_prime_filter(P, mask):
    return is_filter(P, mask) and is_coideal(P, mask)


def is_ideal(P, mask):
    return is_coideal(P, P.full & ~mask)


def brute_force(P, pred):
    return [m for m in range(1 << P.n) if pred(P, m)]


# --- the four spaces ------------------------------------------------------


def _up_family(P):
    return RelationFamily.of("upward", [Pi02Relation(OpenCode.basic(i), OpenCode.basic(j))
                                        for i, j in sorted(P.leq) if i != j])


def _filter_families(P):
    nonempty = Pi02Relation(TOP, OpenCode(tuple(frozenset({i}) for i in range(P.n))))
    directed = []
    for a in range(P.n):
        for b in range(a + 1, P.n):
            lower = P.down(a) & P.down(b)
            directed.append(Pi02Relation(OpenCode.basic(a, b),
                                         OpenCode(tuple(frozenset({w}) for w in bits(lower)))))
    return (RelationFamily.of("nonempty", [nonempty]), RelationFamily.of("directed", directed))


def _cover_family(P):
    return RelationFamily.of("cover", [
        Pi02Relation(OpenCode.basic(u), OpenCode(tuple(frozenset({v}) for v in bits(vs))))
        for vs, u in P.covers])


def upset_space(P) -> Copresentation:
    return Copresentation(range(P.n), (_up_family(P),), ("upset_space",))


def filt_space(P) -> Copresentation:
    return Copresentation(range(P.n), (_up_family(P),) + _filter_families(P), ("filt_space",))


def coidl_space(P) -> Copresentation:
    return Copresentation(range(P.n), (_up_family(P), _cover_family(P)), ("coidl_space",))


def pfilt_space(P) -> Copresentation:
    return Copresentation(range(P.n), (_up_family(P),) + _filter_families(P) + (_cover_family(P),),
                          ("pfilt_space",))


def to_mask(point) -> int:
    return sum(1 << i for i in point)


# --- posites from spaces --------------------------------------------------


@dataclass(frozen=True, eq=False)
class BasicPosite:
    posite: Posite
    space: FiniteSpace
    basis: tuple              # open bit-sets of the space, one per carrier element
    image_data: tuple         # (S, T): S a set of basis positions, T a tuple of such sets
    cover_source: tuple       # per cover, the (relation index, element) pairs emitting it


def _proof_witness(table):
    def witness(P, c, u2):
        i = table["source"][c][0][0]
        k = table["index"].get((i, u2))
        if k is None:
            return None
        return k, {v: v for v in bits(P.covers[k][0])}
    return witness


def posite_from_copres(X, basis=None, image_data=None) -> BasicPosite:
    """The basic posite built from a level-2 definition of the image of X under
    its canonical embedding into S^basis.

    ``basis`` defaults to the distinct minimal neighbourhoods; ``image_data``
    defaults to the exact finite definition of the image.  Each item of
    ``image_data`` is ``(S, T)`` with S a set of basis positions and T a list of
    such sets, meaning "S contained in the point implies some member of T is".
    """
    if isinstance(X, Copresentation):
        X = X.to_finite_space()
    basis = tuple(sorted(set(X.min_nbhds()))) if basis is None else tuple(basis)
    if not all(X.is_open(b) for b in basis) or not all(
            X.min_nbhd(k) in basis for k in range(X.n)):
        raise QpolisError("NOT_A_BASIS", "family is not a basis of the space")
    m = len(basis)
    image = [frozenset(i for i in range(m) if (basis[i] >> k) & 1) for k in range(X.n)]
    if image_data is None:
        image_data = finite_pi02_definition(list(range(m)), image)
    data = []
    for S, T in image_data:
        for s in (S if _is_union(S) else [S]):
            data.append((frozenset(s), tuple(frozenset(t) for t in T)))
    if m <= 16:
        _check_image(m, data, image)

    def inter(s):
        out = X.full
        for i in s:
            out &= basis[i]
        return out
    order = frozenset((i, j) for i in range(m) for j in range(m) if basis[i] & ~basis[j] == 0)
    covers, source, index = [], [], {}
    seen = {}
    for i, (S, T) in enumerate(data):
        cap = inter(S)
        for u in range(m):
            if basis[u] & ~cap:
                continue
            vs = 0
            for v in range(m):
                if any(basis[v] & ~(basis[u] & inter(t)) == 0 for t in T):
                    vs |= 1 << v
            key = (vs, u)
            if key not in seen:
                seen[key] = len(covers)
                covers.append(key)
                source.append([])
            source[seen[key]].append((i, u))
            index[(i, u)] = seen[key]
    table = {"source": source, "index": index}
    P = Posite(tuple(basis), order, tuple(covers), _proof_witness(table))
    return BasicPosite(P, X, basis, tuple(data), tuple(tuple(s) for s in source))


def _is_union(S):
    return isinstance(S, (tuple, list)) and all(isinstance(s, (frozenset, set)) for s in S)


def _check_image(m, data, image):
    want = set(image)
    for mask in range(1 << m):
        x = frozenset(i for i in range(m) if (mask >> i) & 1)
        ok = all(not S <= x or any(t <= x for t in T) for S, T in data)
        if ok != (x in want):
            raise QpolisError("SCHEMA_ERROR", "image data does not define the embedded image")


def union_equation_holds(B: BasicPosite) -> bool:
    """Each emitted cover's union of basis sets equals the covered set."""
    for vs, u in B.posite.covers:
        total = 0
        for v in bits(vs):
            total |= B.basis[v]
        if total != B.basis[u]:
            return False
    return True


def pfilt_matches_space(B: BasicPosite) -> bool:
    """The prime filters are exactly the neighbourhood filters of points."""
    pts = {sum(1 << i for i, b in enumerate(B.basis) if (b >> k) & 1) for k in range(B.space.n)}
    return set(brute_force(B.posite, is_prime_filter)) == pts


# --- generic prime filters -------------------------------------------------


@dataclass
class GenericFilter:
    pivots: list
    visits: list = field(default_factory=list)   # cover indices in visiting order

    @property
    def pivot(self):
        return self.pivots[-1]

    def filter_mask(self, P) -> int:
        return P.up(self.pivot)

    def stream(self, P) -> PointStream:
        pivots = self.pivots

        def step(d):
            c = pivots[min(d, len(pivots) - 1)]
            return frozenset(bits(P.up(c)))
        return PointStream(step, "generic_prime_filter")


def generic_prime_filter(P: Posite, A: Callable[[int], bool], W: int,
                         max_rounds: int = 10_000) -> GenericFilter:
    """A prime filter X with W in X inside the coideal given by oracle A.

    Covers are visited round-robin; whenever the pivot lies below the covered
    element, the stability witness refines the cover to the pivot and the
    least-index member accepted by A becomes the next pivot.  On a finite
    carrier the pivot chain stops after a full round without change, and the
    filter is everything above the last pivot.
    """
    if not A(W):
        raise QpolisError("ORACLE_BREACH", "W is not accepted by the coideal oracle")
    result = GenericFilter([W])
    for _ in range(max_rounds):
        changed = False
        for c, (_, u) in enumerate(P.covers):
            result.visits.append(c)
            pivot = result.pivot
            if not P.le(pivot, u):
                continue
            w = P.stability(c, pivot)
            if w is None:
                raise QpolisError("ORACLE_BREACH", f"no refinement of cover {c} at the pivot")
            ws = P.covers[w[0]][0]
            chosen = next((v for v in bits(ws) if A(v)), None)
            if chosen is None:
                raise QpolisError("ORACLE_BREACH",
                                  f"coideal oracle accepts no member of cover {w[0]}", cover=w[0])
            if chosen != pivot:
                result.pivots.append(chosen)
                changed = True
        if not changed:
            return result
    raise QpolisError("ORACLE_BREACH", "pivot chain did not stabilise")


def mask_oracle(mask):
    return lambda i: (mask >> i) & 1 == 1


# --- ideals and opens -----------------------------------------------------


def pfilt_points(P) -> list:
    return brute_force(P, is_prime_filter)


def pfilt_topology(P) -> FiniteSpace:
    pts = pfilt_points(P)
    gens = [sum(1 << k for k, x in enumerate(pts) if (x >> u) & 1) for u in range(P.n)]
    return FiniteSpace(pts, gens)


def ideal_to_open(P, ideal: int) -> int:
    if not is_ideal(P, ideal) or P.upset(P.full & ~ideal) != P.full & ~ideal:
        raise QpolisError("NOT_AN_IDEAL", "set is not a downward-closed cover-closed ideal")
    pts = pfilt_points(P)
    return sum(1 << k for k, x in enumerate(pts) if x & ideal)


def open_to_ideal(P, C: int) -> int:
    space = pfilt_topology(P)
    if not space.is_open(C):
        raise QpolisError("NOT_OPEN", "set is not open in the prime-filter space")
    pts = space.points
    out = 0
    for u in range(P.n):
        inside = sum(1 << k for k, x in enumerate(pts) if (x >> u) & 1)
        if inside & ~C == 0:
            out |= 1 << u
    return out


# --- random and generated posites -----------------------------------------


def saturate(P: Posite, limit=None) -> Optional[Posite]:
    """Add pulled-back covers until every cover restricts along the order.

    The cover of U' pulled back from (V, U) is everything below U' and below
    some member of V.  Returns None if more than ``limit`` covers are needed.
    """
    covers = list(dict.fromkeys(P.covers))
    k = 0
    while k < len(covers):
        vs, u = covers[k]
        for u2 in bits(P.down(u)):
            Q = P.with_covers(covers)
            if search_witness(Q, k, u2) is None:
                pulled = 0
                for v in bits(vs):
                    pulled |= P.down(v)
                covers.append((pulled & P.down(u2), u2))
                if limit is not None and len(covers) > limit:
                    return None
        k += 1
    return P.with_covers(covers)


def random_posite(rng: random.Random, max_elements=8, max_covers=12) -> Posite:
    while True:
        n = rng.randint(1, max_elements)
        strict = random_strict_order(rng, n)
        base = Posite(tuple(f"u{i}" for i in range(n)), frozenset(strict), ())
        covers = []
        for _ in range(rng.randint(0, 4)):
            u = rng.randrange(n)
            below = list(bits(base.down(u)))
            vs = sum(1 << v for v in below if rng.random() < 0.5)
            covers.append((vs, u))
        P = saturate(base.with_covers(covers), max_covers)
        if P is not None:
            return P


def lower_cover_posite(n, strict) -> Posite:
    """Each element with something strictly below is covered by its immediate
    predecessors, saturated under restriction."""
    base = Posite(tuple(range(n)), frozenset(strict), ())
    covers = []
    for u in range(n):
        below = base.down(u) & ~(1 << u)
        if not below:
            continue
        immediate = 0
        for v in bits(below):
            if not any((v, w) in strict and (w, u) in strict for w in range(n)):
                immediate |= 1 << v
        covers.append((immediate, u))
    return saturate(base.with_covers(covers))


# --- Baire category point builder -----------------------------------------


def generic_point_bct(indices, F, opens, rounds=None) -> frozenset:
    """Build s_0 <= s_1 <= ... with s_{n+1} = s_n + t for the first generator t
    of U_n keeping F inside the basic open of s_n + t nonempty.

    ``F(s)`` answers whether the closed set meets the basic open of s.
    """
    s = frozenset()
    if not F(s):
        raise QpolisError("DENSITY_FAILURE", "the closed set is empty", n=None)
    todo = list(opens) if rounds is None else list(opens)[:rounds]
    for n, U in enumerate(todo):
        for t in U.generators:
            if F(s | t):
                s = s | t
                break
        else:
            raise QpolisError("DENSITY_FAILURE", f"open {n} is not dense in the closed set", n=n)
    return s


def random_bct_instance(rng: random.Random, max_indices=10, max_opens=20):
    """Closed F = down-closure of a few maximal sets, and opens dense in F."""
    m = rng.randint(1, max_indices)
    I = list(range(m))
    maxima = []
    for _ in range(rng.randint(1, 3)):
        maxima.append(frozenset(i for i in I if rng.random() < 0.6))
    maxima = [x for x in maxima if not any(x < y for y in maxima)]
    maxima = list(dict.fromkeys(maxima))
    opens = []
    for _ in range(rng.randint(1, max_opens)):
        gens = []
        for x in maxima:
            gens.append(frozenset(i for i in x if rng.random() < 0.5))
        for _ in range(rng.randint(0, 2)):
            gens.append(frozenset(i for i in I if rng.random() < 0.3))
        opens.append(OpenCode(tuple(gens)))
    return I, maxima, opens


def closed_oracle(maxima):
    return lambda s: any(s <= x for x in maxima)


def random_filter_instance(rng: random.Random, max_elements=8, max_covers=12):
    """A random posite with a random nonempty coideal A and W in A."""
    while True:
        P = random_posite(rng, max_elements, max_covers)
        coideals = [m for m in brute_force(P, is_coideal) if m]
        if coideals:
            A = rng.choice(coideals)
            return P, A, rng.choice(list(bits(A)))
