"""Space constructors on copresentations.

Every constructor returns a new ``Copresentation`` whose relation families
are checked for well-formedness on construction.  Fresh labels are produced by
tagging: a product tags factor j's labels as ``(j, label)``, a lift tags the
old labels ``("pt", label)`` and adds the flag ``("flag", 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..errors import QpolisError
from ..finite.borel import BorelCode
from ..finite.space import FiniteSpace, bits, lattice_closure
from ..finite.transfer import finite_pi02_definition
from ..rationals import unpair
from .codes import (
    EMPTY,
    NATURALS,
    TOP,
    CountableIndex,
    Copresentation,
    OpenCode,
    Pi02Relation,
    RelationFamily,
)

FLAG = ("flag", 0)


def retag(C: Copresentation, tag) -> Copresentation:
    if C.finite_indices:
        indices = tuple((tag, l) for l in C.indices)
    else:
        indices = C.indices.retag(tag)
    return Copresentation(indices, tuple(f.retag(tag) for f in C.families), C.provenance)


def sierpinski() -> Copresentation:
    return Copresentation((0,), (), ("sierpinski",))


def sierpinski_power(n="countable") -> Copresentation:
    if n == "countable":
        return Copresentation(NATURALS, (), ("sierpinski_power(countable)",))
    return Copresentation(tuple(range(n)), (), (f"sierpinski_power({n})",))


def point() -> Copresentation:
    """The one-point space: no indices, no relations."""
    return Copresentation((), (), ("point",))


def product(factors) -> Copresentation:
    """Product of a finite list of copresentations (labels tagged by position)."""
    factors = list(factors)
    tagged = [retag(C, j) for j, C in enumerate(factors)]
    if all(C.finite_indices for C in tagged):
        indices = tuple(l for C in tagged for l in C.indices)
    else:
        m = len(tagged)

        def item(k):
            j, r = unpair(k)
            if j >= m:
                return None
            idx = tagged[j].indices
            if isinstance(idx, CountableIndex):
                return idx.item(r)
            return idx[r] if r < len(idx) else None

        def contains(l):
            return any(C.has_index(l) for C in tagged)
        indices = CountableIndex("product", item, contains)
    fams = tuple(f for C in tagged for f in C.families)
    return Copresentation(indices, fams, (f"product({len(factors)})",))


def product_countable(factor, name="factor") -> Copresentation:
    """Product of countably many copresentations ``factor(j)``, j = 0, 1, ...

    Each factor must have finite indices and finitely many relations.
    """
    factor = lru_cache(maxsize=None)(factor)

    def parts(j):
        C = factor(j)
        if not C.is_finite:
            raise QpolisError("UNSUPPORTED", "countable products need finite factors")
        return C.indices, [r for r in C.relations()]

    def item(k):
        j, r = unpair(k)
        idx, _ = parts(j)
        return (j, idx[r]) if r < len(idx) else None

    def contains(l):
        return (isinstance(l, tuple) and len(l) == 2 and isinstance(l[0], int)
                and l[0] >= 0 and l[1] in parts(l[0])[0])

    def rel(k):
        j, r = unpair(k)
        _, rels = parts(j)
        if r >= len(rels):
            return None
        return Pi02Relation(rels[r].antecedent.retag(j), rels[r].consequent.retag(j))
    fam = RelationFamily("product.factors", None, rel, {"name": "product_countable",
                                                        "factor": name})
    return Copresentation(CountableIndex(f"product({name})", item, contains), (fam,),
                          (f"product_countable({name})",))


def lift(C: Copresentation) -> Copresentation:
    """Adjoin a new bottom point: the flag index marks "defined"."""
    inner = retag(C, "pt")
    flag = OpenCode.basic(FLAG)
    if inner.finite_indices:
        bottom = RelationFamily.of("lift.bottom",
                                   [Pi02Relation(OpenCode.basic(l), flag) for l in inner.indices])
        indices = inner.indices + (FLAG,)
    else:
        idx = inner.indices

        def item(k):
            l = idx.item(k)
            return None if l is None else Pi02Relation(OpenCode.basic(l), flag)
        bottom = RelationFamily("lift.bottom", None, item, {"name": "lift.bottom"})

        def ditem(k):
            return FLAG if k == 0 else idx.item(k - 1)
        indices = CountableIndex(f"lift({idx.name})", ditem,
                                 lambda l: l == FLAG or idx.contains(l))
    guarded = tuple(
        f.map(lambda r: Pi02Relation(r.antecedent.meet(flag), r.consequent), f"lift.{f.name}")
        for f in inner.families)
    return Copresentation(indices, (bottom,) + guarded, C.provenance + ("lift",))


def flag_of(j):
    return (j, FLAG)


def disjoint_union(pieces) -> Copresentation:
    """Sum of a finite list, embedded in the product of their lifts."""
    pieces = list(pieces)
    P = product([lift(C) for C in pieces])
    exists = Pi02Relation(TOP, OpenCode(tuple(frozenset({flag_of(j)}) for j in range(len(pieces)))))
    exclusive = [Pi02Relation(OpenCode.basic(flag_of(i), flag_of(j)), EMPTY)
                 for i in range(len(pieces)) for j in range(i + 1, len(pieces))]
    return Copresentation(P.indices, P.families + (RelationFamily.of("union.exists", [exists]),
                                                   RelationFamily.of("union.exclusive", exclusive)),
                          (f"disjoint_union({len(pieces)})",))


def pi02_subspace(C: Copresentation, rels) -> Copresentation:
    rels = list(rels)
    if not rels:
        return C
    return C.with_families([RelationFamily.of("subspace", rels)], "pi02_subspace")


def _fresh(C, base, count):
    out = []
    k = 0
    while len(out) < count:
        label = (base, k)
        if not C.has_index(label):
            out.append(label)
        k += 1
    return out


def sigma2_mask(space: FiniteSpace, code) -> int:
    """Points of a denotation lying in the union of differences ``code``."""
    from .codes import code_mask
    m = 0
    for b, c in code:
        m |= code_mask(space, b) & ~code_mask(space, c)
    return m & space.full


def adjoin_delta02(C: Copresentation, pairs, return_labels=False):
    """Adjoin Delta^0_2 sets, each given by level-2 codes for A and for its complement.

    A level-2 code is a list of ``(B, C)`` open-code pairs meaning the union of
    the differences B - C.
    """
    pairs = [(list(a), list(na)) for a, na in pairs]
    if C.is_finite:
        space = C.to_finite_space()
        for n, (a, na) in enumerate(pairs):
            ma, mna = sigma2_mask(space, a), sigma2_mask(space, na)
            if ma & mna or (ma | mna) != space.full:
                raise QpolisError("NOT_COMPLEMENTARY", f"pair {n} does not partition the space",
                                  pair=n)
    labels = _fresh(C, "adj", len(pairs))
    rels = []
    for (a, na), lab in zip(pairs, labels):
        flag = OpenCode.basic(lab)
        rels += [Pi02Relation(b, c.join(flag)) for b, c in a]
        rels += [Pi02Relation(b.meet(flag), c) for b, c in na]
    if C.finite_indices:
        indices = C.indices + tuple(labels)
    else:
        base = C.indices

        def item(k):
            return labels[k] if k < len(labels) else base.item(k - len(labels))
        indices = CountableIndex(base.name, item, lambda l: l in labels or base.contains(l))
    out = Copresentation(indices, C.families + (RelationFamily.of("adjoin", rels),),
                         C.provenance + (f"adjoin_delta02({len(pairs)})",))
    return (out, labels) if return_labels else out


def _check_translation(base, finer, tau):
    if not base.finite_indices:
        raise QpolisError("UNSUPPORTED", "joins need a finite base index set")
    if set(tau) != set(base.indices):
        raise QpolisError("BAD_TRANSLATION", "translation must cover every base index")
    if len(set(tau.values())) != len(tau) or not all(finer.has_index(v) for v in tau.values()):
        raise QpolisError("BAD_TRANSLATION", "translation must be injective into the finer indices")
    if base.is_finite and finer.is_finite:
        base_pts = set(base.denote())
        proj = [frozenset(b for b in base.indices if tau[b] in p) for p in finer.denote()]
        if len(set(proj)) != len(proj) or set(proj) != base_pts:
            raise QpolisError("BAD_TRANSLATION", "finer space does not project onto the base")


def _join(base, finers):
    """Returns (joined, base label map, per-finer label maps)."""
    for F, tau in finers:
        _check_translation(base, F, tau)
    if not finers:
        ident = {b: b for b in base.indices}
        return base, ident, []
    if len(finers) == 1:
        F, tau = finers[0]
        return F, dict(tau), [lambda l: l]
    P = product([F for F, _ in finers])
    diag = []
    for b in base.indices:
        for j, (_, tj) in enumerate(finers):
            for k, (_, tk) in enumerate(finers):
                if j != k:
                    diag.append(Pi02Relation(OpenCode.basic((j, tj[b])), OpenCode.basic((k, tk[b]))))
    J = Copresentation(P.indices, P.families + (RelationFamily.of("join.diagonal", diag),),
                       (f"join_topologies({len(finers)})",))
    base_map = {b: (0, finers[0][1][b]) for b in base.indices}
    maps = [(lambda j: (lambda l: (j, l)))(j) for j in range(len(finers))]
    return J, base_map, maps


def join_topologies(base: Copresentation, finers) -> Copresentation:
    """Topology generated by finer copresentations of the same space.

    ``finers`` is a list of ``(copresentation, translation)`` where the
    translation maps each base label to the finer label of the same open.
    """
    return _join(base, list(finers))[0]


@dataclass(frozen=True, eq=False)
class Refinement:
    copres: Copresentation
    base_map: dict        # base label -> label of the same subbasic open
    opens: tuple          # one OpenCode per input code, over the refined labels


def _map_code(code, fn):
    return OpenCode(tuple(frozenset(fn(l) for l in g) for g in code.generators))


def sigma_refine(C: Copresentation, codes) -> Refinement:
    """A finer copresentation in which every given Borel code denotes an open.

    Level-1 codes carry an ``OpenCode`` over C's labels as body.
    """
    return _refine_many(C, list(codes))


def _refine_many(C, codes):
    parts = [(k, _refine_one(C, code)) for k, code in enumerate(codes) if code.level > 1]
    J, base_map, maps = _join(C, [(R.copres, R.base_map) for _, R in parts])
    opens = [None] * len(codes)
    for (k, R), fn in zip(parts, maps):
        opens[k] = _map_code(R.opens[0], fn)
    for k, code in enumerate(codes):
        if code.level == 1:
            if not code.body.finite:
                raise QpolisError("UNSUPPORTED", "refinement needs finite open codes")
            opens[k] = _map_code(code.body, base_map.__getitem__)
    return Refinement(J, base_map, tuple(opens))


def _refine_one(C, code):
    if code.level == 1:
        return Refinement(C, {b: b for b in C.indices}, (code.body,))
    finers = []
    for b, c in code.body:
        R = _refine_many(C, [b, c])
        bo, co = R.opens
        minus = [(bo, co)]
        complement = [(TOP, bo), (co, EMPTY)]
        R2, (lab,) = adjoin_delta02(R.copres, [(minus, complement)], return_labels=True)
        finers.append((R2, R.base_map, OpenCode.basic(lab)))
    J, base_map, maps = _join(C, [(F, tau) for F, tau, _ in finers])
    union = EMPTY
    for (_, _, o), fn in zip(finers, maps):
        union = union.join(_map_code(o, fn))
    return Refinement(J, base_map, (union,))


def borel_over_copres(level, body):
    """Convenience: a Borel code whose level-1 bodies are open codes."""
    return BorelCode(level, body)


@dataclass(frozen=True)
class CanonicalEmbedding:
    image: dict        # point identifier -> frozenset of subbasis positions
    injective: bool


def canonical_embedding(X: FiniteSpace, subbasis, strict=True) -> CanonicalEmbedding:
    subbasis = list(subbasis)
    if strict and lattice_closure(subbasis, X.full) != X.opens:
        raise QpolisError("NOT_SUBBASIS", "family does not generate the topology")
    image = {X.points[k]: frozenset(i for i, u in enumerate(subbasis) if (u >> k) & 1)
             for k in range(X.n)}
    return CanonicalEmbedding(image, len(set(image.values())) == len(image))


def from_finite_space(X: FiniteSpace, subbasis=None, method="direct") -> Copresentation:
    """Copresentation of a finite T0 space over a subbasis (default: the
    distinct minimal neighbourhoods).

    ``method="transfer"`` derives the relations by running the level-2
    transfer on the image inside the finite Sierpinski power.
    """
    if subbasis is None:
        subbasis = sorted(set(X.min_nbhds()))
    emb = canonical_embedding(X, subbasis)
    idx = list(range(len(subbasis)))
    if method == "direct":
        rels = finite_pi02_definition(idx, emb.image.values())
    elif method == "transfer":
        rels = _relations_by_transfer(idx, emb.image.values())
    else:
        raise QpolisError("SCHEMA_ERROR", f"unknown method {method!r}")
    relations = [Pi02Relation(OpenCode(u), OpenCode(v)) for u, v in rels]
    return Copresentation(idx, (RelationFamily.of("image", relations),),
                          (f"from_finite_space({method})",))


def _relations_by_transfer(idx, image):
    from ..finite.space import sierpinski_power as finite_power
    from ..finite.transfer import canonical_transfer_data, pi02_transfer
    P = finite_power(len(idx))
    Y = P.mask(image)
    res = pi02_transfer(P, Y, *canonical_transfer_data(P, Y))
    # the transfer emits one relation per basic open, so identical and
    # trivially true (p inside q) relations are dropped
    rels = []
    for p, q in dict.fromkeys(res.relations):
        if p & ~q:
            rels.append((_upset_generators(P, p), _upset_generators(P, q)))
    return rels


def _upset_generators(P, mask):
    """Minimal elements of an up-set of S^n, each a generator."""
    members = [P.points[k] for k in bits(mask)]
    return tuple(z for z in members if not any(w < z for w in members))


def _overlap_map(Du, Dv, O, tau, Iv):
    """Points of piece u in the overlap, and their images in piece v."""
    return {x: frozenset(l for l in Iv if tau[l].find(x) is not None)
            for x in Du if O.find(x) is not None}


def glue(pieces, overlaps) -> Copresentation:
    """Glue finite copresentations along open overlaps.

    ``overlaps[(u, v)] = (O, tau)`` for every ordered pair u != v: ``O`` is an
    open code over piece u naming the overlap with piece v, and ``tau`` maps
    each label of piece v to an open code over piece u describing the same
    subbasic open on the overlap.
    """
    pieces = list(pieces)
    m = len(pieces)
    if not all(C.is_finite for C in pieces):
        raise QpolisError("UNSUPPORTED", "gluing needs finite pieces")
    dens = [C.denote() for C in pieces]
    for u in range(m):
        for v in range(m):
            if u == v:
                continue
            if (u, v) not in overlaps:
                raise QpolisError("INCOHERENT_OVERLAP", f"missing overlap ({u}, {v})")
            O, tau = overlaps[(u, v)]
            if set(tau) != set(pieces[v].indices):
                raise QpolisError("INCOHERENT_OVERLAP", f"translation ({u}, {v}) incomplete")
    maps = {}
    for (u, v), (O, tau) in overlaps.items():
        maps[(u, v)] = _overlap_map(dens[u], dens[v], O, tau, pieces[v].indices)
    for (u, v), phi in maps.items():
        back = maps[(v, u)]
        for x, y in phi.items():
            if y not in back or back[y] != x:
                raise QpolisError("INCOHERENT_OVERLAP",
                                  f"overlap maps ({u}, {v}) and ({v}, {u}) are not inverse",
                                  pair=[u, v])
    P = product([lift(C) for C in pieces])

    def inner(u, code):
        return OpenCode(tuple(frozenset((u, ("pt", l)) for l in g) for g in code.generators))
    rels = [Pi02Relation(TOP, OpenCode(tuple(frozenset({flag_of(u)}) for u in range(m))))]
    for u in range(m):
        fu = OpenCode.basic(flag_of(u))
        for v in range(m):
            if u == v:
                continue
            O, tau = overlaps[(u, v)]
            Ou = inner(u, O)
            rels.append(Pi02Relation(fu.meet(Ou), OpenCode.basic(flag_of(v))))
            rels.append(Pi02Relation(OpenCode.basic(flag_of(u), flag_of(v)), Ou))
            for l in pieces[v].indices:
                t = Ou.meet(inner(u, tau[l]))
                rels.append(Pi02Relation(fu.meet(t), OpenCode.basic((v, ("pt", l)))))
                rels.append(Pi02Relation(OpenCode.basic((v, ("pt", l)), flag_of(u)), t))
    return Copresentation(P.indices, P.families + (RelationFamily.of("glue", rels),),
                          (f"glue({m})",))
