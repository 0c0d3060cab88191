"""The lower powerspace of closed sets, via coideals of a basic posite, and
the closed-fibre embedding of a continuous open surjection.

On a finite model the closed set F corresponds to the coideal
{U in basis : F meets U}; the inverse sends a coideal to the complement of
the union of the basis sets outside it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .copres.build import pi02_subspace
from .copres.codes import TOP, Copresentation, OpenCode, Pi02Relation
from .errors import QpolisError
from .finite.order import closure, is_essential, irreducible_closed_sets, lower_powerspace, \
    point_closure
from .finite.space import FiniteMap, FiniteSpace, bits
from .posite import BasicPosite, coidl_space, posite_from_copres, to_mask


@dataclass(frozen=True, eq=False)
class PowerspaceHandle:
    base: BasicPosite
    copres: Copresentation

    @property
    def space(self) -> FiniteSpace:
        return self.base.space

    @property
    def basis(self):
        return self.base.basis

    def closed_to_coideal(self, F: int) -> int:
        return sum(1 << i for i, b in enumerate(self.basis) if b & F)

    def coideal_to_closed(self, c: int) -> int:
        outside = 0
        for i, b in enumerate(self.basis):
            if not (c >> i) & 1:
                outside |= b
        return self.space.full & ~outside

    def diamond(self, W: int) -> OpenCode:
        """Open code for the closed sets meeting the open W, through the basis."""
        if not self.space.is_open(W):
            raise QpolisError("SCHEMA_ERROR", f"{W:b} is not open")
        return OpenCode(tuple(frozenset({i}) for i, b in enumerate(self.basis) if b & ~W == 0 and b))

    def denoted_closed_sets(self, C: Copresentation | None = None) -> list[int]:
        C = self.copres if C is None else C
        return sorted(self.coideal_to_closed(to_mask(p)) for p in C.denote())


def powerspace(X, basis=None) -> PowerspaceHandle:
    B = X if isinstance(X, BasicPosite) else posite_from_copres(X, basis)
    return PowerspaceHandle(B, coidl_space(B.posite))


def check_powerspace(H: PowerspaceHandle) -> dict:
    """Coideals match closed sets, and the match is a homeomorphism onto the
    lower powerspace carrying each diamond to its subbasic open."""
    X = H.space
    closed = list(X.closed_sets())
    coideals = [to_mask(p) for p in H.copres.denote()]
    forward = {F: H.closed_to_coideal(F) for F in closed}
    bijective = (len(coideals) == len(closed)
                 and sorted(forward.values()) == sorted(coideals)
                 and all(H.coideal_to_closed(forward[F]) == F for F in closed))
    FX = lower_powerspace(X)
    D = H.copres.to_finite_space()
    homeo = False
    if bijective:
        pos = {to_mask(p): k for k, p in enumerate(D.points)}
        graph = [pos[forward[X.mask(F)]] for F in FX.points]
        image = {sum(1 << graph[k] for k in bits(u)) for u in FX.opens}
        homeo = image == set(D.opens)
        for i, b in enumerate(H.basis):
            sub = sum(1 << k for k, p in enumerate(D.points) if i in p)
            dia = sum(1 << graph[k] for k, F in enumerate(FX.points) if X.mask(F) & b)
            homeo = homeo and sub == dia
    return {"closed_sets": len(closed), "coideals": len(coideals), "bijective": bijective,
            "homeomorphism": homeo}


def down_relations(H: PowerspaceHandle) -> list:
    """Nonempty, and meeting U and V implies meeting U and V together."""
    X = H.space
    rels = [Pi02Relation(TOP, H.diamond(X.full))]
    m = len(H.basis)
    for u in range(m):
        for v in range(u + 1, m):
            rels.append(Pi02Relation(OpenCode.basic(u, v), H.diamond(H.basis[u] & H.basis[v])))
    return rels


def down_copres(H: PowerspaceHandle) -> Copresentation:
    return pi02_subspace(H.copres, down_relations(H))


def check_down(H: PowerspaceHandle) -> dict:
    X = H.space
    denoted = H.denoted_closed_sets(down_copres(H))
    irreducible = sorted(irreducible_closed_sets(X))
    image = sorted({point_closure(X, k) for k in range(X.n)})
    return {"denoted": denoted, "irreducible": irreducible, "image": image,
            "agree": denoted == irreducible == image}


# --- maps ------------------------------------------------------------------


def fibre_closure_map(f: FiniteMap) -> FiniteMap:
    """y -> preimage of closure{y}, into the lower powerspace of the source."""
    X = f.source
    FX = lower_powerspace(X)
    graph = tuple(FX.index(frozenset(X.names(f.preimage(point_closure(f.target, y)))))
                  for y in range(f.target.n))
    return FiniteMap(f.target, FX, graph)


def essential_check_via_powerspace(f: FiniteMap) -> dict:
    if not f.is_continuous():
        raise QpolisError("NOT_CONTINUOUS", "map is not continuous")
    via = fibre_closure_map(f).is_continuous()
    direct = is_essential(f)
    return {"essential": direct, "fibre_map_continuous": via, "agree": via == direct}


def openmap_fiber_closure_check(f: FiniteMap, override=False) -> dict:
    """Preimage of closure{y} equals closure of the fibre of y, for each y."""
    if not f.is_open_map() and not override:
        raise QpolisError("NOT_OPEN_MAP", "map is not open")
    failures = []
    for y in range(f.target.n):
        lhs = f.preimage(point_closure(f.target, y))
        rhs = closure(f.source, f.fiber(y))
        if lhs != rhs:
            failures.append({"y": f.target.points[y], "preimage_of_closure": lhs,
                             "closure_of_fibre": rhs})
    return {"ok": not failures, "failures": failures}


@dataclass(frozen=True)
class OpenSurjectionReport:
    embedding: tuple          # closed set of X per point of Y
    is_embedding: bool
    star_identity: bool
    three_condition: tuple    # closed sets of X satisfying the three conditions
    copres_denotation: tuple  # the same set, from the relations over coideals
    equal: bool

    def to_json(self):
        return {"embedding": list(self.embedding), "is_embedding": self.is_embedding,
                "star_identity": self.star_identity, "three_condition": list(self.three_condition),
                "copres_denotation": list(self.copres_denotation), "equal": self.equal}


def open_surj_embedding(f: FiniteMap, basis=None) -> OpenSurjectionReport:
    X, Y = f.source, f.target
    if not f.is_continuous():
        raise QpolisError("NOT_CONTINUOUS", "map is not continuous")
    if not f.is_open_map():
        raise QpolisError("NOT_OPEN_MAP", "map is not open")
    if not f.is_surjective():
        raise QpolisError("NOT_SURJECTIVE", "map is not surjective")
    if not Y.is_t0():
        raise QpolisError("NOT_T0", "target is not T0")
    emb = tuple(closure(X, f.fiber(y)) for y in range(Y.n))
    FX = lower_powerspace(X)
    e = FiniteMap(Y, FX, tuple(FX.index(frozenset(X.names(F))) for F in emb))
    star = all(sum(1 << y for y in range(Y.n) if emb[y] & u) == f.image(u) for u in X.opens)
    H = powerspace(X, basis)
    sat = {i: f.preimage(f.image(b)) for i, b in enumerate(H.basis)}

    def conditions(F):
        if not F:
            return False
        for i, U in enumerate(H.basis):
            for V in H.basis:
                if F & U and F & V and not F & sat[i] & V:
                    return False
            if F & sat[i] and not F & U:
                return False
        return True
    three = tuple(F for F in X.closed_sets() if conditions(F))
    rels = [Pi02Relation(TOP, H.diamond(X.full))]
    for i, U in enumerate(H.basis):
        for j, V in enumerate(H.basis):
            rels.append(Pi02Relation(OpenCode.basic(i, j), H.diamond(sat[i] & V)))
        rels.append(Pi02Relation(H.diamond(sat[i]), OpenCode.basic(i)))
    denoted = tuple(H.denoted_closed_sets(pi02_subspace(H.copres, rels)))
    image = sorted(set(emb))
    return OpenSurjectionReport(emb, e.is_embedding(), star, three, denoted,
                                list(three) == image == list(denoted))
