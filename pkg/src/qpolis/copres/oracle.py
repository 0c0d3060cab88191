"""Independent finite-scale checks for the copresentation constructors.

Each check rebuilds the intended space directly from point sets and compares
it with the brute-force denotation of the constructed copresentation.
"""

from __future__ import annotations

from ..finite.borel import eval_borel
from ..finite.space import FiniteSpace
from .codes import code_mask


def is_homeomorphism(A: FiniteSpace, B: FiniteSpace, f) -> bool:
    """``f`` maps point indices of A to point indices of B."""
    if sorted(f) != list(range(B.n)) or len(f) != A.n:
        return False

    def image(mask):
        out = 0
        for k in range(A.n):
            if (mask >> k) & 1:
                out |= 1 << f[k]
        return out
    return {image(u) for u in A.opens} == set(B.opens)


def glued_space(pieces, overlaps) -> tuple[FiniteSpace, dict]:
    """The glued space built from equivalence classes of (piece, point).

    Returns the space and a map from (piece, point) to class index.
    """
    dens = [C.denote() for C in pieces]
    parent = {(u, x): (u, x) for u, D in enumerate(dens) for x in D}

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a
    for (u, v), (O, tau) in overlaps.items():
        for x in dens[u]:
            if O.find(x) is not None:
                y = frozenset(l for l in pieces[v].indices if tau[l].find(x) is not None)
                parent[find((u, x))] = find((v, y))
    roots = sorted({find(a) for a in parent}, key=repr)
    cls = {a: roots.index(find(a)) for a in parent}
    spaces = [C.to_finite_space() for C in pieces]
    n = len(roots)
    opens = []
    for S in range(1 << n):
        ok = True
        for u, sp in enumerate(spaces):
            trace = 0
            for k, x in enumerate(sp.points):
                if (S >> cls[(u, x)]) & 1:
                    trace |= 1 << k
            if not sp.is_open(trace):
                ok = False
                break
        if ok:
            opens.append(S)
    return FiniteSpace(list(range(n)), opens), cls


def check_glue(pieces, overlaps, glued) -> bool:
    from .build import FLAG
    E, cls = glued_space(pieces, overlaps)
    G = glued.to_finite_space()
    f = []
    for p in G.points:
        u = min(j for j, l in p if l == FLAG)
        x = frozenset(l[1] for j, l in p if j == u and isinstance(l, tuple) and l[0] == "pt")
        f.append(cls[(u, x)])
    return is_homeomorphism(G, E, f)


def check_refinement(C, codes, R) -> bool:
    """The refined denotation projects bijectively onto C's, keeps C's opens,
    makes each coded set open, and every refined open is at the codes' level."""
    from ..finite.borel import sigma_level_membership
    base = C.to_finite_space()
    fine = R.copres.to_finite_space()
    proj = []
    for p in fine.points:
        q = frozenset(b for b in C.indices if R.base_map[b] in p)
        proj.append(base.points.index(q))
    if sorted(proj) != list(range(base.n)):
        return False

    def transport(mask):
        return sum(1 << k for k in range(fine.n) if (mask >> proj[k]) & 1)

    def back(mask):
        return sum(1 << proj[k] for k in range(fine.n) if (mask >> k) & 1)
    coded = [transport(eval_borel(base, _masked(base, code))) for code in codes]
    if not all(fine.is_open(transport(u)) for u in base.opens):
        return False
    if not all(code_mask(fine, o) == m for o, m in zip(R.opens, coded)):
        return False
    level = max([1] + [code.level for code in codes])
    return all(sigma_level_membership(base, back(u), level) for u in fine.opens)


def _masked(space, code):
    """Replace open-code bodies by bit-sets over the denotation space."""
    from ..finite.borel import BorelCode
    if code.level == 1:
        body = code.body if isinstance(code.body, int) else code_mask(space, code.body)
        return BorelCode(1, body)
    return BorelCode(code.level, [(_masked(space, a), _masked(space, b)) for a, b in code.body])
