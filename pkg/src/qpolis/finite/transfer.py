"""Defining a subspace Y of a finite space X by a level-2 condition, starting
from an embedding of Y into a Sierpinski power with a relation-list image.

Relations over an index list are pairs ``(U, V)`` of generator tuples; each
generator is a frozenset ``s`` standing for the basic open of all points
containing ``s``.  ``U`` and ``V`` denote the unions of their generators and
the pair imposes "U implies V".
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from ..errors import QpolisError
from .borel import BorelCode
from .order import saturation
from .space import FiniteSpace, bits, lattice_closure


def finite_subsets(indices):
    indices = list(indices)
    for r in range(len(indices) + 1):
        for combo in combinations(indices, r):
            yield frozenset(combo)


def holds(point: frozenset, gens) -> bool:
    return any(s <= point for s in gens)


def satisfies(point: frozenset, relations) -> bool:
    return all(not holds(point, u) or holds(point, v) for u, v in relations)


def solutions(indices, relations) -> list[frozenset]:
    """All points of S^indices satisfying every relation (brute force)."""
    return [z for z in finite_subsets(indices) if satisfies(z, relations)]


def finite_pi02_definition(indices, points) -> list[tuple]:
    """Relations whose solution set is exactly ``points``.

    Each excluded z gets "contains z implies strictly contains z".
    """
    indices = list(indices)
    keep = set(points)
    rels = []
    for z in finite_subsets(indices):
        if z in keep:
            continue
        rels.append(((z,), tuple(z | {j} for j in indices if j not in z)))
    return rels


def basic_inside(s: frozenset, gens) -> bool:
    """Is the basic open of ``s`` contained in the union of ``gens``?"""
    return any(t <= s for t in gens)


@dataclass(frozen=True)
class TransferResult:
    computed: int            # the set A & (all B_W), as a bit-set of X
    A: int
    relations: tuple         # pairs of X-opens (P, Q): Y = all "P implies Q"
    complement_code: BorelCode  # level-2 code for X - Y


def pi02_transfer(X: FiniteSpace, Y: int, indices, embed: dict, relations, W: dict,
                  subbasis) -> TransferResult:
    """Build the level-2 definition of ``Y`` inside ``X``.

    ``embed`` maps point indices of Y to frozensets of ``indices``;
    ``relations`` define the image of ``embed``; ``W[i]`` is an open of X whose
    trace on Y is the preimage of the i-th subbasic open; ``subbasis`` is a
    list of opens generating X.
    """
    indices = list(indices)
    _check_embedding(X, Y, indices, embed, relations, W, subbasis)
    subsets = list(finite_subsets(indices))

    def W_s(s):
        m = X.full
        for i in s:
            m &= W[i]
        return m

    def preimage(s):
        m = 0
        for y, z in embed.items():
            if s <= z:
                m |= 1 << y
        return m

    pairs = []
    A = X.full
    for u, v in relations:
        P = Q = 0
        for s in subsets:
            if basic_inside(s, u):
                P |= W_s(s)
            if basic_inside(s, v):
                Q |= W_s(s)
        A &= ~P | Q
        pairs.append((P, Q))
    A &= X.full
    computed = A
    for w in subbasis:
        R = 0
        for s in subsets:
            if preimage(s) & ~w == 0:
                R |= W_s(s)
        computed &= X.full & ~(w ^ R)
        pairs.append((w, R))
        pairs.append((R, w))
    if computed != Y:
        raise QpolisError("TRANSFER_MISMATCH", f"constructed {computed:b} but Y is {Y:b}",
                          computed=computed, Y=Y)
    code = BorelCode(2, [(BorelCode.open(p), BorelCode.open(q)) for p, q in pairs])
    return TransferResult(computed, A, tuple(pairs), code)


def _check_embedding(X, Y, indices, embed, relations, W, subbasis):
    if set(bits(Y)) != set(embed):
        raise QpolisError("NOT_EMBEDDING", "embedding must be defined exactly on Y")
    images = [embed[y] for y in sorted(embed)]
    if len(set(images)) != len(images):
        raise QpolisError("NOT_EMBEDDING", "embedding is not injective")
    if set(images) != set(solutions(indices, relations)):
        raise QpolisError("NOT_EMBEDDING", "relations do not define the image")
    traces = set(X.subspace_opens(Y))
    pulled = []
    for i in indices:
        pre = sum(1 << y for y, z in embed.items() if i in z)
        if pre not in traces:
            raise QpolisError("NOT_EMBEDDING", f"preimage of index {i!r} is not open in Y")
        if W[i] not in X._open_set or W[i] & Y != pre:
            raise QpolisError("NOT_EMBEDDING", f"W[{i!r}] does not trace the preimage")
        pulled.append(pre)
    if set(lattice_closure(pulled, Y)) != traces:
        raise QpolisError("NOT_EMBEDDING", "embedding is not a homeomorphism onto its image")
    if lattice_closure(subbasis, X.full) != X.opens:
        raise QpolisError("NOT_SUBBASIS", "W-family does not generate the topology of X")


def canonical_transfer_data(X: FiniteSpace, Y: int):
    """Canonical inputs for ``pi02_transfer``: index set = minimal neighbourhoods
    of the subspace Y, embedding = membership, W = their saturations in X,
    subbasis = minimal neighbourhoods of X."""
    nb = sorted({X.min_nbhd(k) & Y for k in bits(Y)})
    indices = list(range(len(nb)))
    embed = {y: frozenset(i for i, o in enumerate(nb) if (o >> y) & 1) for y in bits(Y)}
    rels = finite_pi02_definition(indices, embed.values())
    W = {i: saturation(X, o) for i, o in enumerate(nb)}
    subbasis = sorted(set(X.min_nbhds()))
    return indices, embed, rels, W, subbasis
