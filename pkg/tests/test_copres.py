import random

import pytest

from qpolis import QpolisError
from qpolis.copres import (
    EMPTY,
    TOP,
    OpenCode,
    Pi02Relation,
    adjoin_delta02,
    canonical_embedding,
    disjoint_union,
    from_finite_space,
    glue,
    join_topologies,
    lift,
    pi02_subspace,
    point,
    product,
    sierpinski,
    sierpinski_power,
    sigma_refine,
)
from qpolis.copres.build import FLAG
from qpolis.copres.codes import code_mask
from qpolis.copres.oracle import check_glue, check_refinement, is_homeomorphism
from qpolis.finite import BorelCode, FiniteSpace, all_t0_spaces, chain, random_t0_space, specialization
from qpolis.finite.borel import sigma_level_membership
from qpolis.finite.space import bits, sierpinski as finite_sierpinski


def homeomorphic_to(C, X, f):
    """``f`` sends a denotation point of C to a point index of X."""
    D = C.to_finite_space()
    return is_homeomorphism(D, X, [f(p) for p in D.points])


def small_copres(seed, max_points=3):
    X = random_t0_space(random.Random(seed), max_points)
    return X, from_finite_space(X)


def image_of(X, C):
    """Map from C's denotation to X's point indices via the canonical embedding."""
    subbasis = sorted(set(X.min_nbhds()))
    emb = canonical_embedding(X, subbasis).image
    inv = {v: X.index(k) for k, v in emb.items()}
    return inv.__getitem__


# --- basic constructors ---------------------------------------------------


def test_sierpinski_and_powers():
    assert sierpinski().denote() == [frozenset(), frozenset({0})]
    assert len(sierpinski_power(2).denote()) == 4
    assert not sierpinski_power().finite_indices


def test_empty_product_is_a_point():
    assert product([]).denote() == [frozenset()]


def test_product_counts_and_topology():
    for seed in range(15):
        X, CX = small_copres(seed)
        Y, CY = small_copres(seed + 100)
        P = product([CX, CY])
        fx, fy = image_of(X, CX), image_of(Y, CY)
        XY = X.product(Y)

        def f(p):
            a = frozenset(l for j, l in p if j == 0)
            b = frozenset(l for j, l in p if j == 1)
            return fx(a) * Y.n + fy(b)
        assert homeomorphic_to(P, XY, f)


def test_product_with_one_relation_space():
    C = pi02_subspace(sierpinski_power(2), [Pi02Relation(OpenCode.basic(0), OpenCode.basic(1))])
    assert len(product([sierpinski(), C]).denote()) == 2 * 3


def test_lift_adds_bottom():
    assert len(lift(point()).denote()) == 2
    assert len(lift(sierpinski()).denote()) == 3
    for seed in range(15):
        X, CX = small_copres(seed)
        D = lift(CX).to_finite_space()
        assert D.n == X.n + 1
        bottom = D.points.index(frozenset())
        order = specialization(D)
        assert all((D.points[bottom], p) in order for p in D.points)


def test_disjoint_union_is_sum():
    assert len(disjoint_union([point(), point()]).denote()) == 2
    assert len(disjoint_union([sierpinski(), point()]).denote()) == 3
    both = frozenset({(0, FLAG), (1, FLAG)})
    assert both not in disjoint_union([point(), point()]).denote()
    for seed in range(10):
        X, CX = small_copres(seed)
        Y, CY = small_copres(seed + 50)
        U = disjoint_union([CX, CY]).to_finite_space()
        assert U.n == X.n + Y.n
        # the two flag opens are complementary clopens
        flags = [code_mask(U, OpenCode.basic((j, FLAG))) for j in (0, 1)]
        assert flags[0] | flags[1] == U.full and flags[0] & flags[1] == 0


def test_pi02_subspace():
    C2 = sierpinski_power(2)
    assert pi02_subspace(C2, []) is C2
    assert len(pi02_subspace(C2, [Pi02Relation(OpenCode.basic(0), OpenCode.basic(1))]).denote()) == 3
    assert pi02_subspace(C2, [Pi02Relation(TOP, EMPTY)]).denote() == []


def test_malformed_relation_rejected():
    with pytest.raises(QpolisError) as exc:
        pi02_subspace(sierpinski(), [Pi02Relation(OpenCode.basic(7), TOP)])
    assert exc.value.code == "MALFORMED_RELATION"


# --- finite spaces as copresentations -------------------------------------


def test_from_finite_space_round_trip_and_transfer_agree():
    for X in all_t0_spaces(4):
        direct = from_finite_space(X)
        via = from_finite_space(X, method="transfer")
        assert direct.denote() == via.denote()
        assert homeomorphic_to(direct, X, image_of(X, direct))


def test_canonical_embedding():
    S = finite_sierpinski()
    assert canonical_embedding(S, [0b10]).image == {0: frozenset(), 1: frozenset({0})}
    C = chain(3)
    nontrivial = [u for u in C.opens if u not in (0, C.full)]
    assert canonical_embedding(C, nontrivial).injective
    X = FiniteSpace(["a", "b"], [0b01, 0b10])
    assert not canonical_embedding(X, [X.full], strict=False).injective
    with pytest.raises(QpolisError) as exc:
        canonical_embedding(X, [0b01])
    assert exc.value.code == "NOT_SUBBASIS"


# --- gluing ---------------------------------------------------------------


def open_code(space, subbasis, mask):
    """Open code over subbasis positions for an open ``mask`` of ``space``."""
    gens = []
    for k in bits(mask):
        gens.append(frozenset(i for i, u in enumerate(subbasis) if (u >> k) & 1))
    return OpenCode(tuple(gens))


def cover_pieces(X, U, V):
    """Copresentations of the open subspaces U, V of X with overlap data."""
    parts = []
    for W in (U, V):
        sub = X.subspace(W)
        basis = sorted(set(sub.min_nbhds()))
        ambient = [i for i in bits(W)]
        parts.append((sub, basis, ambient, from_finite_space(sub, basis)))

    def restrict(W_from, W_to):
        sub_f, basis_f, amb_f, _ = parts[W_from]
        sub_t, basis_t, amb_t, C_t = parts[W_to]

        def to_local(mask_ambient):
            return sum(1 << amb_f.index(k) for k in bits(mask_ambient) if k in amb_f)

        def lift_mask(local, amb):
            return sum(1 << amb[k] for k in bits(local))
        overlap = to_local(U & V)
        O = open_code(sub_f, basis_f, overlap)
        tau = {l: open_code(sub_f, basis_f, to_local(lift_mask(basis_t[l], amb_t)) & overlap)
               for l in C_t.indices}
        return O, tau
    pieces = [parts[0][3], parts[1][3]]
    return pieces, {(0, 1): restrict(0, 1), (1, 0): restrict(1, 0)}


def test_glue_two_sierpinskis_along_open_point():
    S = sierpinski()
    O = OpenCode.basic(0)
    overlaps = {(0, 1): (O, {0: TOP}), (1, 0): (O, {0: TOP})}
    G = glue([S, S], overlaps)
    assert len(G.denote()) == 3
    assert check_glue([S, S], overlaps, G)


def test_glue_single_piece_is_copy():
    S = sierpinski()
    G = glue([S], {})
    assert len(G.denote()) == 2


def test_glue_recovers_covered_spaces():
    rng = random.Random(7)
    checked = 0
    for X in all_t0_spaces(4):
        opens = [u for u in X.opens if u]
        for _ in range(3):
            U, V = rng.choice(opens), rng.choice(opens)
            if U | V != X.full:
                continue
            pieces, overlaps = cover_pieces(X, U, V)
            G = glue(pieces, overlaps)
            assert check_glue(pieces, overlaps, G)
            assert G.to_finite_space().n == X.n
            checked += 1
    assert checked > 20


def test_incoherent_overlap():
    S = sierpinski()
    O = OpenCode.basic(0)
    with pytest.raises(QpolisError) as exc:
        glue([S, S], {(0, 1): (O, {0: EMPTY}), (1, 0): (O, {0: TOP})})
    assert exc.value.code == "INCOHERENT_OVERLAP"


# --- adjoining sets, joins, refinements -----------------------------------


def complement_code(B):
    return [(TOP, B)]


def test_adjoin_open_preserves_points():
    for n in range(1, 4):
        C = sierpinski_power(n)
        U = OpenCode.basic(0)
        out, (a,) = adjoin_delta02(C, [([(U, EMPTY)], complement_code(U))], return_labels=True)
        pts = out.denote()
        assert len(pts) == len(C.denote())
        assert all((a in p) == (0 in p) for p in pts)


def test_adjoin_whole_and_empty():
    C = sierpinski_power(2)
    out, (a,) = adjoin_delta02(C, [([(TOP, EMPTY)], [])], return_labels=True)
    assert all(a in p for p in out.denote())
    out, (a,) = adjoin_delta02(C, [([], [(TOP, EMPTY)])], return_labels=True)
    assert all(a not in p for p in out.denote())


def test_adjoin_rejects_non_partition():
    with pytest.raises(QpolisError) as exc:
        adjoin_delta02(sierpinski(), [([(TOP, EMPTY)], [(TOP, EMPTY)])])
    assert exc.value.code == "NOT_COMPLEMENTARY"


def test_join_topologies():
    base = sierpinski_power(2)
    assert join_topologies(base, []) is base
    finers = []
    for i in (0, 1):
        U = OpenCode.basic(i)
        F, (a,) = adjoin_delta02(base, [(complement_code(U), [(U, EMPTY)])], return_labels=True)
        finers.append((F, {0: 0, 1: 1}))
    assert join_topologies(base, finers[:1]) is finers[0][0]
    J = join_topologies(base, finers).to_finite_space()
    assert J.n == 4
    # both closed sets {x : i not in x} became open, so the join is discrete
    assert len(J.opens) == 16


def test_join_rejects_bad_translation():
    base = sierpinski_power(2)
    with pytest.raises(QpolisError) as exc:
        join_topologies(base, [(base, {0: 0, 1: 0})])
    assert exc.value.code == "BAD_TRANSLATION"


def test_sigma_refine_closed_point_of_sierpinski():
    S = sierpinski()
    closed = BorelCode(2, [(BorelCode(1, TOP), BorelCode(1, OpenCode.basic(0)))])
    R = sigma_refine(S, [closed])
    D = R.copres.to_finite_space()
    assert D.n == 2 and len(D.opens) == 4
    assert check_refinement(S, [closed], R)


def test_sigma_refine_level1_is_noop():
    S = sierpinski()
    R = sigma_refine(S, [BorelCode(1, OpenCode.basic(0))])
    assert R.copres is S
    assert check_refinement(S, [BorelCode(1, OpenCode.basic(0))], R)


def random_code(rng, labels, level):
    if level == 1:
        gens = [frozenset(rng.sample(labels, rng.randint(0, len(labels))))
                for _ in range(rng.randint(0, 2))]
        return BorelCode(1, OpenCode(tuple(gens)))
    return BorelCode(level, [(random_code(rng, labels, rng.randint(1, level - 1)),
                              random_code(rng, labels, rng.randint(1, level - 1)))
                             for _ in range(rng.randint(1, 2))])


def test_sigma_refine_level3_opens_stay_sigma3():
    rng = random.Random(11)
    C = sierpinski_power(3)
    base = C.to_finite_space()
    for _ in range(8):
        code = random_code(rng, [0, 1, 2], 3)
        R = sigma_refine(C, [code])
        assert check_refinement(C, [code], R)
        fine = R.copres.to_finite_space()
        proj = [base.points.index(frozenset(b for b in C.indices if R.base_map[b] in p))
                for p in fine.points]
        for u in fine.opens:
            image = sum(1 << proj[k] for k in bits(u))
            assert sigma_level_membership(base, image, 3)
