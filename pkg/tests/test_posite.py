import random

import pytest
from hypothesis import given, settings, strategies as st

from qpolis import QpolisError
from qpolis.copres import OpenCode
from qpolis.finite import FiniteSpace, all_t0_spaces, random_t0_space, sierpinski
from qpolis.finite.enumerate import posets_up_to_iso
from qpolis.finite.space import bits
from qpolis.posite import (
    Posite,
    brute_force,
    check_axioms,
    closed_oracle,
    coidl_space,
    filt_space,
    from_order,
    generic_point_bct,
    generic_prime_filter,
    ideal_to_open,
    is_coideal,
    is_filter,
    is_ideal,
    is_prime_filter,
    is_upset,
    lower_cover_posite,
    mask_oracle,
    open_to_ideal,
    pfilt_matches_space,
    pfilt_space,
    pfilt_topology,
    posite_from_copres,
    random_bct_instance,
    random_filter_instance,
    random_posite,
    to_mask,
    union_equation_holds,
    upset_space,
)


def vee():
    return from_order(["top", "a", "b"], [("a", "top"), ("b", "top")],
                      [(["a", "b"], "top"), (["a"], "a"), (["b"], "b")])


def denoted_masks(C):
    return sorted(to_mask(p) for p in C.denote())


# --- axioms ---------------------------------------------------------------


def test_vee_passes_axioms():
    assert check_axioms(vee())["ok"]


def test_pcpl_failure():
    P = from_order(["top", "a", "b"], [("a", "top")], [(["b"], "a")])
    report = check_axioms(P)
    assert not report["ok"] and report["counterexample"]["clause"] == "pcpl"


def test_stability_failure():
    def bad_witness(P, c, u2):
        return c, {v: v for v in bits(P.covers[c][0])}
    P = vee()
    P = Posite(P.carrier, P.leq, P.covers, bad_witness)
    report = check_axioms(P)
    assert not report["ok"] and report["counterexample"]["clause"] == "stability"


# --- spaces ---------------------------------------------------------------


def test_chain_without_covers():
    P = from_order(["top", "a"], [("a", "top")], [])
    assert denoted_masks(pfilt_space(P)) == [0b01, 0b11]


def test_vee_prime_filters():
    P = vee()
    assert denoted_masks(pfilt_space(P)) == [0b011, 0b101]


def test_empty_carrier_has_no_filters():
    P = Posite((), frozenset(), ())
    assert filt_space(P).denote() == []
    assert upset_space(P).denote() == [frozenset()]


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_spaces_match_set_definitions(seed):
    P = random_posite(random.Random(seed), max_elements=6)
    assert denoted_masks(upset_space(P)) == brute_force(P, is_upset)
    assert denoted_masks(filt_space(P)) == brute_force(P, is_filter)
    assert denoted_masks(coidl_space(P)) == brute_force(P, is_coideal)
    pf = denoted_masks(pfilt_space(P))
    assert pf == brute_force(P, is_prime_filter)
    assert set(pf) == set(denoted_masks(filt_space(P))) & set(denoted_masks(coidl_space(P)))


# --- posites from spaces --------------------------------------------------


def test_sierpinski_basic_posite():
    B = posite_from_copres(sierpinski(), basis=[0b00, 0b10, 0b11])
    assert check_axioms(B.posite)["ok"]
    assert union_equation_holds(B) and pfilt_matches_space(B)


def test_posite_from_given_image_data():
    X = FiniteSpace([frozenset(), frozenset({1}), frozenset({0, 1})], [0b100, 0b110])
    basis = [0b100, 0b110, 0b111]
    data = [(frozenset({0}), [frozenset({1})]), (frozenset(), [frozenset({2})])]
    B = posite_from_copres(X, basis=basis, image_data=data)
    assert check_axioms(B.posite)["ok"] and union_equation_holds(B) and pfilt_matches_space(B)


def test_not_a_basis():
    X = FiniteSpace(["a", "b"], [0b01, 0b10])
    with pytest.raises(QpolisError) as exc:
        posite_from_copres(X, basis=[0b11, 0b01])
    assert exc.value.code == "NOT_A_BASIS"


def test_basic_posites_for_all_small_spaces():
    for X in all_t0_spaces(4):
        B = posite_from_copres(X)
        assert check_axioms(B.posite)["ok"]
        assert union_equation_holds(B) and pfilt_matches_space(B)
        if X.n <= 3:
            everything = posite_from_copres(X, basis=list(X.opens))
            assert union_equation_holds(everything) and pfilt_matches_space(everything)


# --- generic prime filters ------------------------------------------------


def test_generic_filter_on_vee():
    P = vee()
    g = generic_prime_filter(P, mask_oracle(P.full), 0)
    assert g.filter_mask(P) == 0b011
    assert g.filter_mask(P) in brute_force(P, is_prime_filter)


def test_generic_filter_without_covers_is_principal():
    P = from_order(["top", "a"], [("a", "top")], [])
    for w in range(2):
        assert generic_prime_filter(P, mask_oracle(P.full), w).filter_mask(P) == P.up(w)


def test_generic_filter_random_instances():
    rng = random.Random(21)
    for _ in range(100):
        P, A, W = random_filter_instance(rng)
        g = generic_prime_filter(P, mask_oracle(A), W)
        X = g.filter_mask(P)
        assert is_prime_filter(P, X) and (X >> W) & 1 and X & ~A == 0
        s = g.stream(P)
        assert to_mask(s.observed(len(g.pivots))) == X


def test_fair_round_robin_schedule():
    rng = random.Random(3)
    P, A, W = random_filter_instance(rng)
    g = generic_prime_filter(P, mask_oracle(A), W)
    m = len(P.covers)
    assert all(c == k % m for k, c in enumerate(g.visits))


def test_oracle_breach():
    P = vee()
    with pytest.raises(QpolisError) as exc:
        generic_prime_filter(P, mask_oracle(0b001), 0)
    assert exc.value.code == "ORACLE_BREACH"


# --- ideals and opens -----------------------------------------------------


def check_ideal_bijection(P):
    ideals = brute_force(P, lambda P, m: is_ideal(P, m))
    space = pfilt_topology(P)
    assert len(ideals) == len(space.opens)
    assert sorted(ideal_to_open(P, a) for a in ideals) == sorted(space.opens)
    for a in ideals:
        assert open_to_ideal(P, ideal_to_open(P, a)) == a
    for c in space.opens:
        assert ideal_to_open(P, open_to_ideal(P, c)) == c


def test_ideals_and_opens_vee():
    P = vee()
    assert ideal_to_open(P, 0) == 0
    assert ideal_to_open(P, P.full) == pfilt_topology(P).full
    check_ideal_bijection(P)


def test_ideals_and_opens_generated_posites():
    for n in range(1, 5):
        for strict in posets_up_to_iso(n):
            check_ideal_bijection(Posite(tuple(range(n)), frozenset(strict), ()))
            check_ideal_bijection(lower_cover_posite(n, strict))


def test_ideal_errors():
    P = vee()
    with pytest.raises(QpolisError):
        ideal_to_open(P, 0b001)      # top without a and b is not downward closed
    with pytest.raises(QpolisError):
        open_to_ideal(P, 0b11 + 4)


# --- Baire category point builder -----------------------------------------


def test_bct_whole_space():
    x = generic_point_bct([0, 1], lambda s: True, [OpenCode.basic(0)])
    assert 0 in x


def test_bct_closure_of_a_point():
    F = closed_oracle([frozenset({1})])
    assert generic_point_bct([0, 1], F, [OpenCode((frozenset({0}), frozenset({1})))]) == {1}


def test_bct_density_failure():
    F = closed_oracle([frozenset({1})])
    with pytest.raises(QpolisError) as exc:
        generic_point_bct([0, 1], F, [OpenCode.basic(1), OpenCode.basic(0)])
    assert exc.value.code == "DENSITY_FAILURE" and exc.value.details["n"] == 1


def test_bct_random_instances_against_brute_force():
    rng = random.Random(8)
    for _ in range(50):
        I, maxima, opens = random_bct_instance(rng)
        x = generic_point_bct(I, closed_oracle(maxima), opens)
        assert any(x <= m for m in maxima)
        assert all(U.find(x) is not None for U in opens)
