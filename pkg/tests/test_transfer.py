import pytest

from qpolis import QpolisError
from qpolis.finite import FiniteSpace, all_t0_spaces, canonical_transfer_data, pi02_transfer, sierpinski
from qpolis.finite.borel import eval_borel
from qpolis.finite.transfer import finite_pi02_definition, solutions


def test_finite_pi02_definition_round_trip():
    pts = [frozenset(), frozenset({0}), frozenset({0, 1})]
    rels = finite_pi02_definition([0, 1], pts)
    assert sorted(solutions([0, 1], rels), key=sorted) == sorted(pts, key=sorted)


def test_whole_space():
    X = FiniteSpace(["a", "b", "c"], [0b001, 0b011])
    res = pi02_transfer(X, X.full, *canonical_transfer_data(X, X.full))
    assert res.computed == X.full


def test_point_one_in_sierpinski():
    S = sierpinski()
    rels = [((frozenset(),), (frozenset({0}),))]
    res = pi02_transfer(S, 0b10, [0], {1: frozenset({0})}, rels, {0: 0b10}, [0b10])
    assert res.computed == 0b10
    assert res.A == 0b10
    assert S.full & ~eval_borel(S, res.complement_code) == 0b10


def test_all_subspaces_up_to_4_points():
    for X in all_t0_spaces(4):
        for Y in range(X.full + 1):
            res = pi02_transfer(X, Y, *canonical_transfer_data(X, Y))
            assert res.computed == Y
            assert X.full & ~eval_borel(X, res.complement_code) == Y


def test_wrong_relations_rejected():
    S = sierpinski()
    with pytest.raises(QpolisError) as exc:
        pi02_transfer(S, 0b10, [0], {1: frozenset({0})}, [], {0: 0b10}, [0b10])
    assert exc.value.code == "NOT_EMBEDDING"
