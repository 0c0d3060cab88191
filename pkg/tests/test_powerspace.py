import pytest

from qpolis import QpolisError
from qpolis.finite import FiniteMap, FiniteSpace, all_maps, all_t0_spaces, discrete, sierpinski
from qpolis.finite.space import chain
from qpolis.powerspace import (
    check_down,
    check_powerspace,
    essential_check_via_powerspace,
    open_surj_embedding,
    openmap_fiber_closure_check,
    powerspace,
)

POINT = FiniteSpace(["*"], [])


def projection():
    S = sierpinski()
    P = S.product(S)
    return FiniteMap(P, S, tuple(k // 2 for k in range(4)))


@pytest.mark.parametrize("X, count", [(sierpinski(), 3), (POINT, 2), (discrete(2), 4)])
def test_coideals_match_closed_sets(X, count):
    report = check_powerspace(powerspace(X))
    assert report["closed_sets"] == report["coideals"] == count
    assert report["bijective"] and report["homeomorphism"]


def test_down_sierpinski():
    report = check_down(powerspace(sierpinski()))
    assert report["denoted"] == [0b01, 0b11] and report["agree"]
    assert check_down(powerspace(POINT))["denoted"] == [1]


def test_powerspace_and_down_all_spaces_up_to_4():
    for X in all_t0_spaces(4):
        H = powerspace(X)
        report = check_powerspace(H)
        assert report["bijective"] and report["homeomorphism"]
        assert check_down(H)["agree"]


def test_essential_checks_agree():
    assert essential_check_via_powerspace(projection())["agree"]
    assert essential_check_via_powerspace(FiniteMap.identity(chain(3)))["essential"]
    spaces = list(all_t0_spaces(3))
    for X in spaces:
        for Y in spaces:
            for f in all_maps(X, Y):
                if f.is_continuous():
                    report = essential_check_via_powerspace(f)
                    assert report["agree"] and report["essential"]


def test_fibre_closure_for_open_maps():
    assert openmap_fiber_closure_check(projection())["ok"]
    assert openmap_fiber_closure_check(FiniteMap.identity(sierpinski()))["ok"]


def test_fibre_closure_fails_for_a_non_open_map():
    f = FiniteMap(POINT, sierpinski(), (0,))
    with pytest.raises(QpolisError) as exc:
        openmap_fiber_closure_check(f)
    assert exc.value.code == "NOT_OPEN_MAP"
    report = openmap_fiber_closure_check(f, override=True)
    assert not report["ok"] and report["failures"][0]["y"] == 1


def test_open_surjection_embedding_examples():
    ident = open_surj_embedding(FiniteMap.identity(sierpinski()))
    assert ident.equal and ident.is_embedding and ident.star_identity
    assert list(ident.three_condition) == [0b01, 0b11]
    proj = open_surj_embedding(projection())
    assert proj.equal and proj.star_identity


def test_open_surjection_errors():
    S = sierpinski()
    with pytest.raises(QpolisError) as exc:
        open_surj_embedding(FiniteMap(POINT, S, (0,)))
    assert exc.value.code == "NOT_OPEN_MAP"
    with pytest.raises(QpolisError) as exc:
        open_surj_embedding(FiniteMap(POINT, discrete(2), (0,)))
    assert exc.value.code == "NOT_SURJECTIVE"


def test_open_surjections_up_to_3_points():
    spaces = list(all_t0_spaces(3))
    count = 0
    for X in spaces:
        for Y in spaces:
            for f in all_maps(X, Y):
                if f.is_continuous() and f.is_open_map() and f.is_surjective():
                    report = open_surj_embedding(f)
                    assert report.equal and report.star_identity and report.is_embedding
                    count += 1
    assert count > 10
