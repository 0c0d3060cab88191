"""The real line as Dedekind cuts: indices ("L", q) and ("R", q) for rational q.

A point is a pair of sets of rationals (lower, upper); ("L", q) is observed
when q lies in the lower set.  Relation families, each enumerated over the
fixed rational enumeration (pairs through the diagonal pairing):

    nonempty        T => some L_q        T => some R_q
    lower_closed    L_q => L_p  (p < q)
    upper_closed    R_p => R_q  (p < q)
    rounded_L       L_p => some L_q, q > p
    rounded_R       R_p => some R_q, q < p
    disjoint        L_p and R_p => false
    located         T => L_p or R_q  (p < q)
"""

from __future__ import annotations

from fractions import Fraction

from ..rationals import positive_rational, rational, rational_index, unpair
from .codes import EMPTY, TOP, CountableIndex, Copresentation, EnumOpenCode, OpenCode, \
    Pi02Relation, RelationFamily


def L(q):
    return ("L", Fraction(q))


def R(q):
    return ("R", Fraction(q))


def _index_item(k):
    side = "L" if k % 2 == 0 else "R"
    return (side, rational(k // 2))


def _contains(label):
    return (isinstance(label, tuple) and len(label) == 2 and label[0] in ("L", "R")
            and isinstance(label[1], Fraction))


def label_index(label) -> int:
    """Position of a label in the index enumeration."""
    return 2 * rational_index(label[1]) + (label[0] == "R")


DEDEKIND_INDEX = CountableIndex("dedekind", _index_item, _contains)


def _order(label):
    """Sort key agreeing with ``label_index`` without growing the table."""
    q = label[1]
    return abs(q.numerator) + q.denominator, q, label[0] == "R"


def _first(observed, side, test):
    hits = [l for l in observed if _contains(l) and l[0] == side and test(l[1])]
    return frozenset({min(hits, key=_order)}) if hits else None


def _some(side, name, test_of=None, shift=None):
    """Enumerated union of basic opens on one side, optionally relative to p."""
    if shift is None:
        return EnumOpenCode(name, lambda k: frozenset({(side, rational(k))}),
                            lambda obs: _first(obs, side, lambda q: True))
    return EnumOpenCode(name, lambda k: frozenset({(side, shift(positive_rational(k)))}),
                        lambda obs: _first(obs, side, test_of), ())


def _nonempty():
    return RelationFamily.of("nonempty", [
        Pi02Relation(TOP, _some("L", "some_L")),
        Pi02Relation(TOP, _some("R", "some_R")),
    ])


def _ordered_pairs(fn):
    def item(k):
        i, j = unpair(k)
        p, q = rational(i), rational(j)
        return fn(p, q) if p < q else None
    return item


def _rounded(side):
    def item(k):
        p = rational(k)
        if side == "L":
            code = _some("L", f"L_above({p})", lambda q: q > p, lambda e: p + e)
        else:
            code = _some("R", f"R_below({p})", lambda q: q < p, lambda e: p - e)
        return Pi02Relation(OpenCode.basic((side, p)), code)
    return RelationFamily(f"rounded_{side}", None, item, {"name": f"rounded_{side}"})


def reals_dedekind() -> Copresentation:
    fams = (
        _nonempty(),
        RelationFamily("lower_closed", None,
                       _ordered_pairs(lambda p, q: Pi02Relation(OpenCode.basic(L(q)),
                                                                OpenCode.basic(L(p)))),
                       {"name": "lower_closed"}),
        RelationFamily("upper_closed", None,
                       _ordered_pairs(lambda p, q: Pi02Relation(OpenCode.basic(R(p)),
                                                                OpenCode.basic(R(q)))),
                       {"name": "upper_closed"}),
        _rounded("L"),
        _rounded("R"),
        RelationFamily("disjoint", None,
                       lambda k: Pi02Relation(OpenCode.basic(L(rational(k)), R(rational(k))), EMPTY),
                       {"name": "disjoint"}),
        RelationFamily("located", None,
                       _ordered_pairs(lambda p, q: Pi02Relation(
                           TOP, OpenCode((frozenset({L(p)}), frozenset({R(q)}))))),
                       {"name": "located"}),
    )
    return Copresentation(DEDEKIND_INDEX, fams, ("reals_dedekind",))
