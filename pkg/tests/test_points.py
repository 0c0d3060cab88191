import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from qpolis import QpolisError
from qpolis.copres import OpenCode, Pi02Relation, from_finite_space, pi02_subspace, sierpinski_power
from qpolis.copres.dedekind import L, R, reals_dedekind
from qpolis.copres.metric import MetricData, dyadic_grid, metric_completion
from qpolis.finite import random_t0_space
from qpolis.points import (
    CANNED_REALS,
    PENDING,
    SATISFIED,
    VIOLATED,
    PointStream,
    baire_to_spower,
    cauchy_limit,
    check_relations,
    constant_stream,
    cylinder_image,
    grid_point_stream,
    in_basic,
    listed_stream,
    metric_point_stream,
    rational_cut_stream,
    real_to_stream,
    separation,
)
from qpolis.rationals import pair, unpair

REALS = reals_dedekind()


# --- basics ---------------------------------------------------------------


def test_in_basic():
    s0 = constant_stream({0})
    assert in_basic(s0, set(), 10) == 0
    assert in_basic(s0, {0}, 10) == 0
    evens = PointStream(lambda d: frozenset({2 * d}))
    assert all(in_basic(evens, {1}, fuel) is None for fuel in (0, 5, 50))
    assert in_basic(evens, {6}, 10) == 3


@given(st.integers(0, 10**6), st.integers(0, 40), st.integers(0, 40))
@settings(max_examples=40, deadline=None)
def test_builtin_streams_are_monotone(seed, d1, d2):
    lo, hi = sorted((d1, d2))
    rng = random.Random(seed)
    r = Fraction(rng.randint(-100, 100), rng.randint(1, 50))
    M = dyadic_grid(16)
    streams = [
        rational_cut_stream(r),
        real_to_stream(CANNED_REALS[rng.choice(sorted(CANNED_REALS))]),
        baire_to_spower(lambda k: (seed >> (k % 20)) & 1),
        grid_point_stream(M, rng.randint(0, 16)),
    ]
    for p in streams:
        assert p.observed(lo) <= p.observed(hi)


# --- relation checking ----------------------------------------------------


def test_disjointness_violation():
    bad = listed_stream([{L(Fraction(1, 2)), R(Fraction(1, 2))}])
    report = check_relations(bad, REALS, 50)
    assert report.violated
    assert {e["family"] for e in report.entries if e["status"] == VIOLATED} == {"disjoint"}


def test_roundedness_pending():
    only = constant_stream({L(Fraction(1, 2))})
    report = check_relations(only, REALS, 50)
    rounded = [e for e in report.entries if e["family"] == "rounded_L" and e["status"] == PENDING]
    assert rounded and not report.violated
    later = listed_stream([{L(Fraction(1, 2))}, {L(Fraction(1))}])
    assert check_relations(later, REALS, 0).count(PENDING) > 0


def test_rational_cut_streams_satisfy_everything():
    rng = random.Random(2)
    for _ in range(40):
        r = Fraction(rng.randint(-1000, 1000), rng.randint(1, 1000))
        report = check_relations(rational_cut_stream(r), REALS, 50)
        assert report.count(VIOLATED) == 0
        assert report.count(PENDING) == 0


def test_rational_cut_emits_exact_cut():
    p = rational_cut_stream(Fraction(1, 2))
    for label in p.observed(60):
        side, q = label
        assert (q < Fraction(1, 2)) if side == "L" else (q > Fraction(1, 2))
    assert L(Fraction(1, 2)) not in p.observed(200) and R(Fraction(1, 2)) not in p.observed(200)


def below(name, q):
    """Interval-arithmetic oracle: is q below the named constant?"""
    mpmath.mp.dps = 80
    value = {"sqrt2": mpmath.sqrt(2), "golden": (1 + mpmath.sqrt(5)) / 2, "e": mpmath.e,
             "pi": mpmath.pi, "one_third": mpmath.mpf(1) / 3}[name]
    return mpmath.mpf(q.numerator) / q.denominator < value


@pytest.mark.parametrize("name", sorted(CANNED_REALS))
def test_real_streams_are_the_right_cut(name):
    p = real_to_stream(CANNED_REALS[name])
    report = check_relations(p, REALS, 50)
    assert report.count(VIOLATED) == 0
    for side, q in p.observed(50):
        assert below(name, q) == (side == "L")


def test_newton_sqrt2_contract():
    for n in (1, 10, 1000, 2**40):
        a = CANNED_REALS["sqrt2"](n)
        assert abs(a * a - 2) <= Fraction(4, n) and a >= 0


def test_separation_of_distinct_rationals():
    rng = random.Random(5)
    for _ in range(100):
        r = Fraction(rng.randint(-50, 50), rng.randint(1, 20))
        s = Fraction(rng.randint(-50, 50), rng.randint(1, 20))
        if r == s:
            continue
        label, fuel = separation(r, s)
        assert (label in rational_cut_stream(r).observed(fuel)) != \
            (label in rational_cut_stream(s).observed(fuel))


def test_check_agrees_with_brute_force_on_finite_copresentations():
    rng = random.Random(9)
    for _ in range(30):
        X = random_t0_space(rng, 4)
        C = from_finite_space(X)
        members = set(C.denote())
        for mask in range(1 << len(C.indices)):
            x = frozenset(l for k, l in enumerate(C.indices) if (mask >> k) & 1)
            report = check_relations(constant_stream(x), C, 5)
            # all consequents of a finite definition are finite codes; a pending
            # relation on a constant stream is a genuine failure
            ok = report.count(VIOLATED) == 0 and report.count(PENDING) == 0
            assert ok == (x in members)


# --- Baire space ----------------------------------------------------------


def test_baire_zero_stream_observes_nothing():
    p = baire_to_spower(lambda k: 0)
    assert p.observed(500) == frozenset()


def test_baire_single_substream():
    p = baire_to_spower(lambda k: 1 if unpair(k)[0] == 3 else 0)
    assert p.observed(200) == frozenset({3})
    assert in_basic(p, {3}, 200) == pair(3, 0)


def test_baire_cylinder_images_match_brute_force():
    for k in range(0, 7):
        for m in (1, 2, 3):
            # last position needed so that every substream below m has an entry past k
            ends = [next(pair(i, j) for j in range(100) if pair(i, j) >= k) for i in range(m)]
            length = max(ends + [k - 1]) + 1
            for prefix_mask in range(1 << k):
                prefix = [(prefix_mask >> b) & 1 for b in range(k)]
                seen = set()
                for ext in range(1 << (length - k)):
                    q = prefix + [(ext >> b) & 1 for b in range(length - k)]
                    p = baire_to_spower(lambda t, q=q: q[t] if t < len(q) else 0)
                    seen.add(frozenset(i for i in p.observed(length) if i < m))
                assert seen == cylinder_image(prefix, m)


# --- metric completion ----------------------------------------------------


def test_grid_streams_pass_all_families():
    M = dyadic_grid(16)
    C = metric_completion(M)
    for i in (0, 5, 16):
        report = check_relations(grid_point_stream(M, i), C, 50)
        assert report.count(VIOLATED) == 0 and report.count(PENDING) == 0


def test_one_third_on_the_grid_is_never_violated():
    M = dyadic_grid(64)
    C = metric_completion(M)
    p = metric_point_stream(M, lambda a: abs(M.point(a) - Fraction(1, 3)))
    assert check_relations(p, C, 50).count(VIOLATED) == 0


def test_formal_inclusion_transfers_membership():
    M = dyadic_grid(16)
    rng = random.Random(4)
    for _ in range(200):
        a, b, x = (rng.randint(0, 16) for _ in range(3))
        s = Fraction(rng.randint(1, 16), 16)
        n = rng.randint(1, 8)
        r = M.d(a, b) + s + Fraction(1, n)
        if M.d(b, x) < s:
            assert M.d(a, x) < r


def test_cauchy_limit():
    M = dyadic_grid(64)
    lim = cauchy_limit(grid_point_stream(M, 16), M, 8)
    assert abs(lim.point - Fraction(1, 4)) <= Fraction(1, 8)
    single = MetricData.finite([Fraction(0)], lambda a, b: abs(a - b))
    assert cauchy_limit(grid_point_stream(single, 0), single, 3).point == 0
    with pytest.raises(QpolisError) as exc:
        cauchy_limit(constant_stream({("B", 0, Fraction(1))}), M, 8, fuel=20)
    assert exc.value.code == "INSUFFICIENT_OBSERVATIONS"


def test_single_point_completion():
    single = MetricData.finite([Fraction(0)], lambda a, b: abs(a - b))
    C = metric_completion(single)
    report = check_relations(grid_point_stream(single, 0), C, 40)
    assert report.count(VIOLATED) == 0 and report.count(PENDING) == 0


def test_metric_violation_detected():
    with pytest.raises(QpolisError) as exc:
        metric_completion(MetricData.finite([0, 1, 2], lambda a, b: (a - b) ** 2))
    assert exc.value.code == "METRIC_VIOLATION"
