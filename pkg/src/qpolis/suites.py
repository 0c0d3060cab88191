"""Acceptance suites: seeded batches of oracle comparisons with JSON reports.

Every suite is a pure function of its parameters.  Reports carry a manifest
(command, parameter digest, seed, budgets, outcome) and no timings, so equal
parameters give byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .copres.dedekind import L, R, reals_dedekind
from .copres.metric import dyadic_grid, metric_completion
from .errors import QpolisError
from .finite import all_t0_spaces, random_t0_space
from .finite.borel import eval_borel
from .finite.category import verify_bairequant_identities, verify_kuratowski_ulam
from .finite.enumerate import posets_up_to_iso
from .finite.order import irreducible_closed_sets, point_closure, sober_witness
from .finite.space import FiniteMap, all_maps
from .finite.transfer import canonical_transfer_data, pi02_transfer
from .game import (
    II_WINS,
    RandomI,
    ConstantI,
    check_history,
    check_pi02_conditions,
    extract_tree,
    normalize_strategy,
    play,
    point_independent,
    strat_finite,
    strat_open_image,
    strat_pi02,
    strat_product,
    winner_convergent,
    winner_strong,
)
from .points import (
    CANNED_REALS,
    PENDING,
    VIOLATED,
    cauchy_limit,
    check_relations,
    grid_point_stream,
    listed_stream,
    rational_cut_stream,
    real_to_stream,
    separation,
)
from .posite import (
    Posite,
    brute_force,
    check_axioms,
    closed_oracle,
    generic_point_bct,
    generic_prime_filter,
    ideal_to_open,
    is_filter,
    is_ideal,
    is_prime_filter,
    lower_cover_posite,
    mask_oracle,
    open_to_ideal,
    pfilt_matches_space,
    pfilt_topology,
    posite_from_copres,
    random_bct_instance,
    random_filter_instance,
    random_posite,
    union_equation_holds,
)
from .powerspace import check_down, check_powerspace, open_surj_embedding, powerspace

SCHEMA_VERSION = 1
MAX_COUNTEREXAMPLES = 5


@dataclass
class RunManifest:
    command: str
    params: dict
    seed: int
    digest: str = ""
    outcome: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.digest:
            self.digest = digest({"command": self.command, "params": self.params,
                                  "seed": self.seed})


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=str) + "\n"


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, default=str).encode()).hexdigest()


class Assertions:
    """Named assertions with counts and the first few counterexamples."""

    def __init__(self, criterion: int, title: str):
        self.criterion, self.title = criterion, title
        self.items = {}

    def check(self, name, ok, **counterexample):
        item = self.items.setdefault(name, {"name": name, "checked": 0, "failed": 0,
                                            "counterexamples": []})
        item["checked"] += 1
        if not ok:
            item["failed"] += 1
            if len(item["counterexamples"]) < MAX_COUNTEREXAMPLES:
                item["counterexamples"].append(counterexample)
        return ok

    @property
    def passed(self):
        return all(i["failed"] == 0 and i["checked"] > 0 for i in self.items.values())

    def to_json(self):
        return {"criterion": self.criterion, "title": self.title, "pass": self.passed,
                "assertions": [self.items[k] for k in sorted(self.items)]}


# --- posite: criteria 1-3 --------------------------------------------------


def criterion_1(seed=0, count=200, max_size=5):
    a = Assertions(1, "basic posites of finite spaces")
    rng = random.Random(seed)
    for i in range(count):
        X = random_t0_space(rng, max_size)
        B = posite_from_copres(X)
        report = check_axioms(B.posite)
        a.check("axioms", report["ok"], instance=i, space=X.to_json(),
                counterexample=report.get("counterexample"))
        a.check("union_equation", union_equation_holds(B), instance=i, space=X.to_json())
        a.check("prime_filters_are_points", pfilt_matches_space(B), instance=i,
                space=X.to_json())
    return a


def criterion_2(seed=0, count=200, max_size=8, max_covers=12):
    a = Assertions(2, "generic prime filters")
    rng = random.Random(seed)
    for i in range(count):
        P, A, W = random_filter_instance(rng, max_size, max_covers)
        g = generic_prime_filter(P, mask_oracle(A), W)
        F = g.filter_mask(P)
        where = {"instance": i, "posite": P.to_json(), "A": A, "W": W, "filter": F}
        a.check("filter", is_filter(P, F), **where)
        a.check("prime", is_prime_filter(P, F), **where)
        a.check("contains_W", (F >> W) & 1 == 1, **where)
        a.check("inside_A", F & ~A == 0, **where)
        a.check("in_brute_force_prime_filters", F in brute_force(P, is_prime_filter), **where)
    return a


def _ideal_bijection(a, P, label):
    ideals = brute_force(P, is_ideal)
    space = pfilt_topology(P)
    a.check("count", len(ideals) == len(space.opens), posite=label,
            ideals=len(ideals), opens=len(space.opens))
    images = sorted(ideal_to_open(P, i) for i in ideals)
    a.check("image_is_all_opens", images == sorted(space.opens), posite=label)
    a.check("ideal_round_trip", all(open_to_ideal(P, ideal_to_open(P, i)) == i for i in ideals),
            posite=label)
    a.check("open_round_trip", all(ideal_to_open(P, open_to_ideal(P, c)) == c
                                   for c in space.opens), posite=label)


def criterion_3(seed=0, max_size=5, random_count=100, random_max=6):
    a = Assertions(3, "ideals and opens of prime-filter spaces")
    for n in range(1, max_size + 1):
        for strict in posets_up_to_iso(n):
            label = {"n": n, "order": sorted(strict)}
            _ideal_bijection(a, Posite(tuple(range(n)), frozenset(strict), ()), label)
            _ideal_bijection(a, lower_cover_posite(n, strict), dict(label, covers="lower"))
    rng = random.Random(seed)
    for i in range(random_count):
        P = random_posite(rng, random_max)
        _ideal_bijection(a, P, {"random": i})
    return a


# --- powerspace: criteria 4 and 12 ----------------------------------------


def criterion_4(max_size=5):
    a = Assertions(4, "lower powerspace via coideals")
    for X in all_t0_spaces(max_size):
        H = powerspace(X)
        rep = check_powerspace(H)
        where = {"space": X.to_json()}
        a.check("coideals_match_closed_sets",
                rep["bijective"] and rep["coideals"] == rep["closed_sets"], **where)
        a.check("homeomorphism", rep["homeomorphism"], **where)
        down = check_down(H)
        a.check("down_irreducible_image_agree", down["agree"], **where, detail=down)
    return a


def _open_surjections(max_size):
    spaces = list(all_t0_spaces(max_size))
    for X in spaces:
        for Y in spaces:
            if Y.n > X.n:
                continue
            for f in all_maps(X, Y):
                if f.is_surjective() and f.is_continuous() and f.is_open_map():
                    yield f


def criterion_12(max_size=4):
    a = Assertions(12, "open surjections embed in the powerspace")
    for f in _open_surjections(max_size):
        rep = open_surj_embedding(f)
        where = {"source": f.source.to_json(), "target": f.target.to_json(), "graph": f.graph}
        a.check("three_conditions_equal_image", rep.equal, **where)
        a.check("star_identity", rep.star_identity, **where)
        a.check("embedding", rep.is_embedding, **where)
    return a


# --- oracle: criteria 5, 7, 8 ----------------------------------------------


def criterion_5(max_size=5):
    a = Assertions(5, "irreducible closed sets are point closures")
    for X in all_t0_spaces(max_size):
        try:
            w = sober_witness(X)
            ok = (sorted(w.values()) == list(range(X.n))
                  and all(point_closure(X, k) == F for F, k in w.items()))
        except QpolisError:
            ok = False
        a.check("bijection", ok and len(irreducible_closed_sets(X)) == X.n, space=X.to_json())
    return a


def criterion_7(max_size=4):
    a = Assertions(7, "level-2 definitions of subspaces")
    for X in all_t0_spaces(max_size):
        for Y in range(X.full + 1):
            res = pi02_transfer(X, Y, *canonical_transfer_data(X, Y))
            where = {"space": X.to_json(), "Y": Y}
            a.check("computed_equals_Y", res.computed == Y, **where, computed=res.computed)
            a.check("complement_code", X.full & ~eval_borel(X, res.complement_code) == Y, **where)
    return a


def criterion_8(max_size=4):
    a = Assertions(8, "category quantifiers and Kuratowski-Ulam")
    spaces = list(all_t0_spaces(max_size))
    for X in spaces:
        for Y in spaces:
            for f in all_maps(X, Y):
                if not (f.is_continuous() and f.is_open_map()):
                    continue
                where = {"source": X.to_json(), "target": Y.to_json(), "graph": f.graph}
                q = verify_bairequant_identities(f)
                a.check("quantifier_identities", q["ok"], **where,
                        counterexample=q.get("counterexample"))
                k = verify_kuratowski_ulam(f)
                a.check("kuratowski_ulam", k["ok"], **where,
                        counterexample=k.get("counterexample"))
    return a


# --- baire: criterion 6 ----------------------------------------------------


def _brute_nonempty(I, maxima, opens):
    for m in range(1 << len(I)):
        x = frozenset(i for i in I if (m >> i) & 1)
        if any(x <= y for y in maxima) and all(U.find(x) is not None for U in opens):
            return True
    return False


def criterion_6(seed=0, count=100, max_indices=10, max_opens=20):
    a = Assertions(6, "Baire category points")
    rng = random.Random(seed)
    for i in range(count):
        I, maxima, opens = random_bct_instance(rng, max_indices, max_opens)
        where = {"instance": i, "indices": len(I), "maxima": [sorted(x) for x in maxima]}
        try:
            x = generic_point_bct(I, closed_oracle(maxima), opens)
        except QpolisError as exc:
            a.check("built", False, **where, error=exc.code)
            continue
        a.check("in_F", any(x <= y for y in maxima), **where, x=sorted(x))
        a.check("in_every_open", all(U.find(x) is not None for U in opens), **where,
                x=sorted(x))
        a.check("brute_force_nonempty", _brute_nonempty(I, maxima, opens), **where)
    return a


# --- game: criterion 11 ----------------------------------------------------


def _win(a, name, X, h, where):
    conv, strong = winner_convergent(X, h), winner_strong(X, h)
    a.check(name, conv == II_WINS and check_history(X, h) == [], **where, verdict=conv)
    a.check("convergent_implies_strong", conv != II_WINS or strong == II_WINS, **where)


def criterion_11(seed=0, count=100, max_size=8, adversaries=5):
    a = Assertions(11, "convergent strong Choquet games")
    rng = random.Random(seed)
    for i in range(count):
        X = random_t0_space(rng, max_size)
        rounds = 3 * X.n + 4
        s = strat_finite(X)
        for k in range(adversaries):
            h = play(X, RandomI(X, rng.randrange(10**6)), s, rounds)
            _win(a, "finite_strategy_wins", X, h, {"instance": i, "adversary": k})
        for x in range(X.n):
            h = play(X, ConstantI(X, x), s, 4)
            a.check("constant_runs_reach_point", winner_convergent(X, h) == II_WINS
                    and X.min_nbhd(x) == h.V(3), instance=i, point=x)
        # products of up to three factors
        factors = [random_t0_space(rng, 2) for _ in range(rng.randint(1, 3))]
        ps = strat_product([strat_finite(F) for F in factors])
        h = play(ps.space, RandomI(ps.space, rng.randrange(10**6)), ps, 3 * ps.space.n + 4)
        _win(a, "product_wins", ps.space, h, {"instance": i})
        ms = [r["m"] for r in ps.trace(h.i_moves())]
        a.check("product_counters_increase", all(p < q for p, q in zip(ms, ms[1:])), instance=i)
        # Pi^0_2 subspaces
        opens = list(X.opens)
        rels = [(rng.choice(opens), rng.choice(opens)) for _ in range(rng.randint(0, 3))]
        ys = strat_pi02(X, rels, s)
        if ys.space.n:
            h = play(ys.space, RandomI(ys.space, rng.randrange(10**6)), ys, rounds)
            _win(a, "pi02_wins", ys.space, h, {"instance": i, "relations": rels})
            a.check("pi02_side_conditions", check_pi02_conditions(ys, h) == [], instance=i)
        # open images: projection of a product onto its first factor
        Y = random_t0_space(rng, 3)
        prod = strat_product([strat_finite(X), strat_finite(Y)])
        P = prod.P
        proj = FiniteMap(P.space, X, tuple(P.coords(k)[0] for k in range(P.space.n)))
        os_ = strat_open_image(proj, prod)
        h = play(X, RandomI(X, rng.randrange(10**6)), os_, rounds)
        _win(a, "open_image_wins", X, h, {"instance": i})
        # normalization
        if X.n <= 6:
            n = normalize_strategy(s)
            h = play(X, RandomI(X, rng.randrange(10**6)), n, rounds)
            _win(a, "normalized_wins", X, h, {"instance": i})
            a.check("normalized_plays_basis", all(h.V(k) in n.basis for k in range(h.rounds)),
                    instance=i)
            a.check("normalized_point_independent",
                    point_independent(n, h, random.Random(i)), instance=i)
        if X.n <= 4:
            T = extract_tree(normalize_strategy(s), depth=3)
            a.check("tree_map_surjective_continuous_open", all(T.checks.values()),
                    instance=i, checks=T.checks)
    return a


# --- reals and completion: criteria 9 and 10 -------------------------------


def criterion_9(seed=0, count=1000, fuel=50):
    """Random rationals p/q with |p| <= 1000 and q <= 100; consecutive pairs
    are separated within the fuel returned by ``separation``."""
    a = Assertions(9, "Dedekind reals")
    C = reals_dedekind()
    rng = random.Random(seed)
    rats = [Fraction(rng.randint(-1000, 1000), rng.randint(1, 100)) for _ in range(count)]
    streams = {}
    for r in rats:
        streams.setdefault(r, rational_cut_stream(r))
        rep = check_relations(streams[r], C, fuel)
        a.check("rational_no_violation", rep.count(VIOLATED) == 0, r=str(r))
    for name in sorted(CANNED_REALS):
        rep = check_relations(real_to_stream(CANNED_REALS[name]), C, fuel)
        a.check("irrational_no_violation", rep.count(VIOLATED) == 0, real=name)
    for r, s in zip(rats, rats[1:]):
        if r == s:
            continue
        label, budget = separation(r, s)
        inr = streams[r].depth_of(label, budget) is not None
        ins = streams[s].depth_of(label, budget) is not None
        a.check("separated_within_fuel", inr != ins, r=str(r), s=str(s), fuel=budget)
    bad = listed_stream([{L(Fraction(1, 2)), R(Fraction(1, 2))}])
    rep = check_relations(bad, C, fuel)
    flagged = {e["family"] for e in rep.entries if e["status"] == VIOLATED}
    a.check("disjointness_violation_detected", "disjoint" in flagged, flagged=sorted(flagged))
    return a


def criterion_10(fuel=50, denominator=64, n=16):
    a = Assertions(10, "metric completion of the dyadic grid")
    M = dyadic_grid(denominator)
    C = metric_completion(M)
    for i in range(denominator + 1):
        p = grid_point_stream(M, i)
        rep = check_relations(p, C, fuel)
        a.check("families_hold", rep.count(VIOLATED) == 0 and rep.count(PENDING) == 0,
                point=i, counts=rep.to_json()["counts"])
        lim = cauchy_limit(p, M, n)
        a.check("cauchy_limit_within_1_over_n", abs(lim.point - M.point(i)) <= Fraction(1, n),
                point=i, limit=str(lim.point))
    return a


# --- suites ----------------------------------------------------------------


# Each suite lists (criterion, runner) pairs; a runner takes (seed, max_size)
# and a max_size of None means the sizes stated for the criterion.
SUITES = {
    "posite": [(1, lambda seed, m: criterion_1(seed, max_size=m or 5)),
               (2, lambda seed, m: criterion_2(seed, max_size=m or 8)),
               (3, lambda seed, m: criterion_3(seed, max_size=min(m or 5, 5)))],
    "powerspace": [(4, lambda seed, m: criterion_4(m or 5)),
                   (12, lambda seed, m: criterion_12(min(m or 4, 4)))],
    "oracle": [(5, lambda seed, m: criterion_5(m or 5)),
               (7, lambda seed, m: criterion_7(min(m or 4, 4))),
               (8, lambda seed, m: criterion_8(min(m or 4, 4)))],
    "baire": [(6, lambda seed, m: criterion_6(seed, max_indices=m or 10))],
    "game": [(11, lambda seed, m: criterion_11(seed, max_size=m or 8))],
    "reals": [(9, lambda seed, m: criterion_9(seed))],
    "completion": [(10, lambda seed, m: criterion_10())],
}

CRITERIA = {k: (name, runner) for name, entries in SUITES.items() for k, runner in entries}


def suite_report(name: str, seed: int, max_size, results) -> dict:
    """Report for already computed criterion results, in suite order."""
    results = [r.to_json() if isinstance(r, Assertions) else r for r in results]
    ok = all(r["pass"] for r in results)
    manifest = RunManifest(f"verify {name}", {"max_size": max_size}, seed,
                           outcome={"pass": ok,
                                    "criteria": {str(r["criterion"]): r["pass"]
                                                 for r in results}})
    return {"schema": SCHEMA_VERSION, "suite": name, "pass": ok, "criteria": results,
            "manifest": asdict(manifest)}


def run_suite(name: str, seed: int = 0, max_size: int | None = None) -> dict:
    if name not in SUITES:
        raise QpolisError("UNKNOWN_SUITE", f"unknown suite {name!r}",
                          known=sorted(SUITES))
    return suite_report(name, seed, max_size,
                        [runner(seed, max_size) for _, runner in SUITES[name]])
