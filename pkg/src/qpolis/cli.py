"""Command-line entry point: ``qpolis <command> ...``.

JSON goes to stdout and diagnostics to stderr.  Exit status is 0 on success,
1 when a checked property fails and 2 on usage or schema errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .copres import from_finite_space
from .copres.dedekind import L, R
from .copres.io import builtin, copres_from_json, copres_to_json, label_json
from .copres.oracle import is_homeomorphism
from .errors import QpolisError
from .finite.space import FiniteMap, FiniteSpace
from .suites import SUITES, RunManifest, canonical_json, digest, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FORMATS = ("finite-space", "copresentation", "posite")
DEMOS = ("dedekind", "generic-filter", "powerspace", "choquet")


# --- input helpers --------------------------------------------------------


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise QpolisError("SCHEMA_ERROR", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise QpolisError("SCHEMA_ERROR", f"{path} is not valid JSON: {exc.msg}",
                          line=exc.lineno) from exc


def read_space(path) -> FiniteSpace:
    return FiniteSpace.from_json(read_json(path))


def read_map(path, source: FiniteSpace) -> FiniteMap:
    """Map file: ``{"target": <finite space>, "graph": {point: point}}``; without
    a target the map goes into the source space."""
    data = read_json(path)
    if not isinstance(data, dict) or "graph" not in data:
        raise QpolisError("SCHEMA_ERROR", "map JSON needs a graph")
    target = FiniteSpace.from_json(data["target"]) if "target" in data else source
    graph = {_point_key(k): _point_key(v) for k, v in data["graph"].items()}
    by_name = {str(label_json(p)): p for p in source.points}
    by_target = {str(label_json(p)): p for p in target.points}
    mapping = {by_name.get(str(k), k): by_target.get(str(v), v) for k, v in graph.items()}
    return FiniteMap.from_dict(source, target, mapping)


def _point_key(p):
    return tuple(_point_key(q) for q in p) if isinstance(p, list) else p


def subset_mask(X: FiniteSpace, names) -> int:
    wanted = {str(label_json(_point_key(n))) for n in names}
    m = 0
    for k, p in enumerate(X.points):
        if str(label_json(p)) in wanted:
            m |= 1 << k
    return m


def emit(obj, out=None):
    text = canonical_json(obj)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def manifest(command, params, seed=0, outcome=None):
    m = RunManifest(command, params, seed, outcome=outcome or {})
    return {"command": m.command, "params": m.params, "seed": m.seed, "digest": m.digest,
            "outcome": m.outcome}


def file_digest(path):
    return digest(read_json(path)) if path else None


def small_subbasis(X: FiniteSpace):
    """Distinct minimal neighbourhoods other than the whole space."""
    return sorted(set(X.min_nbhds()) - {X.full})


def round_trip(X: FiniteSpace, C) -> bool:
    """The denotation of C is homeomorphic to X through the membership map."""
    D = C.to_finite_space()
    subbasis = small_subbasis(X)
    image = [frozenset(i for i, u in enumerate(subbasis) if (u >> k) & 1) for k in range(X.n)]
    if sorted(D.points, key=sorted) != sorted(image, key=sorted):
        return False
    return is_homeomorphism(D, X, [image.index(p) for p in D.points])


# --- verify ----------------------------------------------------------------


def cmd_verify(args):
    report = run_suite(args.suite, args.seed, args.max_size)
    emit(report, args.output)
    return EXIT_OK if report["pass"] else EXIT_FAIL


# --- convert ---------------------------------------------------------------


def cmd_convert(args):
    if args.source not in FORMATS or args.target not in FORMATS:
        raise QpolisError("SCHEMA_ERROR", f"formats are {', '.join(FORMATS)}")
    if args.source != "finite-space" or args.target == "finite-space":
        raise QpolisError("UNSUPPORTED_CONVERSION",
                          f"no conversion from {args.source} to {args.target}")
    X = read_space(args.input)
    params = {"from": args.source, "to": args.target, "input": file_digest(args.input)}
    if args.target == "copresentation":
        C = from_finite_space(X, small_subbasis(X), method="transfer")
        ok = round_trip(X, C)
        out = {"copresentation": copres_to_json(C), "round_trip": ok}
    else:
        from .posite import check_axioms, posite_from_copres
        B = posite_from_copres(X)
        ok = check_axioms(B.posite)["ok"]
        out = {"posite": B.posite.to_json(), "axioms": ok}
    out["manifest"] = manifest("convert", params, outcome={"pass": ok})
    emit(out, args.output)
    return EXIT_OK if ok else EXIT_FAIL


# --- demos -----------------------------------------------------------------


def demo_dedekind(say):
    from .copres.dedekind import reals_dedekind
    from .points import CANNED_REALS, PENDING, SATISFIED, VIOLATED, check_relations, \
        listed_stream, real_to_stream, separation
    say("Reals as a copresented space: indices L_q and R_q for rationals q,")
    say("relations making the observed L's a rounded lower cut and R's an upper cut.")
    C = reals_dedekind()
    p = real_to_stream(CANNED_REALS["sqrt2"], "sqrt2")
    report = check_relations(p, C, 50)
    say(f"sqrt(2) stream checked to fuel 50: {report.count(SATISFIED)} satisfied, "
        f"{report.count(PENDING)} pending, {report.count(VIOLATED)} violated.")
    shown = sorted(p.observed(3), key=lambda l: (l[1], l[0]))
    say("first observations: " + ", ".join(f"{s}_{q}" for s, q in shown[:8]))
    label, fuel = separation(Fraction(1, 3), Fraction(1, 2))
    say(f"1/3 and 1/2 are told apart by {label[0]}_{label[1]} within fuel {fuel}.")
    bad = listed_stream([{L(Fraction(1, 2)), R(Fraction(1, 2))}])
    fams = sorted({e["family"] for e in check_relations(bad, C, 10).entries
                   if e["status"] == VIOLATED})
    say(f"a stream claiming both L_1/2 and R_1/2 violates: {', '.join(fams)}.")
    return report.count(VIOLATED) == 0 and "disjoint" in fams


def demo_generic_filter(say):
    from .posite import check_axioms, from_order, generic_prime_filter, is_prime_filter, \
        mask_oracle, pfilt_points
    say("Enough points: in a posite every element W of a coideal A lies in a")
    say("prime filter inside A.  Posite: top covered by {a, b}, a and b below top.")
    P = from_order(["top", "a", "b"], [("a", "top"), ("b", "top")],
                   [(["a", "b"], "top"), (["a"], "a"), (["b"], "b")])
    say(f"axioms hold: {check_axioms(P)['ok']}")
    for A, W in ((0b011, 0), (0b101, 0), (0b111, 2)):
        g = generic_prime_filter(P, mask_oracle(A), W)
        F = g.filter_mask(P)
        names = lambda m: "{" + ", ".join(P.carrier[i] for i in range(P.n) if (m >> i) & 1) + "}"
        say(f"A = {names(A)}, W = {P.carrier[W]}: pivots "
            f"{' -> '.join(P.carrier[v] for v in g.pivots)}, filter {names(F)}, "
            f"prime: {is_prime_filter(P, F)}")
    say(f"all prime filters by brute force: {len(pfilt_points(P))}")
    return True


def demo_powerspace(say):
    from .finite.space import sierpinski
    from .powerspace import check_down, check_powerspace, powerspace
    say("Lower powerspace: closed sets F correspond to coideals {U basic : F meets U}.")
    X = sierpinski()
    H = powerspace(X)
    for F in X.closed_sets():
        c = H.closed_to_coideal(F)
        say(f"closed {X.names(F)} <-> coideal over basis positions {[i for i in range(len(H.basis)) if (c >> i) & 1]}")
    rep = check_powerspace(H)
    say(f"bijective: {rep['bijective']}, homeomorphism onto the lower powerspace: "
        f"{rep['homeomorphism']}")
    down = check_down(H)
    say(f"point closures = irreducible closed sets = denotation of the down relations: "
        f"{down['agree']}")
    return rep["bijective"] and rep["homeomorphism"] and down["agree"]


def demo_choquet(say):
    from .finite.space import sierpinski
    from .game import ScriptedI, extract_tree, limit_point, normalize_strategy, play, \
        strat_finite, strat_product, winner_convergent
    say("Convergent strong Choquet game on Sierpinski space {0, 1} with {1} open.")
    X = sierpinski()
    h = play(X, ScriptedI(X, [0, 0, 1]), strat_finite(X), 5)
    for k in range(h.rounds):
        say(f"round {k}: I plays ({X.names(h.U(k))}, {X.points[h.x(k)]}), "
            f"II answers {X.names(h.V(k))}")
    verdict = winner_convergent(X, h)
    say(f"verdict: {verdict}, limit point {X.points[limit_point(X, h)]}")
    s = strat_product([strat_finite(X), strat_finite(X)])
    h2 = play(s.space, ScriptedI(s.space, [0, 3]), s, 4)
    say(f"product strategy on S x S: {winner_convergent(s.space, h2)}, counters "
        f"{[r['m'] for r in s.trace(h2.i_moves())]}")
    T = extract_tree(normalize_strategy(strat_finite(X)), depth=3)
    say(f"tree of normalized runs to depth 3: {len(T.nodes)} nodes, checks {T.checks}")
    return verdict == "II-wins" and all(T.checks.values())


def cmd_demo(args):
    demos = {"dedekind": demo_dedekind, "generic-filter": demo_generic_filter,
             "powerspace": demo_powerspace, "choquet": demo_choquet}
    if args.name not in demos:
        raise QpolisError("UNKNOWN_DEMO", f"unknown demo {args.name!r}", known=list(DEMOS))
    ok = demos[args.name](lambda line: print(line))
    return EXIT_OK if ok else EXIT_FAIL


# --- module subcommands ----------------------------------------------------


def cmd_oracle(args):
    from .finite.category import verify_bairequant_identities, verify_kuratowski_ulam
    from .finite.order import irreducible_closed_sets, is_essential, sober_witness
    X = read_space(args.space)
    if args.check == "sober":
        try:
            w = sober_witness(X)
            out = {"ok": len(w) == X.n == len(irreducible_closed_sets(X)),
                   "generic_points": {str(F): X.points[k] for F, k in w.items()}}
        except QpolisError as exc:
            out = {"ok": False, "error": exc.to_json()}
    else:
        if not args.map:
            raise QpolisError("SCHEMA_ERROR", f"{args.check} needs --map")
        f = read_map(args.map, X)
        if args.check == "essential":
            out = {"ok": True, "essential": is_essential(f)}
        elif args.check == "bairequant":
            out = verify_bairequant_identities(f)
        elif args.check == "kuratowski-ulam":
            out = verify_kuratowski_ulam(f)
        else:
            from .powerspace import open_surj_embedding
            rep = open_surj_embedding(f)
            out = dict(rep.to_json(), ok=rep.is_embedding and rep.star_identity and rep.equal)
    params = {"check": args.check, "space": file_digest(args.space), "map": file_digest(args.map)}
    out["manifest"] = manifest("oracle", params, outcome={"pass": out["ok"]})
    emit(out)
    return EXIT_OK if out["ok"] else EXIT_FAIL


def cmd_space(args):
    from .copres import build
    if args.action in ("reals", "completion"):
        C = builtin(args.action, args.max_denominator)
    elif args.action == "build":
        C = from_finite_space(read_space(args.inputs[0]), method=args.method)
    else:
        parts = [copres_from_json(read_json(p)) for p in args.inputs]
        if not parts:
            raise QpolisError("SCHEMA_ERROR", f"{args.action} needs at least one input")
        if args.action == "product":
            C = build.product(parts)
        elif args.action == "union":
            C = build.disjoint_union(parts)
        elif len(parts) == 1:
            C = build.lift(parts[0])
        else:
            raise QpolisError("SCHEMA_ERROR", "lift takes one input")
    out = {"copresentation": copres_to_json(C, args.sample)}
    if C.finite_indices:
        out["points"] = len(C.to_finite_space().points)
    out["manifest"] = manifest("space", {"action": args.action,
                                         "inputs": [file_digest(p) for p in args.inputs]})
    emit(out)
    return EXIT_OK


def parse_stream(spec: str, max_denominator: int):
    from .copres.metric import dyadic_grid
    from .points import CANNED_REALS, grid_point_stream, listed_stream, rational_cut_stream, \
        real_to_stream
    kind, _, arg = spec.partition(":")
    if kind == "rational":
        return rational_cut_stream(Fraction(arg))
    if kind == "real" and arg in CANNED_REALS:
        return real_to_stream(CANNED_REALS[arg], arg)
    if kind == "grid":
        return grid_point_stream(dyadic_grid(max_denominator), int(arg))
    if kind == "list":
        labels = [_stream_label(l) for l in json.loads(arg)]
        return listed_stream([frozenset(labels)])
    raise QpolisError("SCHEMA_ERROR", f"unknown stream {spec!r}",
                      known=["rational:P/Q", "real:" + "|".join(CANNED_REALS), "grid:I",
                             "list:[labels]"])


def _stream_label(l):
    """JSON label to a label: ``["L", "1/2"]`` and ``["B", i, "1/4"]`` carry
    rationals as strings."""
    l = _point_key(l)
    if isinstance(l, tuple) and l and l[0] in ("L", "R", "B") and isinstance(l[-1], str):
        try:
            return l[:-1] + (Fraction(l[-1]),)
        except ValueError:
            pass
    return l


def cmd_point(args):
    from .points import check_relations
    if args.space in ("reals", "completion"):
        C = builtin(args.space, args.max_denominator)
    else:
        C = copres_from_json(read_json(args.space))
    p = parse_stream(args.stream, args.max_denominator)
    report = check_relations(p, C, args.fuel)
    out = report.to_json()
    out["ok"] = not report.violated
    out["manifest"] = manifest("point", {"space": args.space, "stream": args.stream,
                                         "fuel": args.fuel}, outcome={"pass": out["ok"]})
    emit(out)
    return EXIT_OK if out["ok"] else EXIT_FAIL


def cmd_posite(args):
    from . import posite as ps
    if args.action == "from-copres":
        X = read_space(args.input)
        B = ps.posite_from_copres(X)
        ok = ps.check_axioms(B.posite)["ok"] and ps.union_equation_holds(B)
        out = {"posite": B.posite.to_json(), "ok": ok}
    else:
        P = ps.posite_from_json(read_json(args.input))
        if args.action == "check":
            out = ps.check_axioms(P)
        elif args.action == "spaces":
            out = {"ok": True, "prime_filters": len(ps.pfilt_points(P)),
                   "filters": len(ps.brute_force(P, ps.is_filter)),
                   "coideals": len(ps.brute_force(P, ps.is_coideal)),
                   "upsets": len(ps.brute_force(P, ps.is_upset))}
        else:
            A = P.full if args.coideal is None else sum(1 << P.carrier.index(a)
                                                          for a in args.coideal)
            if not ps.is_coideal(P, A):
                raise QpolisError("SCHEMA_ERROR", "--coideal is not a coideal")
            W = P.carrier.index(args.w) if args.w is not None else min(
                i for i in range(P.n) if (A >> i) & 1)
            g = ps.generic_prime_filter(P, ps.mask_oracle(A), W)
            F = g.filter_mask(P)
            ok = ps.is_prime_filter(P, F) and (F >> W) & 1 == 1 and F & ~A == 0
            out = {"ok": ok, "pivots": [P.carrier[v] for v in g.pivots],
                   "filter": [P.carrier[i] for i in range(P.n) if (F >> i) & 1]}
    out["manifest"] = manifest("posite", {"action": args.action,
                                          "input": file_digest(args.input)},
                               outcome={"pass": out["ok"]})
    emit(out)
    return EXIT_OK if out["ok"] else EXIT_FAIL


def cmd_powerspace(args):
    from .powerspace import check_down, check_powerspace, open_surj_embedding, powerspace
    X = read_space(args.space)
    H = powerspace(X)
    rep = check_powerspace(H)
    out = {"powerspace": rep, "coideals": [X.names(F) for F in X.closed_sets()]}
    ok = rep["bijective"] and rep["homeomorphism"]
    if args.down:
        out["down"] = check_down(H)
        ok = ok and out["down"]["agree"]
    if args.embed_openmap:
        emb = open_surj_embedding(read_map(args.embed_openmap, X))
        out["open_surjection"] = emb.to_json()
        ok = ok and emb.is_embedding and emb.star_identity and emb.equal
    out["ok"] = ok
    out["manifest"] = manifest("powerspace", {"space": file_digest(args.space), "down": args.down,
                                              "map": file_digest(args.embed_openmap)},
                               outcome={"pass": ok})
    emit(out)
    return EXIT_OK if ok else EXIT_FAIL


def _split_args(text):
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
            continue
        depth += (ch == "(") - (ch == ")")
        cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def parse_strategy(spec: str, X: FiniteSpace):
    """Strategy expressions over the base space X:

    ``finite``, ``finite:space.json``, ``normalize(E)``, ``product(E, E, ...)``,
    ``pi02(rels.json, E)`` and ``open-image(map.json, E)``.  A relations file
    lists ``[U, V]`` pairs of point-name lists; a map file has ``source``,
    ``target`` and ``graph``.
    """
    from . import game
    spec = spec.strip()
    if spec == "finite":
        return game.strat_finite(X)
    if spec.startswith("finite:"):
        return game.strat_finite(read_space(spec[len("finite:"):]))
    head, paren, rest = spec.partition("(")
    if not paren or not rest.endswith(")"):
        raise QpolisError("SCHEMA_ERROR", f"bad strategy expression {spec!r}")
    args = _split_args(rest[:-1])
    if head == "normalize" and len(args) == 1:
        return game.normalize_strategy(parse_strategy(args[0], X))
    if head == "product" and args:
        return game.strat_product([parse_strategy(a, X) for a in args])
    if head == "pi02" and len(args) == 2:
        inner = parse_strategy(args[1], X)
        Y = inner.space
        rels = [(subset_mask(Y, u), subset_mask(Y, v)) for u, v in read_json(args[0])]
        return game.strat_pi02(Y, rels, inner)
    if head == "open-image" and len(args) == 2:
        data = read_json(args[0])
        if not isinstance(data, dict) or "source" not in data:
            raise QpolisError("SCHEMA_ERROR", "open-image map needs a source space")
        inner = parse_strategy(args[1], FiniteSpace.from_json(data["source"]))
        return game.strat_open_image(read_map(args[0], inner.space), inner)
    raise QpolisError("SCHEMA_ERROR", f"bad strategy expression {spec!r}")


def parse_adversary(spec: str, X: FiniteSpace):
    from .game import ConstantI, RandomI
    kind, _, arg = spec.partition(":")
    if kind == "random":
        return RandomI(X, int(arg or 0))
    if kind == "constant":
        hits = [k for k, p in enumerate(X.points) if str(label_json(p)) == arg]
        if not hits:
            raise QpolisError("SCHEMA_ERROR", f"no point named {arg!r}")
        return ConstantI(X, hits[0])
    raise QpolisError("SCHEMA_ERROR", f"unknown adversary {spec!r}",
                      known=["random:SEED", "constant:POINT"])


def cmd_game(args):
    from .game import check_history, limit_point, play, winner_convergent, winner_strong
    X = read_space(args.space)
    s = parse_strategy(args.ii, X)
    Y = s.space
    h = play(Y, parse_adversary(args.i, Y), s, args.rounds, strict=False)
    verdict = winner_convergent(Y, h)
    lp = limit_point(Y, h)
    out = {"history": h.to_json(), "referee": [list(e) for e in check_history(Y, h)],
           "winner_convergent": verdict, "winner_strong": winner_strong(Y, h),
           "limit_point": None if lp is None else label_json(Y.points[lp])}
    out["manifest"] = manifest("game", {"space": file_digest(args.space), "ii": args.ii,
                                        "i": args.i, "rounds": args.rounds},
                               outcome={"winner": verdict})
    emit(out)
    return EXIT_OK if verdict == "II-wins" else EXIT_FAIL


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qpolis", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run an acceptance suite")
    p.add_argument("suite", help=", ".join(SUITES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-size", type=int, default=None,
                   help="cap on space or carrier sizes (default: per-criterion sizes)")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("convert", help="convert between finite formats")
    p.add_argument("--input", required=True)
    p.add_argument("--from", dest="source", required=True, help=", ".join(FORMATS))
    p.add_argument("--to", dest="target", required=True, help=", ".join(FORMATS))
    p.add_argument("--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("demo", help="canned walkthroughs")
    p.add_argument("name", help=", ".join(DEMOS))
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("oracle", help="brute-force checks on finite spaces and maps")
    p.add_argument("check", choices=["sober", "essential", "bairequant", "kuratowski-ulam",
                                     "open-surjection"])
    p.add_argument("--space", required=True)
    p.add_argument("--map", help="map JSON with target and graph")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("space", help="build copresentations")
    p.add_argument("action", choices=["build", "product", "lift", "union", "reals",
                                      "completion"])
    p.add_argument("inputs", nargs="*", help="finite space (build) or copresentation files")
    p.add_argument("--method", choices=["direct", "transfer"], default="direct")
    p.add_argument("--max-denominator", type=int, default=64)
    p.add_argument("--sample", type=int, default=4, help="relations shown per countable family")
    p.set_defaults(func=cmd_space)

    p = sub.add_parser("point", help="check a point stream against the relations")
    p.add_argument("action", choices=["check"])
    p.add_argument("--space", required=True, help="reals, completion or a copresentation file")
    p.add_argument("--stream", required=True,
                   help="rational:P/Q, real:NAME, grid:I or list:[labels]")
    p.add_argument("--fuel", type=int, default=50)
    p.add_argument("--max-denominator", type=int, default=64)
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("posite", help="posite checks and generic filters")
    p.add_argument("action", choices=["check", "spaces", "from-copres", "generic"])
    p.add_argument("--input", required=True, help="posite JSON, or a finite space for from-copres")
    p.add_argument("--coideal", nargs="*", help="coideal elements (default: everything)")
    p.add_argument("--w", help="starting element (default: least in the coideal)")
    p.set_defaults(func=cmd_posite)

    p = sub.add_parser("powerspace", help="lower powerspace checks")
    p.add_argument("--space", required=True)
    p.add_argument("--down", action="store_true", help="also check the point-closure relations")
    p.add_argument("--embed-openmap", help="open surjection JSON with target and graph")
    p.set_defaults(func=cmd_powerspace)

    p = sub.add_parser("game", help="play the convergent strong Choquet game")
    p.add_argument("action", choices=["play"])
    p.add_argument("--space", required=True)
    p.add_argument("--ii", default="finite", help="strategy expression for player II")
    p.add_argument("--i", default="random:0", help="random:SEED or constant:POINT")
    p.add_argument("--rounds", type=int, default=20)
    p.set_defaults(func=cmd_game)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except QpolisError as exc:
        sys.stderr.write(canonical_json(exc.to_json()))
        return EXIT_FAIL if exc.code in ASSERTION_CODES else EXIT_USAGE


# Error codes that report a property failing rather than bad input.
ASSERTION_CODES = {"ORACLE_BREACH", "WITNESS_MISSING", "NOT_T0"}


if __name__ == "__main__":
    sys.exit(main())
