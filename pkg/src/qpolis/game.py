"""The convergent strong Choquet game on finite spaces and on metric data.

Player I moves (U_n, x_n) with x_n in U_n and U_n inside V_{n-1}; player II
answers V_n with x_n in V_n inside U_n.  II wins when the opens form a
neighbourhood basis of some point.  On a finite space the opens decrease, so a
run has a last value; a run counts as stabilized once that value has been
played ``window`` times in a row, and only then is a verdict given.

Strategies are pure functions of I's moves: a strategy replays the whole run
from I's moves and keeps every side game it runs in a per-round trace, memoized
by the tuple of I's moves.  Since II's replies are determined by I's moves,
the trace is also the instrumentation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as _cartesian
from typing import Callable

from .copres.codes import Copresentation
from .copres.metric import MetricData
from .errors import QpolisError
from .finite.space import FiniteMap, FiniteSpace, bits, popcount

II_WINS = "II-wins"
I_WINS = "I-wins"
UNDECIDED = "undecided"


# --- histories ------------------------------------------------------------


@dataclass(frozen=True)
class Move:
    player: str           # "I" or "II"
    open: object          # bit-set on a finite space, ball label on metric data
    point: object = None  # I only
    legal: bool = True


@dataclass
class GameHistory:
    space: object
    moves: list = field(default_factory=list)

    @property
    def rounds(self) -> int:
        """Number of I-moves played."""
        return sum(1 for m in self.moves if m.player == "I")

    def U(self, k):
        return self._of("I", k).open

    def x(self, k):
        return self._of("I", k).point

    def V(self, k):
        return self._of("II", k).open

    def _of(self, player, k):
        return [m for m in self.moves if m.player == player][k]

    def i_moves(self) -> tuple:
        return tuple((m.open, m.point) for m in self.moves if m.player == "I")

    def opens(self) -> list:
        return [m.open for m in self.moves]

    @property
    def legal(self) -> bool:
        return all(m.legal for m in self.moves)

    def offender(self):
        return next((m.player for m in self.moves if not m.legal), None)

    def to_json(self):
        X = self.space
        out = []
        for m in self.moves:
            if isinstance(X, FiniteSpace):
                item = {"player": m.player, "open": [_jsonable(p) for p in X.names(m.open)]}
                if m.player == "I":
                    item["point"] = _jsonable(X.points[m.point])
            else:
                item = {"player": m.player, "open": _jsonable(m.open)}
                if m.player == "I":
                    item["point"] = getattr(m.point, "label", str(m.point))
            item["legal"] = m.legal
            out.append(item)
        return out

    @classmethod
    def of(cls, space, rounds):
        """History from (U, x, V) triples; V may be None on the last round."""
        h = cls(space)
        for U, x, V in rounds:
            h.moves.append(Move("I", U, x))
            if V is not None:
                h.moves.append(Move("II", V))
        return h


def _jsonable(p):
    if isinstance(p, tuple):
        return [_jsonable(q) for q in p]
    if isinstance(p, frozenset):
        return sorted((_jsonable(q) for q in p), key=repr)
    if isinstance(p, Fraction):
        return str(p)
    return p


def legal_I(X: FiniteSpace, prev, U, x) -> bool:
    return (isinstance(x, int) and 0 <= x < X.n and X.is_open(U) and (U >> x) & 1 == 1
            and (prev is None or U & ~prev == 0))


def legal_II(X: FiniteSpace, U, x, V) -> bool:
    return X.is_open(V) and (V >> x) & 1 == 1 and V & ~U == 0


def check_history(X: FiniteSpace, h: GameHistory) -> list:
    """Post hoc referee: every legality violation as (round, player)."""
    bad, prev, last = [], None, None
    k = -1
    for m in h.moves:
        if m.player == "I":
            k += 1
            if not legal_I(X, prev, m.open, m.point):
                bad.append((k, "I"))
            last = m
        else:
            if last is None or not legal_II(X, last.open, last.point, m.open):
                bad.append((k, "II"))
            prev = m.open
    return bad


# --- strategies -----------------------------------------------------------


class StrategyII:
    """II's strategy; ``trace(moves)`` gives one record per round, holding II's
    reply under "V" together with any side-game bookkeeping."""

    name = "strategy"

    def __init__(self, space: FiniteSpace):
        self.space = space
        self._memo = {}

    def trace(self, moves: tuple) -> tuple:
        moves = tuple(moves)
        if moves in self._memo:
            return self._memo[moves]
        prev = self.trace(moves[:-1]) if moves else ()
        out = prev + (self._step(prev, moves),) if moves else ()
        self._memo[moves] = out
        return out

    def move(self, h: GameHistory):
        return self.trace(h.i_moves())[-1]["V"]

    def _step(self, prev: tuple, moves: tuple) -> dict:
        raise NotImplementedError


class StrategyI:
    """I's strategy: ``move(h)`` after a II-move (or at the start) gives (U, x)."""

    name = "player-I"

    def move(self, h: GameHistory):
        raise NotImplementedError


def _previous_V(h: GameHistory):
    vs = [m.open for m in h.moves if m.player == "II"]
    return vs[-1] if vs else None


class RandomI(StrategyI):
    """Random legal opens and points for ``horizon`` rounds, then it keeps one
    point and replays II's last open.  Each round draws from its own seeded
    generator, so the adversary is a function of the history."""

    def __init__(self, X: FiniteSpace, seed: int, horizon: int | None = None):
        self.X, self.seed = X, seed
        self.horizon = 2 * X.n if horizon is None else horizon
        self.name = f"random:{seed}"

    def move(self, h):
        X, k = self.X, h.rounds
        prev = _previous_V(h)
        prev = X.full if prev is None else prev
        if k >= self.horizon and k > 0:
            last = h.x(k - 1)
            x = last if (prev >> last) & 1 else min(bits(prev))
            return prev, x
        rng = random.Random(self.seed * 1_000_003 + k)
        choices = [u for u in X.opens if u and u & ~prev == 0]
        U = rng.choice(choices)
        return U, rng.choice(list(bits(U)))


class ConstantI(StrategyI):
    """Always the point x, inside II's last open (the whole space at first)."""

    def __init__(self, X: FiniteSpace, x: int):
        self.X, self.x = X, x
        self.name = f"constant:{x}"

    def move(self, h):
        prev = _previous_V(h)
        return (self.X.full if prev is None else prev), self.x


class ScriptedI(StrategyI):
    """Plays the listed points; each open is II's last open."""

    def __init__(self, X: FiniteSpace, points):
        self.X, self.points = X, list(points)
        self.name = "scripted"

    def move(self, h):
        prev = _previous_V(h)
        x = self.points[min(h.rounds, len(self.points) - 1)]
        return (self.X.full if prev is None else prev), x


# --- referee and verdicts -------------------------------------------------


def _as_space(X):
    return X.to_finite_space() if isinstance(X, Copresentation) else X


def play(X, sI: StrategyI, sII: StrategyII, rounds: int, strict: bool = True) -> GameHistory:
    """Run ``rounds`` rounds.  An illegal move raises ILLEGAL_MOVE, or with
    ``strict=False`` is recorded with its legality flag and ends the run."""
    if rounds < 0:
        raise QpolisError("SCHEMA_ERROR", "rounds must be >= 0")
    X = _as_space(X)
    h = GameHistory(X)
    if X.n == 0:
        return h
    prev = None
    for k in range(rounds):
        U, x = sI.move(h)
        ok = legal_I(X, prev, U, x)
        h.moves.append(Move("I", U, x, ok))
        if not ok:
            if strict:
                raise QpolisError("ILLEGAL_MOVE", f"I moved illegally in round {k}",
                                  offender="I", round=k)
            return h
        V = sII.move(h)
        ok = legal_II(X, U, x, V)
        h.moves.append(Move("II", V, None, ok))
        if not ok:
            if strict:
                raise QpolisError("ILLEGAL_MOVE", f"II moved illegally in round {k}",
                                  offender="II", round=k)
            return h
        prev = V
    return h


def _legality_verdict(X, h):
    if X.n == 0:
        return II_WINS
    offender = h.offender()
    if offender is None:
        bad = check_history(X, h)
        offender = bad[0][1] if bad else None
    if offender is not None:
        return II_WINS if offender == "I" else I_WINS
    return None


def stabilized(h: GameHistory, window: int = 3):
    """The last open if it was played ``window`` times in a row, else None."""
    opens = h.opens()
    if len(opens) < window or not opens or h.moves[-1].player != "II":
        return None
    tail = opens[-window:]
    return tail[0] if all(o == tail[0] for o in tail) else None


def winner_convergent(X, h: GameHistory, window: int = 3) -> str:
    """II wins once the run has stabilized at the minimal neighbourhood of a
    point lying in every open played."""
    X = _as_space(X)
    verdict = _legality_verdict(X, h)
    if verdict is not None:
        return verdict
    W = stabilized(h, window)
    if W is None:
        return UNDECIDED
    for k in range(X.n):
        if X.min_nbhd(k) == W and all((o >> k) & 1 for o in h.opens()):
            return II_WINS
    return I_WINS


def winner_strong(X, h: GameHistory, window: int = 3) -> str:
    """II wins once the run has stabilized with nonempty intersection."""
    X = _as_space(X)
    verdict = _legality_verdict(X, h)
    if verdict is not None:
        return verdict
    W = stabilized(h, window)
    if W is None:
        return UNDECIDED
    meet = X.full
    for o in h.opens():
        meet &= o
    return II_WINS if meet else I_WINS


def limit_point(X: FiniteSpace, h: GameHistory, window: int = 3):
    """The point whose neighbourhood basis the run is, or None."""
    W = stabilized(h, window)
    if W is None:
        return None
    return next((k for k in range(X.n) if X.min_nbhd(k) == W), None)


# --- finite strategies ----------------------------------------------------


class FiniteStrategy(StrategyII):
    """II answers the minimal open neighbourhood of I's point."""

    name = "finite"

    def _step(self, prev, moves):
        return {"V": self.space.min_nbhd(moves[-1][1])}


def strat_finite(X) -> StrategyII:
    return FiniteStrategy(_as_space(X))


class CallableStrategy(StrategyII):
    """A strategy from a plain function of (space, I's moves)."""

    def __init__(self, space, reply: Callable, name="callable"):
        super().__init__(space)
        self.reply = reply
        self.name = name

    def _step(self, prev, moves):
        return {"V": self.reply(self.space, moves)}


def _side_move(space, strat, moves):
    """II's reply in a side game, checked for legality."""
    U, x = moves[-1]
    V = strat.trace(moves)[-1]["V"]
    if not legal_II(space, U, x, V):
        raise QpolisError("SIDE_GAME_ILLEGAL", f"{strat.name} replied illegally in a side game",
                          round=len(moves) - 1)
    return V


# --- Pi^0_2 subspaces -----------------------------------------------------


class Pi02Strategy(StrategyII):
    """II on Y = intersection of (not A_n or B_n), relaying to a side game on
    the ambient space.  Opens of Y are in Y's own indexing."""

    name = "pi02"

    def __init__(self, ambient: FiniteSpace, rels, strat: StrategyII):
        self.ambient = ambient
        self.rels = [(int(A), int(B)) for A, B in rels]
        for A, B in self.rels:
            if not (ambient.is_open(A) and ambient.is_open(B)):
                raise QpolisError("SCHEMA_ERROR", "relation sides must be open in the ambient space")
        Y = ambient.full
        for A, B in self.rels:
            Y &= ~A | B
        self.Y = Y
        self.keep = list(bits(Y))
        super().__init__(ambient.subspace(Y))
        self.strat = strat

    def to_ambient(self, local: int) -> int:
        return sum(1 << self.keep[k] for k in bits(local))

    def to_local(self, amb: int) -> int:
        return sum(1 << i for i, k in enumerate(self.keep) if (amb >> k) & 1)

    def _step(self, prev, moves):
        X = self.ambient
        k = len(moves) - 1
        U, x = moves[-1]
        U_amb, x_amb = self.to_ambient(U), self.keep[x]
        bound = X.full if k == 0 else prev[-1]["V_side"]
        active = [n for n, (A, B) in enumerate(self.rels) if n <= k and (A >> x_amb) & 1]
        for n in active:
            bound &= self.rels[n][1]
        # largest open containing x_k below the bound whose trace on Y lies in U_k
        Up = 0
        for o in X.opens:
            if (o >> x_amb) & 1 and o & ~bound == 0 and o & self.Y & ~U_amb == 0:
                Up |= o
        if not (Up >> x_amb) & 1:
            raise QpolisError("SIDE_GAME_ILLEGAL", "no admissible ambient open", round=k)
        side = tuple((r["U_side"], r["x_side"]) for r in prev) + ((Up, x_amb),)
        Vp = _side_move(X, self.strat, side)
        return {"V": self.to_local(Vp & self.Y), "U_side": Up, "x_side": x_amb, "V_side": Vp,
                "active": active}


def strat_pi02(ambient, rels, strat: StrategyII) -> StrategyII:
    """``rels`` are pairs (A, B) of ambient opens; with none, Y is the ambient."""
    return Pi02Strategy(_as_space(ambient), rels, strat)


def check_pi02_conditions(s: Pi02Strategy, h: GameHistory) -> list:
    """Each round's side move against conditions (i)-(iii); violations listed."""
    X = s.ambient
    out = []
    trace = s.trace(h.i_moves())
    for k, ((U, x), r) in enumerate(zip(h.i_moves(), trace)):
        Up, xa = r["U_side"], r["x_side"]
        if not ((Up >> xa) & 1 and Up & s.Y & ~s.to_ambient(U) == 0):
            out.append((k, "i"))
        if k > 0 and Up & ~trace[k - 1]["V_side"]:
            out.append((k, "ii"))
        for n, (A, B) in enumerate(s.rels):
            if n <= k and (A >> xa) & 1 and Up & ~B:
                out.append((k, "iii", n))
        if not X.is_open(Up):
            out.append((k, "open"))
    return out


# --- countable products ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class ProductSpace:
    """Product of finite factors; point k has coordinates in mixed radix with
    factor 0 most significant."""

    factors: tuple
    space: FiniteSpace

    def coords(self, k):
        out = []
        for F in reversed(self.factors):
            out.append(k % F.n)
            k //= F.n
        return tuple(reversed(out))

    def index(self, coords):
        k = 0
        for F, c in zip(self.factors, coords):
            k = k * F.n + c
        return k

    def box(self, masks) -> int:
        m = 0
        for coords in _cartesian(*(list(bits(u)) for u in masks)):
            m |= 1 << self.index(coords)
        return m


def product_space(factors) -> ProductSpace:
    factors = tuple(factors)
    shell = ProductSpace(factors, None)
    n = 1
    for F in factors:
        n *= F.n
    pts = [tuple(F.points[c] for F, c in zip(factors, shell.coords(k))) for k in range(n)]
    gens = []
    for i, F in enumerate(factors):
        for o in F.opens:
            gens.append(shell.box([o if j == i else G.full for j, G in enumerate(factors)]))
    return ProductSpace(factors, FiniteSpace(pts, gens))


class ProductStrategy(StrategyII):
    """II on a product, relaying to one side game per factor.

    The finite product stands for the countable one padded with one-point
    factors, so the counters m_k can keep increasing; side games on padding
    factors always answer the whole point and are not simulated.
    """

    name = "product"

    def __init__(self, strats):
        self.strats = list(strats)
        self.P = product_space([s.space for s in self.strats])
        super().__init__(self.P.space)

    def _box(self, U, x):
        P = self.P
        c = P.coords(x)
        box = [F.min_nbhd(ci) for F, ci in zip(P.factors, c)]
        for n in reversed(range(len(box))):
            F = P.factors[n]
            grown = 0
            for o in F.opens:
                if (o >> c[n]) & 1 and P.box(box[:n] + [o] + box[n + 1:]) & ~U == 0:
                    grown |= o
            box[n] = grown
        return box

    def _step(self, prev, moves):
        P = self.P
        k = len(moves) - 1
        U, x = moves[-1]
        box = self._box(U, x)
        needed = max((n + 1 for n, (b, F) in enumerate(zip(box, P.factors)) if b != F.full),
                     default=0)
        m_prev = prev[-1]["m"] if prev else 0
        m = max(m_prev + 1, needed)
        c = P.coords(x)
        sides = [list(r) for r in prev[-1]["sides"]] if prev else [[] for _ in P.factors]
        replies = []
        for n, F in enumerate(P.factors):
            if n >= m:
                replies.append(F.full)
                continue
            sides[n].append((box[n], c[n]))
            replies.append(_side_move(F, self.strats[n], tuple(sides[n])))
        return {"V": P.box(replies), "m": m, "box": box, "sides": tuple(tuple(s) for s in sides),
                "replies": replies}


def strat_product(strats) -> StrategyII:
    if not strats:
        raise QpolisError("SCHEMA_ERROR", "a product needs at least one factor")
    return ProductStrategy(strats)


# --- open images ----------------------------------------------------------


class OpenImageStrategy(StrategyII):
    """II on the target of an open surjection, relaying to a side game on the
    domain through least lifts of I's points."""

    name = "open-image"

    def __init__(self, f: FiniteMap, strat: StrategyII):
        if not f.is_continuous():
            raise QpolisError("NOT_CONTINUOUS", "map is not continuous")
        if not f.is_open_map():
            raise QpolisError("NOT_OPEN_MAP", "map is not open")
        if not f.is_surjective():
            raise QpolisError("NOT_SURJECTIVE", "map is not surjective")
        super().__init__(f.target)
        self.f, self.strat = f, strat

    def _step(self, prev, moves):
        f, X = self.f, self.f.source
        k = len(moves) - 1
        U, y = moves[-1]
        bound = X.full if k == 0 else prev[-1]["V_side"]
        Up = f.preimage(U) & bound
        lifts = f.fiber(y) & Up
        if not lifts:
            raise QpolisError("SIDE_GAME_ILLEGAL", "I's point has no lift in the side game", round=k)
        x = min(bits(lifts))
        side = tuple((r["U_side"], r["x_side"]) for r in prev) + ((Up, x),)
        Vp = _side_move(X, self.strat, side)
        return {"V": f.image(Vp), "U_side": Up, "x_side": x, "V_side": Vp}


def strat_open_image(f: FiniteMap, strat: StrategyII) -> StrategyII:
    return OpenImageStrategy(f, strat)


# --- normalization --------------------------------------------------------


class BasisStrategy(StrategyII):
    """Shrink each reply to a basis element containing I's point: the reply
    itself when basic, else the largest basic open inside it."""

    name = "basis"

    def __init__(self, strat: StrategyII, basis):
        super().__init__(strat.space)
        self.strat = strat
        self.basis = list(basis)

    def _step(self, prev, moves):
        V = self.strat.trace(moves)[-1]["V"]
        if V in self.basis:
            return {"V": V}
        x = moves[-1][1]
        inside = [b for b in self.basis if (b >> x) & 1 and b & ~V == 0]
        if not inside:
            raise QpolisError("NOT_A_BASIS", "no basic open between the point and the reply")
        return {"V": max(inside, key=lambda b: (popcount(b), -self.basis.index(b)))}


class NormalizedStrategy(StrategyII):
    """Replies depend on I's current point and the opens only: earlier points
    are replaced by the least points that make the basis strategy produce the
    replies actually played."""

    name = "normalized"

    def __init__(self, strat: StrategyII, basis):
        self.sigma = BasisStrategy(strat, basis)
        super().__init__(strat.space)
        self.basis = self.sigma.basis

    def _step(self, prev, moves):
        U, x = moves[-1]
        shadow = tuple((moves[j][0], r["x_prime"]) for j, r in enumerate(prev))
        V = self.sigma.trace(shadow + ((U, x),))[-1]["V"]
        xp = next(p for p in bits(V)
                  if self.sigma.trace(shadow + ((U, p),))[-1]["V"] == V)
        return {"V": V, "x_prime": xp}


def normalize_strategy(s: StrategyII, basis=None) -> StrategyII:
    """Default basis: the minimal neighbourhoods."""
    X = s.space
    basis = sorted(set(X.min_nbhds())) if basis is None else [int(b) for b in basis]
    return NormalizedStrategy(s, basis)


def paired_moves(s: StrategyII, h: GameHistory, t: int, rng: random.Random):
    """I's first t moves of ``h`` with each earlier point redrawn among those
    for which ``s`` still gives the recorded reply, so the opens agree; the
    last point is kept.  None when no such point exists."""
    out = ()
    for k in range(t - 1):
        U, V = h.U(k), h.V(k)
        same = [p for p in bits(V) if s.trace(out + ((U, p),))[-1]["V"] == V]
        if not same:
            return None
        out += ((U, rng.choice(same)),)
    return out + ((h.U(t - 1), h.x(t - 1)),)


def point_independent(s: StrategyII, h: GameHistory, rng: random.Random, tries=4) -> bool:
    """Runs with the same opens but other earlier points get the same replies."""
    for t in range(1, h.rounds + 1):
        for _ in range(tries):
            other = paired_moves(s, h, t, rng)
            if other is None or s.trace(other)[-1]["V"] != h.V(t - 1):
                return False
    return True


# --- tree extraction ------------------------------------------------------


@dataclass
class ExtractedTree:
    basis: list
    depth: int
    nodes: set             # tuples of basis indices, including ()
    branches: dict         # maximal node -> point index or None
    checks: dict

    def to_json(self):
        return {"depth": self.depth, "nodes": len(self.nodes),
                "branches": {",".join(map(str, t)): p for t, p in sorted(self.branches.items())},
                "checks": self.checks}


def extract_tree(s: StrategyII, basis=None, depth: int = 2) -> ExtractedTree:
    """Sequences of basis indices (U_{t0}, V_{t0'}, ...) legal under ``s`` up to
    ``depth`` rounds.  One concrete run represents each node; by point
    independence of a normalized strategy the choice does not matter."""
    X = s.space
    basis = list(getattr(s, "basis", None) or sorted(set(X.min_nbhds())) if basis is None
                 else basis)
    pos = {b: i for i, b in reversed(list(enumerate(basis)))}
    nodes = {()}
    frontier = {(): ()}   # node of even length -> representative I-moves
    replies = {}          # odd node -> set of basis indices II may answer
    for k in range(depth):
        nxt = {}
        for t, moves in sorted(frontier.items()):
            prev = basis[t[-1]] if t else X.full
            for i, U in enumerate(basis):
                if not U or U & ~prev:
                    continue
                for x in bits(U):
                    V = s.trace(moves + ((U, x),))[-1]["V"]
                    if V not in pos:
                        raise QpolisError("NOT_A_BASIS", "strategy played a non-basic open")
                    t1, t2 = t + (i,), t + (i, pos[V])
                    nodes |= {t1, t2}
                    replies.setdefault(t1, set()).add(pos[V])
                    nxt.setdefault(t2, moves + ((U, x),))
        frontier = nxt
    branches = {}
    for t in frontier:
        W = basis[t[-1]] if t else X.full
        branches[t] = next((p for p in range(X.n) if X.min_nbhd(p) == W), None)
    image = {p for p in branches.values() if p is not None}
    checks = {"surjective": depth == 0 or image == set(range(X.n))}
    continuity = True
    for t, p in branches.items():
        if p is not None:
            continuity &= all((basis[t[2 * j]] >> p) & 1 for j in range(len(t) // 2))
    checks["continuous"] = continuity
    cylinders = True
    for t, answers in replies.items():
        if len(t) // 2 >= depth - 1:
            continue
        union = 0
        for m in answers:
            union |= basis[m]
        hit = 0
        for b, p in branches.items():
            if p is not None and b[:len(t)] == t:
                hit |= 1 << p
        cylinders &= hit == union
    checks["cylinder_images"] = cylinders
    return ExtractedTree(basis, depth, nodes, branches, checks)


# --- metric data ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MetricPoint:
    """A point of the completion, known by its exact distances to D."""

    label: str
    dist_to: Callable[[int], Fraction]


def grid_point(M: MetricData, i: int) -> MetricPoint:
    return MetricPoint(f"D[{i}]", lambda a: M.d(a, i))


def _dyadic_at_most(bound: Fraction) -> Fraction:
    s = Fraction(1)
    while s > bound:
        s /= 2
    return s


class MetricStrategy:
    """Ball halving: around I's point, a formal ball of radius a power of two
    at most 2^-n, half of I's radius and half of the slack."""

    name = "metric"

    def __init__(self, M: MetricData, search: int = 4096):
        self.M, self.search = M, search

    def move(self, h: GameHistory):
        M = self.M
        n = h.rounds - 1
        (_, a, r), x = h.U(n), h.x(n)
        slack = r - Fraction(x.dist_to(a))
        s = _dyadic_at_most(min(Fraction(1, 2 ** n), r / 2, slack / 2))
        limit = self.search if M.size is None else M.size
        for c in range(limit):
            if Fraction(x.dist_to(c)) < s:
                return ("B", c, s)
        raise QpolisError("INSUFFICIENT_OBSERVATIONS",
                          f"no centre within {s} of the point among {limit}", round=n)


def strat_metric(M: MetricData, search: int = 4096) -> MetricStrategy:
    return MetricStrategy(M, search)


class MetricI:
    """Keeps one point; first plays a ball around the nearest point of D, then
    II's last ball, or half the time that ball shrunk around its centre."""

    def __init__(self, M: MetricData, x: MetricPoint, seed: int = 0):
        self.M, self.x, self.seed = M, x, seed
        self.name = f"metric:{x.label}:{seed}"

    def move(self, h):
        M, x = self.M, self.x
        prev = _previous_V(h)
        n = M.size or 64
        near = min(range(n), key=lambda a: (x.dist_to(a), a))
        if prev is None:
            return ("B", near, Fraction(x.dist_to(near)) + 1), x
        rng = random.Random(self.seed * 1_000_003 + h.rounds)
        if rng.random() < 0.5:
            return prev, x
        _, a, r = prev
        # same centre, radius between d(a, x) and r
        dx = Fraction(x.dist_to(a))
        return ("B", a, dx + (r - dx) * Fraction(rng.randint(1, 9), 10)), x


def play_metric(M: MetricData, sI, sII, rounds: int) -> GameHistory:
    h = GameHistory(M)
    prev = None
    for k in range(rounds):
        U, x = sI.move(h)
        ok = Fraction(x.dist_to(U[1])) < U[2] and (prev is None or M.inside(U, prev))
        h.moves.append(Move("I", U, x, ok))
        if not ok:
            raise QpolisError("ILLEGAL_MOVE", f"I moved illegally in round {k}",
                              offender="I", round=k)
        V = sII.move(h)
        ok = Fraction(x.dist_to(V[1])) < V[2] and M.inside(V, U)
        h.moves.append(Move("II", V, None, ok))
        if not ok:
            raise QpolisError("ILLEGAL_MOVE", f"II moved illegally in round {k}",
                              offender="II", round=k)
        prev = V
    return h


def metric_certificate(M: MetricData, h: GameHistory) -> dict:
    """Budgeted evidence that II's balls shrink to I's limit point."""
    n = h.rounds
    Vs = [h.V(k) for k in range(n)]
    radii_ok = all(V[2] <= Fraction(1, 2 ** k) and V[2] <= h.U(k)[2] / 2
                   for k, V in enumerate(Vs))
    nested = all(M.inside(Vs[k], h.U(k)) for k in range(n)) and \
        all(M.inside(h.U(k + 1), Vs[k]) for k in range(n - 1))
    cauchy = all(M.d(Vs[j][1], Vs[k][1]) <= Fraction(1, 2 ** j)
                 for j in range(n) for k in range(j + 1, n))
    contains = all(Fraction(h.x(k).dist_to(V[1])) < V[2] for k, V in enumerate(Vs))
    ok = radii_ok and nested and cauchy and contains
    return {"rounds": n, "radii": [str(V[2]) for V in Vs], "radii_ok": radii_ok,
            "nested": nested, "cauchy": cauchy, "contains_points": contains,
            "verdict": II_WINS if ok and n > 0 else UNDECIDED}
