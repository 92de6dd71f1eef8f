"""Game rules, state, and the match loop.

Three game kinds share one referee:

* ``nonbipartite`` -- symmetric weights m_{u,v} on unordered pairs, per-vertex
  budget d, Bob's labels pairwise disjoint at every vertex;
* ``bipartite``    -- ordered pairs (x, y), row and column budgets both d,
  labels disjoint per left vertex and per right vertex;
* ``restricted``   -- the nonbipartite game on n-bit strings with c = 1 and
  request sizes confined to powers of two in [2^-n, n^-p], each raised from
  zero exactly once.

An edge is satisfied when nu(M) >= c * m.  Bob must restore every edge by the
end of his move: a Bob pass while some edge is unsatisfied loses immediately
(the stalling rule); a game that exhausts ``max_moves`` with all edges
satisfied is a Bob win.  Both players may pass; two consecutive passes with
everything satisfied end the game in Bob's favor.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .cantor import ClopenSet, PrefixIndex, decode_clopen, encode_clopen
from .dyadic import Dyadic, ONE, ZERO

KINDS = ("nonbipartite", "bipartite", "restricted")


class Violation(Exception):
    """A move that breaks the rules; carries the offending vertex/edge."""

    def __init__(self, detail: str, *, vertex=None, edge=None):
        super().__init__(detail)
        self.vertex = vertex
        self.edge = edge

    @property
    def kind(self) -> str:
        return type(self).__name__


class BudgetExceeded(Violation):
    pass


class WeightDecreased(Violation):
    pass


class SymmetryBroken(Violation):
    pass


class RestrictionViolated(Violation):
    pass


class DisjointnessBroken(Violation):
    pass


class LabelShrunk(Violation):
    pass


class StrategyStuck(Exception):
    """A strategy that cannot produce its move; treated as a forced pass."""


@dataclass(frozen=True)
class GameConfig:
    kind: str
    d: Dyadic  # per-vertex weight budget for Alice
    c: Dyadic = ONE  # Bob's matching factor: needs nu(M) >= c*m
    n: Optional[int] = None  # string length (restricted kind)
    p: Optional[int] = None  # request-size exponent bound (restricted kind)
    max_moves: int = 10_000
    vertex_budget: Optional[int] = None  # informational cap on the universe

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown game kind {self.kind!r}")
        if not (ZERO < self.d <= ONE) or not (ZERO < self.c <= ONE):
            raise ValueError("c and d must lie in (0, 1]")
        if self.kind == "restricted":
            if self.c != ONE:
                raise ValueError("restricted game fixes c = 1")
            if self.n is None or self.p is None:
                raise ValueError("restricted game needs n and p")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "d": str(self.d),
            "c": str(self.c),
            "n": self.n,
            "p": self.p,
            "max_moves": self.max_moves,
            "vertex_budget": self.vertex_budget,
        }

    @staticmethod
    def from_json(obj: dict) -> "GameConfig":
        return GameConfig(
            kind=obj["kind"],
            d=Dyadic.parse(obj["d"]),
            c=Dyadic.parse(obj["c"]),
            n=obj.get("n"),
            p=obj.get("p"),
            max_moves=obj.get("max_moves", 10_000),
            vertex_budget=obj.get("vertex_budget"),
        )


@dataclass
class MoveRecord:
    index: int
    player: str  # "A" or "B"
    payload: list
    verdict: str = "ok"

    def to_line(self) -> str:
        obj = {"i": self.index, "p": self.player, "m": self.payload, "v": self.verdict}
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_line(line: str) -> "MoveRecord":
        obj = json.loads(line)
        return MoveRecord(obj["i"], obj["p"], obj["m"], obj["v"])


class GameState:
    """Weight and label tables plus derived bookkeeping.

    Mutated only through apply_alice_move / apply_bob_move, which are atomic:
    a rejected move leaves the state untouched and raises a Violation.
    """

    def __init__(self, config: GameConfig):
        self.config = config
        self.weights: dict[tuple, Dyadic] = {}
        self.labels: dict[tuple, ClopenSet] = {}
        self.vertex_weight: dict[str, Dyadic] = {}
        self.occupied: dict[str, PrefixIndex] = {}
        self.edges_at: dict[str, list[tuple]] = {}
        self.unsatisfied: set[tuple] = set()
        self.moves = 0

    # -- helpers ---------------------------------------------------------------

    def edge_key(self, u: str, v: str) -> tuple:
        if u == v:
            raise ValueError("no loops")
        if self.config.kind == "bipartite":
            return (u, v)
        return (u, v) if u <= v else (v, u)

    def weight(self, u: str, v: str) -> Dyadic:
        return self.weights.get(self.edge_key(u, v), ZERO)

    def label(self, u: str, v: str) -> ClopenSet:
        return self.labels.get(self.edge_key(u, v), ClopenSet.empty())

    def load(self, v: str) -> Dyadic:
        return self.vertex_weight.get(v, ZERO)

    def occupied_at(self, v: str) -> PrefixIndex:
        ix = self.occupied.get(v)
        if ix is None:
            ix = self.occupied[v] = PrefixIndex()
        return ix

    def edges_of(self, v: str) -> list[tuple]:
        return self.edges_at.get(v, [])

    def _register_edge(self, e: tuple) -> None:
        for v in e:
            self.edges_at.setdefault(v, []).append(e)

    def _satisfied(self, e: tuple) -> bool:
        m = self.weights.get(e, ZERO)
        if not m:
            return True
        lab = self.labels.get(e)
        return lab is not None and lab.nu() >= self.config.c * m

    def _check_restricted_vertex(self, v: str) -> None:
        n = self.config.n
        if len(v) != n or any(ch not in "01" for ch in v):
            raise RestrictionViolated(
                f"vertex {v!r} is not an {n}-bit string", vertex=v
            )

    # -- Alice ----------------------------------------------------------------

    def apply_alice_move(self, increases: Iterable[tuple[tuple[str, str], Dyadic]]):
        cfg = self.config
        staged: dict[tuple, Dyadic] = {}
        for (u, v), w in increases:
            e = self.edge_key(u, v)
            if e in staged and staged[e] != w:
                raise SymmetryBroken(
                    f"conflicting weights for edge {e} in one move", edge=e
                )
            staged[e] = w

        added: dict[str, Dyadic] = {}
        for e, w in staged.items():
            old = self.weights.get(e, ZERO)
            if w < old:
                raise WeightDecreased(f"edge {e}: {w} < {old}", edge=e)
            if cfg.kind == "restricted":
                for x in e:
                    self._check_restricted_vertex(x)
                if old != ZERO:
                    raise RestrictionViolated(
                        f"edge {e} already carries weight {old}", edge=e
                    )
                if not w.is_pow2():
                    raise RestrictionViolated(f"size {w} not a power of two", edge=e)
                k = -w.log2()
                if k > cfg.n:
                    raise RestrictionViolated(
                        f"size {w} below the 2^-n floor", edge=e
                    )
                # w <= n^-p  <=>  n^p <= 2^k
                if cfg.n**cfg.p > (1 << k):
                    raise RestrictionViolated(
                        f"size {w} above the n^-p ceiling", edge=e
                    )
            delta = w - old
            if delta:
                for x in e:
                    added[x] = added.get(x, ZERO) + delta

        for x, extra in added.items():
            if self.load(x) + extra > cfg.d:
                raise BudgetExceeded(
                    f"vertex {x}: load {self.load(x)} + {extra} exceeds d={cfg.d}",
                    vertex=x,
                )

        # commit
        for e, w in staged.items():
            old = self.weights.get(e, ZERO)
            if e not in self.weights:
                self._register_edge(e)
            self.weights[e] = w
            if w > old and not self._satisfied(e):
                self.unsatisfied.add(e)
        for x, extra in added.items():
            self.vertex_weight[x] = self.load(x) + extra

    # -- Bob --------------------------------------------------------------------

    def apply_bob_move(self, additions: Iterable[tuple[tuple[str, str], ClopenSet]]):
        merged: dict[tuple, ClopenSet] = {}
        for (u, v), add in additions:
            e = self.edge_key(u, v)
            merged[e] = merged.get(e, ClopenSet.empty()).union(add)

        staged: list[tuple[tuple, ClopenSet]] = []
        fresh_at: dict[str, PrefixIndex] = {}
        for e, add in merged.items():
            current = self.labels.get(e)
            effective = add if current is None else add.difference(current)
            if effective.is_empty():
                continue
            for x in e:
                occ = self.occupied_at(x)
                mine = fresh_at.get(x)
                if mine is None:
                    mine = fresh_at[x] = PrefixIndex()
                for z in effective.intervals:
                    if occ.intersects(z):
                        raise DisjointnessBroken(
                            f"vertex {x}: interval [{z}] clashes with existing labels",
                            vertex=x,
                            edge=e,
                        )
                    try:
                        mine.add(z)
                    except ValueError:
                        raise DisjointnessBroken(
                            f"vertex {x}: intervals within one move overlap",
                            vertex=x,
                            edge=e,
                        ) from None
            staged.append((e, effective))

        # commit
        for e, effective in staged:
            current = self.labels.get(e)
            if e not in self.weights and current is None:
                self._register_edge(e)
            self.labels[e] = effective if current is None else current.union(effective)
            for x in e:
                occ = self.occupied_at(x)
                for z in effective.intervals:
                    occ.add(z)
            if e in self.unsatisfied and self._satisfied(e):
                self.unsatisfied.discard(e)

    # -- verdicts ------------------------------------------------------------------

    def winning_status(self) -> dict:
        report = {}
        for e, m in self.weights.items():
            lab = self.labels.get(e, ClopenSet.empty())
            report[e] = {
                "weight": m,
                "nu": lab.nu(),
                "satisfied": self._satisfied(e),
            }
        return {"edges": report, "all_satisfied": not self.unsatisfied}

    def digest(self) -> str:
        h = hashlib.sha256()
        for e in sorted(self.weights):
            h.update(repr(e).encode())
            h.update(str(self.weights[e]).encode())
        for e in sorted(self.labels):
            h.update(repr(e).encode())
            h.update(encode_clopen(self.labels[e]).encode())
        return h.hexdigest()


def _disjoint(a: str, b: str) -> bool:
    return not (a.startswith(b) or b.startswith(a))


# -- moves and strategies -----------------------------------------------------------


@dataclass
class AliceMove:
    increases: list  # [((u, v), Dyadic)]

    def is_pass(self) -> bool:
        return not self.increases


@dataclass
class BobMove:
    additions: list  # [((u, v), ClopenSet)]

    def is_pass(self) -> bool:
        return not self.additions


PASS_A = AliceMove([])
PASS_B = BobMove([])


class Strategy:
    """Interface both players implement.

    ``next_move`` observes the full state (read-only) and returns a move;
    raising StrategyStuck is recorded and treated as a pass from then on.
    """

    name = "strategy"

    def next_move(self, state: GameState):
        raise NotImplementedError

    def stats(self) -> dict:
        return {}


@dataclass
class MatchResult:
    winner: str  # "alice" | "bob"
    reason: str
    moves: int
    summary: dict
    records: list = field(default_factory=list)
    final_digest: str = ""


def _encode_payload(move) -> list:
    if isinstance(move, AliceMove):
        return [[list(e), str(w)] for e, w in move.increases]
    return [[list(e), encode_clopen(cs)] for e, cs in move.additions]


def decode_alice_payload(payload: list) -> AliceMove:
    return AliceMove([((u, v), Dyadic.parse(w)) for (u, v), w in payload])


def decode_bob_payload(payload: list) -> BobMove:
    return BobMove([((u, v), decode_clopen(txt)) for (u, v), txt in payload])


def run_match(
    config: GameConfig,
    alice: Strategy,
    bob: Strategy,
    *,
    record_trace: bool = True,
) -> MatchResult:
    """Alternating play, Alice first, until a violation, a stall, stability,
    or the move horizon.  Deterministic given config and strategy seeds."""
    state = GameState(config)
    records: list[MoveRecord] = []
    stuck: dict[str, str] = {}
    passes_in_row = 0
    winner = reason = None

    for index in range(config.max_moves):
        is_alice = index % 2 == 0
        player, tag = (alice, "A") if is_alice else (bob, "B")
        move = None
        if tag in stuck:
            move = PASS_A if is_alice else PASS_B
        else:
            try:
                move = player.next_move(state)
            except StrategyStuck as exc:
                stuck[tag] = f"{type(exc).__name__}: {exc}"
                move = PASS_A if is_alice else PASS_B
        if move is None:
            move = PASS_A if is_alice else PASS_B

        verdict = "ok"
        try:
            if is_alice:
                if not isinstance(move, AliceMove):
                    raise TypeError("Alice must emit AliceMove")
                state.apply_alice_move(move.increases)
            else:
                if not isinstance(move, BobMove):
                    raise TypeError("Bob must emit BobMove")
                state.apply_bob_move(move.additions)
        except Violation as vio:
            verdict = f"violation:{vio.kind}:{vio}"
            winner = "bob" if is_alice else "alice"
            reason = f"{'alice' if is_alice else 'bob'}-violation:{vio.kind}"
        state.moves = index + 1
        if record_trace:
            records.append(MoveRecord(index, tag, _encode_payload(move), verdict))
        if winner:
            break

        if move.is_pass():
            passes_in_row += 1
        else:
            passes_in_row = 0

        if not is_alice and move.is_pass() and state.unsatisfied:
            winner, reason = "alice", "bob-stalled"
            break
        if passes_in_row >= 2:
            if state.unsatisfied:
                winner, reason = "alice", "bob-stalled"
            else:
                winner, reason = "bob", "stable"
            break
    else:
        winner = "bob" if not state.unsatisfied else "alice"
        reason = "max-moves"

    summary = {
        "winner": winner,
        "reason": reason,
        "moves": state.moves,
        "max_vertex_load": str(max(state.vertex_weight.values(), default=ZERO)),
        "edges": len(state.weights),
        "unsatisfied": len(state.unsatisfied),
        "stuck": stuck,
        "alice_stats": alice.stats(),
        "bob_stats": bob.stats(),
    }
    return MatchResult(winner, reason, state.moves, summary, records, state.digest())


# -- traces ---------------------------------------------------------------------


def write_trace(path, config: GameConfig, result: MatchResult) -> None:
    with open(path, "w", encoding="ascii") as fh:
        header = {"config": config.to_json(), "winner": result.winner, "reason": result.reason}
        fh.write(json.dumps(header, sort_keys=True, separators=(",", ":")) + "\n")
        for rec in result.records:
            fh.write(rec.to_line() + "\n")


def read_trace(path) -> tuple[GameConfig, dict, list[MoveRecord]]:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    header = json.loads(lines[0])
    config = GameConfig.from_json(header["config"])
    return config, header, [MoveRecord.from_line(ln) for ln in lines[1:]]


def replay(config: GameConfig, records: list[MoveRecord]) -> GameState:
    """Re-apply a trace through a fresh referee, re-checking every rule.

    Raises Violation on any record whose verdict claimed "ok" but fails, and
    ValueError when a recorded violation does not reproduce.
    """
    state = GameState(config)
    for rec in records:
        move = (
            decode_alice_payload(rec.payload)
            if rec.player == "A"
            else decode_bob_payload(rec.payload)
        )
        try:
            if rec.player == "A":
                state.apply_alice_move(move.increases)
            else:
                state.apply_bob_move(move.additions)
        except Violation as vio:
            if rec.verdict == "ok":
                raise
            if not rec.verdict.startswith(f"violation:{vio.kind}"):
                raise ValueError(
                    f"record {rec.index}: expected {rec.verdict}, got {vio.kind}"
                )
            continue
        if rec.verdict != "ok":
            raise ValueError(
                f"record {rec.index}: recorded {rec.verdict} did not reproduce"
            )
        state.moves = rec.index + 1
    return state


def verify_trace(path) -> dict:
    """Offline re-check of a trace file; returns a report dict."""
    config, header, records = read_trace(path)
    state = replay(config, records)
    status = state.winning_status()
    return {
        "records": len(records),
        "digest": state.digest(),
        "all_satisfied": status["all_satisfied"],
        "header": header,
    }
