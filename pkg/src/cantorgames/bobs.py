"""Bob's simple allocation strategies.

All three play the same basic move: for every unsatisfied edge, place one
grid interval of the required size that is free at both endpoint strings,
lexicographically least among the candidates the strategy permits.

* GreedyFixed searches the whole space; it provably never fails when all
  requests share one size and per-vertex loads stay within d <= 1/2.
* RegionsStatic confines each request size to a pre-committed region of the
  space, identical for every string.
* RegionsDynamic assigns regions to sizes on demand, adding a region each
  time the maximal per-string load of a size crosses half of that size's
  assigned measure (2s regions suffice when the concentrated load is <= 1/4).
"""

from __future__ import annotations

from collections import deque

from .cantor import ClopenSet, PrefixIndex, carve, find_free_slot
from .dyadic import Dyadic, ZERO
from .referee import BobMove, GameState, PASS_B, Strategy, StrategyStuck


class NoFreeInterval(StrategyStuck):
    pass


class NoUnassignedRegion(StrategyStuck):
    pass


class RegionUndefined(StrategyStuck):
    pass


class ScriptExhausted(StrategyStuck):
    pass


def ceil_pow2(d: Dyadic) -> Dyadic:
    """Smallest power of two >= d (d > 0)."""
    if not d:
        raise ValueError("no positive power of two below zero")
    if d.is_pow2():
        return d
    return Dyadic.pow2(d.num.bit_length() - d.exp)


def required_size(state: GameState, edge: tuple) -> Dyadic:
    """Interval size Bob must add so that nu(M) >= c*m holds for the edge."""
    return ceil_pow2(state.config.c * state.weights[edge])


class _Overlay:
    """Per-move scratch occupancy so one Bob move stays self-consistent."""

    def __init__(self, state: GameState):
        self.state = state
        self.extra: dict[str, PrefixIndex] = {}

    def indexes(self, v: str) -> list[PrefixIndex]:
        ix = self.extra.get(v)
        if ix is None:
            ix = self.extra[v] = PrefixIndex()
        return [self.state.occupied_at(v), ix]

    def claim(self, u: str, v: str, slot: str) -> None:
        self.extra[u].add(slot)
        self.extra[v].add(slot)


class GreedyFixed(Strategy):
    name = "greedy-fixed"

    def next_move(self, state: GameState):
        pending = sorted(state.unsatisfied)
        if not pending:
            return PASS_B
        overlay = _Overlay(state)
        additions = []
        for e in pending:
            size = required_size(state, e)
            depth = -size.log2()
            u, v = e
            slot = find_free_slot(overlay.indexes(u) + overlay.indexes(v), depth)
            if slot is None:
                raise NoFreeInterval(f"no {size} interval free at both of {e}")
            overlay.claim(u, v, slot)
            additions.append((e, ClopenSet([slot])))
        return BobMove(additions)


class RegionsStatic(Strategy):
    """Static size->region partition, the same for every string.

    `plan` maps each admissible request size to its region measure P(size);
    regions are carved from the space left to right in the given order.
    """

    name = "regions-static"

    def __init__(self, plan: dict[Dyadic, Dyadic]):
        total = ZERO
        for share in plan.values():
            total = total + share
        if total > Dyadic(1):
            raise ValueError("region shares exceed the whole space")
        self.regions: dict[Dyadic, ClopenSet] = {}
        remaining = ClopenSet.whole()
        for size, share in plan.items():
            region = carve(remaining, share)
            self.regions[size] = region
            remaining = remaining.difference(region)

    def next_move(self, state: GameState):
        pending = sorted(state.unsatisfied)
        if not pending:
            return PASS_B
        overlay = _Overlay(state)
        additions = []
        for e in pending:
            size = required_size(state, e)
            region = self.regions.get(size)
            if region is None:
                raise RegionUndefined(f"no region for size {size}")
            u, v = e
            slot = _slot_in(region, overlay, u, v, -size.log2())
            if slot is None:
                raise NoFreeInterval(f"size-{size} region exhausted for {e}")
            overlay.claim(u, v, slot)
            additions.append((e, ClopenSet([slot])))
        return BobMove(additions)


def _slot_in(region: ClopenSet, overlay: _Overlay, u: str, v: str, depth: int):
    indexes = overlay.indexes(u) + overlay.indexes(v)
    for base in region.intervals:
        if len(base) > depth:
            continue
        slot = find_free_slot(indexes, depth, base)
        if slot is not None:
            return slot
    return None


class RegionsDynamic(Strategy):
    """2s equal regions handed to sizes on demand.

    A size receives its first region when first requested, and another
    whenever its maximal per-string load reaches half of its assigned
    measure (either by the load trigger or because an allocation found no
    free slot, which implies the same load bound).
    """

    name = "regions-dynamic"

    def __init__(self, s: int):
        if s < 1:
            raise ValueError("need s >= 1")
        self.s = s
        depth = (2 * s - 1).bit_length()  # least k with 2^k >= 2s
        self.region_prefix = [format(i, f"0{depth}b") for i in range(2 * s)]
        self.region_measure = Dyadic(1, depth)
        self.unassigned = deque(range(2 * s))
        self.assigned: dict[Dyadic, list[int]] = {}
        self.load: dict[tuple[str, Dyadic], Dyadic] = {}
        self.load_max: dict[Dyadic, Dyadic] = {}

    def _assign(self, size: Dyadic, *, required: bool = True) -> bool:
        if not self.unassigned:
            if required:
                raise NoUnassignedRegion(f"all {2 * self.s} regions assigned")
            return False  # load trigger is advisory; fail only on a real need
        self.assigned.setdefault(size, []).append(self.unassigned.popleft())
        return True

    def _assigned_measure(self, size: Dyadic) -> Dyadic:
        return self.region_measure.scaled(len(self.assigned.get(size, ())))

    def next_move(self, state: GameState):
        pending = sorted(state.unsatisfied)
        if not pending:
            return PASS_B
        overlay = _Overlay(state)
        additions = []
        for e in pending:
            size = required_size(state, e)
            if size not in self.assigned:
                self._assign(size)
            depth = -size.log2()
            u, v = e
            slot = self._find(size, overlay, u, v, depth)
            if slot is None:
                # every slot blocked at u or v: per-string load has reached
                # half the assigned measure, which licenses a fresh region
                self._assign(size)
                slot = self._find(size, overlay, u, v, depth)
                if slot is None:
                    raise NoFreeInterval(f"no slot for {e} even in a fresh region")
            overlay.claim(u, v, slot)
            additions.append((e, ClopenSet([slot])))
            for x in (u, v):
                w = self.load.get((x, size), ZERO) + size
                self.load[(x, size)] = w
                if w > self.load_max.get(size, ZERO):
                    self.load_max[size] = w
            while self.load_max[size] + self.load_max[size] > self._assigned_measure(size):
                if not self._assign(size, required=False):
                    break
        return BobMove(additions)

    def _find(self, size, overlay, u, v, depth):
        indexes = overlay.indexes(u) + overlay.indexes(v)
        for rid in self.assigned.get(size, ()):
            base = self.region_prefix[rid]
            if len(base) > depth:
                continue
            slot = find_free_slot(indexes, depth, base)
            if slot is not None:
                return slot
        return None

    def stats(self) -> dict:
        return {
            "regions_assigned": sum(len(v) for v in self.assigned.values()),
            "regions_total": 2 * self.s,
        }


class Scripted(Strategy):
    """Replays a fixed move list verbatim; the referee still checks legality."""

    name = "scripted"

    def __init__(self, moves: list[BobMove], *, strict: bool = False):
        self.moves = list(moves)
        self.cursor = 0
        self.strict = strict

    def next_move(self, state: GameState):
        if self.cursor >= len(self.moves):
            if self.strict:
                raise ScriptExhausted(f"script ended after {self.cursor} moves")
            return PASS_B
        move = self.moves[self.cursor]
        self.cursor += 1
        return move


class PassBob(Strategy):
    name = "pass"

    def next_move(self, state: GameState):
        return PASS_B


class PassAlice(Strategy):
    name = "pass"

    def next_move(self, state: GameState):
        from .referee import PASS_A

        return PASS_A
