"""Alice's staged winning strategy for the equivalent game (budget d, c = 1).

The play is organized in N = 2/d stages with request sizes eps[0..N], where
eps[N] = d/2 and consecutive sizes differ by the factor d/2.  Alice keeps a
set of active vertices; a stage-i substage spends weight eps[i-1] on the
edges of vertex-disjoint stars, waits until Bob matches them, and from each
star takes the first leaf (in leaf order) whose matched interval escapes the
current everywhere-dirty zone.  Those witness intervals are binned by the
enclosing eps[i]-grid interval; the fullest bin's interval J joins the zone
and only its leaves stay active.  Each completed substage therefore grows
the zone by one eps[i]-interval while charging every surviving vertex just
eps[i-1]; after stage i the zone has measure at least i*d/2, and after stage
N a final request of weight d/2 between two surviving vertices cannot be
matched anywhere.

Guaranteed play sizes stars by backward induction (``required_vertices``);
the induction multiplies by roughly 2/d^2 per substage, which is why only
very large d admits full guaranteed runs on real hardware.  For smaller d a
configured ``harvest_target`` bounds how many surviving vertices a substage
waits for; the strategy's local invariants still hold and are asserted, but
the supply of active vertices can run out, which surfaces as
InsufficientActiveVertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .cantor import ClopenSet
from .dyadic import Dyadic, ONE, ZERO
from .referee import AliceMove, GameState, PASS_A, Strategy, StrategyStuck


class InsufficientActiveVertices(StrategyStuck):
    pass


class ProtocolDesync(RuntimeError):
    """Bob satisfied an edge in a way the bookkeeping rules out."""


@dataclass(frozen=True)
class Schedule:
    d: Dyadic
    stages: int
    eps: tuple[Dyadic, ...]  # eps[0..stages]


def eps_schedule(d: Dyadic, *, allow_full_budget: bool = False) -> Schedule:
    """eps[N] = d/2, eps[i-1] = eps[i] * d/2, N = 2/d stages."""
    if not d.is_pow2():
        raise ValueError(f"d must be a power of two, got {d}")
    if d > Dyadic(1, 1) and not (allow_full_budget and d == ONE):
        raise ValueError("d must be <= 1/2 (d = 1 only with allow_full_budget)")
    stages = Dyadic(2).ratio(d)
    half = Dyadic(d.num, d.exp + 1)
    eps = [ZERO] * (stages + 1)
    eps[stages] = half
    for i in range(stages, 0, -1):
        eps[i - 1] = eps[i] * half
    assert half.scaled(stages) == ONE
    return Schedule(d, stages, tuple(eps))


def required_vertices(d: Dyadic, *, allow_full_budget: bool = False) -> int:
    """Active vertices that guarantee the full plan by backward induction.

    Working backwards from two survivors, a stage-i substage that must
    retain K vertices needs ceil(K/eps[i]) stars of 1 + (d/2)/eps[i-1]
    vertices each; every stage i runs (d/2)/eps[i] substages.  The result
    grows beyond machine words already at d = 1/2, which is why it is exact
    integer arithmetic here and a bignum in configs.
    """
    sched = eps_schedule(d, allow_full_budget=allow_full_budget)
    half = Dyadic(d.num, d.exp + 1)
    need = 2
    for i in range(sched.stages, 0, -1):
        substages = half.ratio(sched.eps[i])
        star_size = 1 + half.ratio(sched.eps[i - 1])
        grid = Dyadic(1).ratio(sched.eps[i])
        for _ in range(substages):
            stars = need * grid  # ceil(K/eps_i) is exact: eps_i = 2^-k
            need = stars * star_size
    return need


def required_vertices_log2_floor(d: Dyadic) -> int:
    """Integer lower bound on log2(required_vertices(d)).

    Already at d = 1/4 the exact requirement has tens of millions of digits,
    so monotonicity statements compare these bounds instead of the values.
    """
    sched = eps_schedule(d, allow_full_budget=d == ONE)
    half = Dyadic(d.num, d.exp + 1)
    bits = 1  # the two survivors
    for i in range(sched.stages, 0, -1):
        substages = half.ratio(sched.eps[i])
        star_size = 1 + half.ratio(sched.eps[i - 1])
        grid_log = -sched.eps[i].log2()
        bits += substages * (grid_log + star_size.bit_length() - 1)
    return bits


# -- dirtiness ------------------------------------------------------------------

def dirty_set(
    state: GameState,
    x: str,
    eps: Dyadic,
    active: frozenset | set,
    *,
    toward_any: bool = False,
) -> ClopenSet:
    """Grid eps-intervals meeting Bob's labels on edges from x.

    Non-bipartite dirtiness counts only edges toward inactive partners;
    the bipartite variant (``toward_any``) counts every edge at the vertex.
    """
    pieces: list[str] = []
    for e in state.edges_of(x):
        other = e[0] if e[1] == x else e[1]
        if not toward_any and other in active:
            continue
        lab = state.labels.get(e)
        if lab:
            pieces.extend(lab.intervals)
    if not pieces:
        return ClopenSet.empty()
    return ClopenSet(pieces).eps_neighborhood(eps)


def everywhere_dirty(
    state: GameState,
    active: list[str],
    eps: Dyadic,
    *,
    toward_any: bool = False,
) -> ClopenSet:
    """Intersection of dirty sets over all active vertices (active nonempty)."""
    if not active:
        raise ValueError("everywhere_dirty needs a nonempty active set")
    act = frozenset(active)
    out: Optional[ClopenSet] = None
    for x in active:
        d = dirty_set(state, x, eps, act, toward_any=toward_any)
        out = d if out is None else out.intersection(d)
        if out.is_empty():
            break
    return out


def _nu_witness(lab: ClopenSet) -> str:
    """Lexicographically least largest whole interval of a nonempty label."""
    best_len = min(len(z) for z in lab.intervals)
    return next(z for z in lab.intervals if len(z) == best_len)


# -- the strategy ------------------------------------------------------------------


@dataclass(frozen=True)
class StageAliceConfig:
    d: Dyadic
    vertex_budget: Optional[int] = None  # None -> required_vertices(d)
    harvest_target: Optional[int] = None  # None -> backward-induction targets
    bipartite: bool = False
    allow_full_budget: bool = False
    allow_small_d: bool = False  # d < 2^-4 explodes the vertex budget
    check_invariants: bool = True


class StageAlice(Strategy):
    name = "stages"

    def __init__(self, config: StageAliceConfig):
        self.cfg = config
        if config.d < Dyadic(1, 4) and not config.allow_small_d:
            raise ValueError("d < 2^-4 refused by default: vertex budget explodes")
        self.schedule = eps_schedule(config.d, allow_full_budget=config.allow_full_budget)
        self.half = Dyadic(config.d.num, config.d.exp + 1)
        if config.vertex_budget is not None:
            self.budget = config.vertex_budget
        elif config.d >= Dyadic(1, 1):
            self.budget = required_vertices(
                config.d, allow_full_budget=config.allow_full_budget
            )
        else:
            # below d = 1/2 the guaranteed budget cannot even be written down
            self.budget = None
        self.stage = 1
        self.zoneA = ClopenSet.empty()
        self.zoneB = ClopenSet.empty()
        self.actives: Optional[list[str]] = None  # None = untouched fresh pool
        self.spent: dict[str, Dyadic] = {}
        self._pool_next = 0
        self._left_next = 0  # bipartite star centers / finale partner
        self.pending: Optional[tuple[str, list[str]]] = None
        self.buckets: dict[str, list[str]] = {}
        self.substages_done = 0  # within the current stage
        self.phase = "play"
        self.stage_growth: list[Dyadic] = []
        self.stars_emitted = 0
        self.note = ""

    # -- vertex supply -------------------------------------------------------

    def _fresh(self) -> str:
        if self.budget is not None and self._pool_next >= self.budget:
            raise InsufficientActiveVertices(
                f"vertex budget {self.budget} exhausted"
            )
        vid = self._pool_next
        self._pool_next += 1
        prefix = "R" if self.cfg.bipartite else "v"
        return f"{prefix}{vid:012d}"

    def _fresh_left(self) -> str:
        vid = self._left_next
        self._left_next += 1
        return f"L{vid:012d}"

    def _take_actives(self, count: int) -> list[str]:
        if self.actives is None:
            return [self._fresh() for _ in range(count)]
        if len(self.actives) < count:
            raise InsufficientActiveVertices(
                f"substage needs {count} active vertices, only "
                f"{len(self.actives)} retained"
            )
        taken, self.actives = self.actives[:count], self.actives[count:]
        return taken

    # -- plan targets ------------------------------------------------------------

    def _target(self) -> int:
        if self.cfg.harvest_target is not None:
            return max(2, self.cfg.harvest_target)
        sched, half = self.schedule, self.half
        need = 2
        for i in range(sched.stages, self.stage - 1, -1):
            total = half.ratio(sched.eps[i])
            steps = total if i > self.stage else total - self.substages_done - 1
            star_size = 1 + half.ratio(sched.eps[i - 1])
            grid = Dyadic(1).ratio(sched.eps[i])
            for _ in range(max(0, steps)):
                need = need * grid * star_size
        return max(2, need)

    # -- move machine ----------------------------------------------------------------

    def next_move(self, state: GameState):
        if self.phase != "play":
            return PASS_A
        if self.pending is not None:
            if self._pending_satisfied(state):
                self._harvest(state)
            else:
                return PASS_A  # wait for Bob; stalling loses for him
        while True:
            bucket_max = max((len(v) for v in self.buckets.values()), default=0)
            if self.buckets and bucket_max >= self._target():
                self._close_substage(state)
                continue
            if not self.buckets and self._stage_goal_met(state):
                self._advance_stage(state)
                if self.stage > self.schedule.stages:
                    return self._finale(state)
                continue
            return self._emit_star(state)

    # -- substage mechanics ------------------------------------------------------------

    def _emit_star(self, state: GameState):
        i = self.stage
        eps_req = self.schedule.eps[i - 1]
        leaves_n = self.half.ratio(eps_req)
        if self.cfg.bipartite:
            center = self._fresh_left()
            leaves = self._take_actives(leaves_n)
        else:
            center, *leaves = self._take_actives(1 + leaves_n)
        self.pending = (center, leaves)
        self.stars_emitted += 1
        return AliceMove([((center, leaf), eps_req) for leaf in leaves])

    def _pending_satisfied(self, state: GameState) -> bool:
        center, leaves = self.pending
        return all(
            state.edge_key(center, leaf) not in state.unsatisfied for leaf in leaves
        )

    def _harvest(self, state: GameState):
        center, leaves = self.pending
        self.pending = None
        i = self.stage
        eps_req, eps_zone = self.schedule.eps[i - 1], self.schedule.eps[i]
        depth = -eps_zone.log2()
        witness_leaf = witness = None
        for leaf in leaves:
            lab = state.label(center, leaf)
            w = _nu_witness(lab)
            if self.cfg.check_invariants:
                if Dyadic(1, len(w)) < eps_req:
                    raise ProtocolDesync(
                        f"edge ({center},{leaf}) satisfied below size {eps_req}"
                    )
                if not all(_disjoint(w, z) for z in self.zoneA.intervals):
                    raise ProtocolDesync(
                        f"star interval [{w}] intersects last stage's zone"
                    )
            if not self.zoneB.contains_interval(w):
                witness_leaf, witness = leaf, w
                break
        if witness_leaf is None:
            raise ProtocolDesync(
                "no star interval escaped the dirty zone although the stage "
                "goal is unmet"
            )
        if len(witness) >= depth:
            J = witness[:depth]  # cannot be in the zone: it contains the witness
        else:
            # Bob over-satisfied with an interval spanning several grid cells;
            # take the leftmost cell that the zone does not already hold.
            J = next(
                witness + format(idx, f"0{depth - len(witness)}b")
                for idx in range(1 << (depth - len(witness)))
                if not self.zoneB.contains_interval(
                    witness + format(idx, f"0{depth - len(witness)}b")
                )
            )
        self.buckets.setdefault(J, []).append(witness_leaf)

    def _close_substage(self, state: GameState):
        J = max(self.buckets, key=lambda j: (len(self.buckets[j]), _lex_neg(j)))
        retained = self.buckets[J]
        self.buckets = {}
        self.actives = retained
        eps_req = self.schedule.eps[self.stage - 1]
        new_spent = {}
        for leaf in retained:
            new_spent[leaf] = self.spent.get(leaf, ZERO) + eps_req
            if new_spent[leaf] > self.half:
                raise AssertionError(
                    f"active vertex {leaf} spent {new_spent[leaf]} > d/2"
                )
        self.spent = new_spent
        self.zoneB = self.zoneB.union(ClopenSet([J]))
        self.substages_done += 1
        if self.cfg.check_invariants:
            self._assert_zone_dirty(state)

    def _assert_zone_dirty(self, state: GameState):
        computed = everywhere_dirty(
            state, self.actives, self.schedule.eps[self.stage],
            toward_any=self.cfg.bipartite,
        )
        for z in self.zoneB.intervals:
            if not computed.contains_interval(z):
                raise AssertionError(
                    f"recorded dirty interval [{z}] is not dirty for every "
                    "current active vertex"
                )
        self.zoneB = computed  # granularity effects may only enlarge it

    def _stage_goal_met(self, state: GameState) -> bool:
        if self.actives is None:
            return False  # nothing is dirty for a fresh pool
        self.zoneB = everywhere_dirty(
            state, self.actives, self.schedule.eps[self.stage],
            toward_any=self.cfg.bipartite,
        )
        return self.zoneB.measure() - self.zoneA.measure() >= self.half

    def _advance_stage(self, state: GameState):
        growth = self.zoneB.measure() - self.zoneA.measure()
        self.stage_growth.append(growth)
        if self.cfg.check_invariants and growth < self.half:
            raise AssertionError(f"stage {self.stage} grew the zone by {growth} < d/2")
        self.zoneA = self.zoneB
        self.stage += 1
        self.substages_done = 0
        if self.stage <= self.schedule.stages:
            self.zoneB = everywhere_dirty(
                state, self.actives, self.schedule.eps[self.stage],
                toward_any=self.cfg.bipartite,
            )

    def _finale(self, state: GameState):
        self.phase = "finale"
        if self.cfg.bipartite:
            if not self.actives:
                raise InsufficientActiveVertices("no right vertex survived")
            u, v = self._fresh_left(), self.actives[0]
        else:
            if self.actives is None or len(self.actives) < 2:
                raise InsufficientActiveVertices("fewer than two survivors")
            u, v = self.actives[0], self.actives[1]
        self.note = f"final request ({u},{v}) weight {self.half}"
        return AliceMove([((u, v), self.half)])

    def stats(self) -> dict:
        return {
            "stage": self.stage,
            "stars": self.stars_emitted,
            "substages_done": self.substages_done,
            "zoneA": str(self.zoneA.measure()),
            "zoneB": str(self.zoneB.measure()),
            "stage_growth": [str(g) for g in self.stage_growth],
            "max_active_spend": str(max(self.spent.values(), default=ZERO)),
            "vertices_used": self._pool_next,
            "note": self.note,
        }


def _disjoint(a: str, b: str) -> bool:
    return not (a.startswith(b) or b.startswith(a))


def _lex_neg(j: str):
    # tie-break: prefer lexicographically least J at equal bucket size
    return tuple(-ord(c) for c in j)
