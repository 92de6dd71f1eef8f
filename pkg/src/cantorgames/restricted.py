"""Bob's winning strategy for the restricted game.

The game runs on n-bit strings with c = 1; request sizes are powers of two
between 2^-n and n^-p, each edge raised from zero exactly once, and every
string's total weight stays within d.

Geometry per string u (all within the shared Cantor space, but accounted in
u's copy):

* top half [0]: ``ell`` equal blocks, grouped into r regions by a per-string
  coloring; each request size has one active color per string, rotated when
  an eighth of its blocks fill up.
* bottom half [1]: ``bottom_regions`` equal regions, identical for all
  strings, each split into ``s`` equal blocks that the string's dominance
  pattern marks dominant or submissive.

A request ({x, y}, eps) first looks for a common non-full block in the two
active top regions.  When none exists, the strategy blames the endpoint for
which at least half of the common blocks are full (ties to the
lexicographically smaller string) and reroutes the interval into a bottom
block that is submissive for the blamed string and dominant non-full for the
other.  Rerouting capacity rests on the pairwise dominance margin; its
failure modes are hard assertion errors, not graceful passes, because the
accounting says they cannot happen.

Structures come either from a pre-verified family (small universes) or are
drawn per string from a seeded generator with the same rejection bounds
(large universes, where a shared small family would force colliding
patterns).  Either way every load-bearing property is asserted at runtime.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Optional

import numpy as np


def _hash_stream(tag: str, nbytes: int) -> bytes:
    """Deterministic byte stream: SHA-256 in counter mode over the tag."""
    out = bytearray()
    counter = 0
    seed = tag.encode()
    while len(out) < nbytes:
        out += hashlib.sha256(seed + counter.to_bytes(4, "big")).digest()
        counter += 1
    return bytes(out[:nbytes])

from .cantor import ClopenSet, find_free_slot
from .dyadic import Dyadic, ZERO
from .families import ColoringFamily, DominanceFamily
from .referee import AliceMove, BobMove, GameState, PASS_A, PASS_B, Strategy


class HardFailure(AssertionError):
    """Accounting says this cannot happen; if it does, the run is invalid."""


class NoInactiveColorLeft(HardFailure):
    pass


class NoCandidateBlock(HardFailure):
    pass


class NoFreeIntervalInBlock(HardFailure):
    pass


class NoBottomRegionLeft(HardFailure):
    pass


def legal_size_exponents(n: int, p: int) -> list[int]:
    """Exponents k with 2^-n <= 2^-k <= n^-p, smallest k first."""
    return [k for k in range(1, n + 1) if n**p <= (1 << k)]


def _floor(d: Dyadic) -> int:
    return d.num >> d.exp


@dataclass(frozen=True)
class RestrictedBobConfig:
    n: int
    p: int = 6
    d: Dyadic = Dyadic(1, 7)
    r: int = 8  # top colors (scaled; full scale would use 2n)
    ell: int = 4096  # top blocks (scaled; full scale would use 2^10 n^4)
    bottom_regions: int = 8
    s: int = 1024  # bottom blocks per region (scaled; full scale 64n)
    seed: int = 0
    monitor: bool = True
    enforce_certificate: bool = True
    blame_cap: int = 0  # defaults to 256 n^3
    family: Optional[ColoringFamily] = None
    dominance: Optional[DominanceFamily] = None

    def __post_init__(self):
        if self.blame_cap == 0:
            object.__setattr__(self, "blame_cap", 256 * self.n**3)

    def certificate(self) -> dict:
        """Machine-checked inequalities behind the strategy's guarantees."""
        ks = legal_size_exponents(self.n, self.p)
        block_depth = 1 + _log2(self.ell)
        bottom_depth = 1 + _log2(self.bottom_regions) + _log2(self.s)
        full_quota = _floor(self.d.scaled(64 * self.r))
        checks = {
            "sizes_exist": bool(ks),
            "geometry_pow2": True,  # _log2 raised otherwise
            # a top block must hold two of the largest requests
            "top_block_holds_requests": ks and block_depth <= ks[0] - 1,
            "bottom_block_holds_requests": ks and bottom_depth <= ks[0] - 1,
            # colors ever full (<= 64 r d) plus one active color per size fit in r
            "top_color_budget": full_quota + len(ks) <= self.r,
            # the bottom analogue only holds strictly below 2^-7; at the
            # boundary it is asserted dynamically instead
            "bottom_region_budget_static": self.d.scaled(128) < Dyadic(1),
            "d_within_regime": self.d <= Dyadic(1, 7),
        }
        return checks

    def validate(self) -> None:
        checks = self.certificate()
        hard = ("sizes_exist", "top_block_holds_requests",
                "bottom_block_holds_requests", "top_color_budget",
                "d_within_regime")
        if self.enforce_certificate:
            failed = [k for k in hard if not checks[k]]
            if failed:
                raise ValueError(f"restricted-game certificate failed: {failed}")


def _log2(x: int) -> int:
    if x < 1 or x & (x - 1):
        raise ValueError(f"{x} is not a power of two")
    return x.bit_length() - 1


class _StringState:
    """Per-string bookkeeping: coloring, pattern, active colors, fullness."""

    __slots__ = (
        "colors", "pattern", "classes", "active", "used_colors",
        "ever_full_colors", "top_alloc", "top_full", "full_per_color",
        "bottom_active", "bottom_used", "bottom_alloc", "dom_full",
        "blames", "registry_row",
    )

    def __init__(self, colors: np.ndarray, pattern: np.ndarray, registry_row: int):
        self.colors = colors
        self.pattern = pattern
        self.classes: dict[int, np.ndarray] = {}
        self.active: dict[int, int] = {}  # size exponent -> color
        self.used_colors: set[int] = set()
        self.ever_full_colors: set[int] = set()
        self.top_alloc: dict[int, Dyadic] = {}
        self.top_full: set[int] = set()
        self.full_per_color: dict[int, int] = {}
        self.bottom_active = 0
        self.bottom_used = 1
        self.bottom_alloc: dict[tuple[int, int], Dyadic] = {}
        self.dom_full: dict[int, int] = {}
        self.blames = 0
        self.registry_row = registry_row

    def class_blocks(self, color: int) -> np.ndarray:
        got = self.classes.get(color)
        if got is None:
            got = np.flatnonzero(self.colors == color)
            self.classes[color] = got
        return got


class RestrictedBob(Strategy):
    name = "restricted"

    def __init__(self, config: RestrictedBobConfig):
        config.validate()
        self.cfg = config
        self.block_bits = _log2(config.ell)
        self.block_size = Dyadic(1, 1 + self.block_bits)
        self.region_bits = _log2(config.bottom_regions)
        self.bblock_bits = _log2(config.s)
        self.bblock_size = Dyadic(1, 1 + self.region_bits + self.bblock_bits)
        self.strings: dict[str, _StringState] = {}
        self.registry: list[np.ndarray] = []  # colorings of realized strings
        self.blame_log: list[tuple[str, str, str, int]] = []
        self.monitor_max = 0
        self.full_quota = _floor(config.d.scaled(64 * config.r))

    # -- per-string structures -------------------------------------------------

    def _make_string(self, x: str) -> _StringState:
        cfg = self.cfg
        if cfg.family is not None:
            idx = int(x, 2) % cfg.family.params.members
            colors = cfg.family.matrix[idx]
        else:
            colors = self._draw_coloring(x)
        if cfg.dominance is not None:
            didx = int(x[::-1], 2) % cfg.dominance.params.members
            pattern = cfg.dominance.patterns[didx]
        else:
            pattern = self._draw_pattern(x)
        st = _StringState(colors, pattern, len(self.registry))
        self.registry.append(colors)
        return st

    def _draw_coloring(self, x: str) -> np.ndarray:
        cfg = self.cfg
        if cfg.r & (cfg.r - 1):
            raise ValueError("per-string colorings need r to be a power of two")
        lo = -(-cfg.ell // (2 * cfg.r))  # ceil(ell / 2r)
        hi = 2 * cfg.ell // cfg.r
        for attempt in range(64):
            raw = _hash_stream(f"{cfg.seed}|top|{attempt}|{x}", cfg.ell)
            colors = (np.frombuffer(raw, dtype=np.uint8) & (cfg.r - 1)).copy()
            counts = np.bincount(colors, minlength=cfg.r)
            if counts.min() >= lo and counts.max() <= hi:
                return colors
        raise HardFailure(f"no admissible coloring for {x} in 64 draws")

    def _draw_pattern(self, x: str) -> np.ndarray:
        cfg = self.cfg
        for attempt in range(64):
            raw = _hash_stream(f"{cfg.seed}|dom|{attempt}|{x}", (cfg.s + 7) // 8)
            pattern = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[: cfg.s]
            ones = int(pattern.sum())
            if cfg.s // 4 <= ones <= 3 * cfg.s // 4:
                return pattern
        raise HardFailure(f"no admissible dominance pattern for {x} in 64 draws")

    def _string(self, x: str) -> _StringState:
        st = self.strings.get(x)
        if st is None:
            st = self.strings[x] = self._make_string(x)
        return st

    # -- active colors -----------------------------------------------------------

    def _active_color(self, x: str, st: _StringState, k: int) -> int:
        color = st.active.get(k)
        if color is None:
            color = self._fresh_color(x, st)
            st.active[k] = color
        return color

    def _fresh_color(self, x: str, st: _StringState) -> int:
        for color in range(self.cfg.r):
            if color not in st.used_colors:
                st.used_colors.add(color)
                return color
        raise NoInactiveColorLeft(f"string {x} exhausted its {self.cfg.r} colors")

    # -- main move --------------------------------------------------------------

    def next_move(self, state: GameState):
        pending = sorted(state.unsatisfied)
        if not pending:
            return PASS_B
        additions = []
        for e in pending:
            x, y = e
            eps = state.weights[e]
            slot = self._allocate(state, x, y, -eps.log2())
            additions.append((e, ClopenSet([slot])))
        return BobMove(additions)

    def _allocate(self, state: GameState, x: str, y: str, k: int) -> str:
        sx, sy = self._string(x), self._string(y)
        a = self._active_color(x, sx, k)
        b = self._active_color(y, sy, k)
        common = np.intersect1d(sx.class_blocks(a), sy.class_blocks(b), assume_unique=True)
        chosen = -1
        for i in common:
            i = int(i)
            if i not in sx.top_full and i not in sy.top_full:
                chosen = i
                break
        if chosen >= 0:
            slot = self._top_slot(state, x, y, chosen, k)
            self._note_top(x, sx, chosen, Dyadic(1, k), k)
            self._note_top(y, sy, chosen, Dyadic(1, k), k)
            return slot
        blamed = self._blame(x, sx, y, sy, a, b, common, k)
        return self._second_allocate(state, x, y, k, blamed)

    def _top_slot(self, state: GameState, x: str, y: str, block: int, k: int) -> str:
        base = "0" + format(block, f"0{self.block_bits}b")
        slot = find_free_slot([state.occupied_at(x), state.occupied_at(y)], k, base)
        if slot is None:
            raise NoFreeIntervalInBlock(
                f"non-full common block {block} had no free 2^-{k} slot"
            )
        return slot

    def _note_top(self, x: str, st: _StringState, block: int, eps: Dyadic, k: int):
        st.top_alloc[block] = st.top_alloc.get(block, ZERO) + eps
        if block not in st.top_full and st.top_alloc[block] + st.top_alloc[block] >= self.block_size:
            st.top_full.add(block)
            color = int(st.colors[block])
            st.full_per_color[color] = st.full_per_color.get(color, 0) + 1
            self._maybe_rotate(x, st, color)

    def _maybe_rotate(self, x: str, st: _StringState, color: int):
        size_k = next((kk for kk, c in st.active.items() if c == color), None)
        if size_k is None:
            return
        class_size = len(st.class_blocks(color))
        if 8 * st.full_per_color.get(color, 0) >= class_size:
            st.ever_full_colors.add(color)
            if len(st.ever_full_colors) > self.full_quota:
                raise HardFailure(
                    f"string {x}: {len(st.ever_full_colors)} colors filled, "
                    f"quota 64*r*d = {self.full_quota}"
                )
            st.active[size_k] = self._fresh_color(x, st)

    # -- blame and the second substrategy ------------------------------------------

    def _blame(self, x, sx, y, sy, a, b, common, k) -> str:
        fx = sum(1 for i in common if int(i) in sx.top_full)
        fy = sum(1 for i in common if int(i) in sy.top_full)
        half = len(common)
        x_qualifies = 2 * fx >= half
        y_qualifies = 2 * fy >= half
        if x_qualifies and y_qualifies:
            blamed = min(x, y)
        elif x_qualifies:
            blamed = x
        else:
            blamed = y
        st = sx if blamed == x else sy
        st.blames += 1
        if st.blames > self.cfg.blame_cap:
            raise HardFailure(
                f"string {blamed} blamed {st.blames} times, cap {self.cfg.blame_cap}"
            )
        self.blame_log.append((blamed, x, y, k))
        if self.cfg.monitor:
            victim, vs, color = (x, sx, a) if blamed == x else (y, sy, b)
            self._run_monitor(victim, vs, color)
        return blamed

    def _run_monitor(self, x: str, st: _StringState, color: int):
        """Count pairs (w, b) whose class meets the full set of x's active
        class in at least half of their common blocks; the family lemma keeps
        this below k_bound = 64 r^2 and the count is asserted exactly."""
        va = st.class_blocks(color)
        I = np.array([i for i in va if int(i) in st.top_full], dtype=np.int64)
        if I.size == 0:
            return
        r = self.cfg.r
        count = 0
        for colors in self.registry:
            in_I = np.bincount(colors[I], minlength=r)
            in_va = np.bincount(colors[va], minlength=r)
            count += int(np.count_nonzero((in_I > 0) & (2 * in_I >= in_va)))
        self.monitor_max = max(self.monitor_max, count)
        k_bound = 64 * r * r
        if count > k_bound:
            raise HardFailure(f"monitor count {count} exceeds 64 r^2 = {k_bound}")

    def _second_allocate(self, state: GameState, x: str, y: str, k: int, blamed: str) -> str:
        other = y if blamed == x else x
        sw = self._string(other)
        sz = self._string(blamed)
        q = sw.bottom_active
        candidates = np.flatnonzero((sw.pattern == 1) & (sz.pattern == 0))
        if candidates.size == 0:
            raise NoCandidateBlock(
                f"no block dominant for {other} and submissive for {blamed}"
            )
        slot = None
        block = -1
        for j in candidates:
            j = int(j)
            if self._bottom_full(sw, q, j):
                continue
            base = (
                "1"
                + format(q, f"0{self.region_bits}b")
                + format(j, f"0{self.bblock_bits}b")
            )
            slot = find_free_slot([state.occupied_at(x), state.occupied_at(y)], k, base)
            if slot is not None:
                block = j
                break
        if slot is None:
            raise NoFreeIntervalInBlock(
                f"no free 2^-{k} slot in any dominant/submissive block for "
                f"({x},{y}) blamed {blamed}"
            )
        eps = Dyadic(1, k)
        self._note_bottom(other, sw, q, block, eps)
        sz.bottom_alloc[(q, block)] = sz.bottom_alloc.get((q, block), ZERO) + eps
        return slot

    def _bottom_full(self, sw: _StringState, q: int, j: int) -> bool:
        alloc = sw.bottom_alloc.get((q, j), ZERO)
        return alloc + alloc >= self.bblock_size

    def _note_bottom(self, w: str, sw: _StringState, q: int, j: int, eps: Dyadic):
        was_full = self._bottom_full(sw, q, j)
        sw.bottom_alloc[(q, j)] = sw.bottom_alloc.get((q, j), ZERO) + eps
        if not was_full and self._bottom_full(sw, q, j):
            sw.dom_full[q] = sw.dom_full.get(q, 0) + 1
            dominant_count = int(sw.pattern.sum())
            if 8 * sw.dom_full[q] >= dominant_count:
                if sw.bottom_used >= self.cfg.bottom_regions:
                    raise NoBottomRegionLeft(
                        f"string {w} exhausted {self.cfg.bottom_regions} bottom regions"
                    )
                sw.bottom_active = sw.bottom_used
                sw.bottom_used += 1

    # -- reporting -----------------------------------------------------------------

    def stats(self) -> dict:
        return {
            "strings": len(self.strings),
            "blames": len(self.blame_log),
            "max_blames_per_string": max(
                (st.blames for st in self.strings.values()), default=0
            ),
            "monitor_max": self.monitor_max,
            "rotations": sum(
                len(st.ever_full_colors) for st in self.strings.values()
            ),
        }


class RandomRestrictedAlice(Strategy):
    """Seeded legal request stream for the restricted game.

    Draws pairs from a bounded universe of random n-bit strings and sizes
    uniformly from the legal exponents, skipping combinations that would
    break a budget or re-raise an edge.  One request per move.
    """

    name = "random-legal"

    def __init__(
        self,
        n: int,
        p: int,
        d: Dyadic,
        total: int,
        seed: int,
        universe: int = 4096,
    ):
        self.n, self.p, self.d = n, p, d
        self.total = total
        self.rng = random.Random(f"restricted-alice-{seed}")
        self.ks = legal_size_exponents(n, p)
        if not self.ks:
            raise ValueError(f"no legal sizes at n={n}, p={p}")
        self.pool = []
        seen = set()
        while len(self.pool) < universe:
            v = format(self.rng.getrandbits(n), f"0{n}b")
            if v not in seen:
                seen.add(v)
                self.pool.append(v)
        self.emitted = 0
        self.load: dict[str, Dyadic] = {}
        self.used_edges: set[tuple[str, str]] = set()

    def next_move(self, state: GameState):
        if self.emitted >= self.total:
            return PASS_A
        for _ in range(64):
            u = self.rng.choice(self.pool)
            v = self.rng.choice(self.pool)
            if u == v:
                continue
            e = (u, v) if u <= v else (v, u)
            if e in self.used_edges:
                continue
            eps = Dyadic(1, self.rng.choice(self.ks))
            if self.load.get(u, ZERO) + eps > self.d:
                continue
            if self.load.get(v, ZERO) + eps > self.d:
                continue
            self.used_edges.add(e)
            self.load[u] = self.load.get(u, ZERO) + eps
            self.load[v] = self.load.get(v, ZERO) + eps
            self.emitted += 1
            return AliceMove([(e, eps)])
        return PASS_A

    def stats(self) -> dict:
        return {"requests": self.emitted}
