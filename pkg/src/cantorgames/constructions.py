"""Constructive procedures outside the games.

* online proper edge coloring of enumerated bounded-degree level graphs,
  with (n+1)-bit colors per level,
* fixed-length ordinal codes for enumerations obeying a counting cap,
* exact counting of prefix/suffix-edit balls (the triangle-inequality
  counterexample's growth witness),
* the exact semimeasure allocator: disjoint clopen sets tracking half of a
  symmetric weight table.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cantor import ClopenSet, InsufficientMeasure, PrefixIndex, carve_avoiding
from .dyadic import Dyadic, ZERO


class DegreePromiseViolated(ValueError):
    pass


class CapacityExceeded(ValueError):
    pass


class EdgeColoring:
    """Online proper edge coloring, one palette of 2^(n+1) colors per level n.

    Every vertex at level n has degree < 2^n, so the least color unused at
    both endpoints always fits in n+1 bits.  Colors never change once
    assigned.
    """

    def __init__(self):
        self.used: dict[tuple[int, str], set[int]] = {}
        self.colors: dict[tuple[int, str, str], int] = {}
        self.partner: dict[tuple[int, int, str], str] = {}

    def _key(self, n: int, u: str, v: str):
        return (n, u, v) if u <= v else (n, v, u)

    def add_edge(self, n: int, u: str, v: str) -> str:
        if u == v:
            raise ValueError("no loops")
        key = self._key(n, u, v)
        if key in self.colors:
            raise ValueError(f"duplicate edge {key}")
        used_u = self.used.setdefault((n, u), set())
        used_v = self.used.setdefault((n, v), set())
        cap = 1 << n
        if len(used_u) >= cap - 1 or len(used_v) >= cap - 1:
            x = u if len(used_u) >= cap - 1 else v
            raise DegreePromiseViolated(
                f"vertex {x!r} would reach degree {cap} at level {n}"
            )
        color = 0
        while color in used_u or color in used_v:
            color += 1
        used_u.add(color)
        used_v.add(color)
        self.colors[key] = color
        self.partner[(n, color, u)] = v
        self.partner[(n, color, v)] = u
        return format(color, f"0{n + 1}b")

    def color_of(self, n: int, u: str, v: str) -> str:
        return format(self.colors[self._key(n, u, v)], f"0{n + 1}b")

    def lookup(self, color: str, vertex: str) -> str | None:
        """Partner of `vertex` along the edge carrying `color`; the level is
        recovered from the color's length."""
        n = len(color) - 1
        return self.partner.get((n, int(color, 2) if color else 0, vertex))


def ordinal_encode(ordinal: int, n: int, capacity: int) -> str:
    """Fixed-length code of n + ceil(log2 c) bits for the given ordinal.

    The enumeration may hold at most c * 2^n entries; the level n is
    recoverable from the code by stripping the ceil(log2 c) extra bits.
    """
    if capacity < 1:
        raise ValueError("capacity must be >= 1")
    if ordinal < 0 or ordinal >= capacity << n:
        raise CapacityExceeded(
            f"ordinal {ordinal} outside capacity {capacity}*2^{n}"
        )
    bits = n + _ceil_log2(capacity)
    return format(ordinal, f"0{bits}b") if bits else ""


def ordinal_decode(code: str, capacity: int) -> tuple[int, int]:
    """Inverse of ordinal_encode: returns (n, ordinal)."""
    n = len(code) - _ceil_log2(capacity)
    if n < 0:
        raise ValueError("code shorter than the capacity overhead")
    return n, int(code, 2) if code else 0


def _ceil_log2(c: int) -> int:
    return (c - 1).bit_length()


def prefix_suffix_ball(x: str, m: int) -> int:
    """Exact size of {y : for some k+l <= m, y agrees with x outside the
    first k and the last l positions}, by enumeration.

    Requires 2m <= |x| so the prefix and suffix windows cannot overlap.
    """
    n = len(x)
    if m < 0:
        raise ValueError("m must be >= 0")
    if 2 * m > n:
        raise ValueError(f"overlap regime rejected: need 2m <= n, got m={m}, n={n}")
    seen: set[str] = set()
    for k in range(m + 1):
        l = m - k
        mid = x[k : n - l] if l else x[k:]
        for head in range(1 << k):
            h = format(head, f"0{k}b") if k else ""
            for tail in range(1 << l):
                t = format(tail, f"0{l}b") if l else ""
                seen.add(h + mid + t)
    return len(seen)


def one_sided_ball(x: str, m: int, side: str = "prefix") -> int:
    """Size of the radius-m ball when only one end may change: exactly 2^m."""
    n = len(x)
    if m > n:
        raise ValueError("radius exceeds string length")
    if side == "prefix":
        return len({format(h, f"0{m}b") + x[m:] if m else x for h in range(1 << m)})
    return len({x[: n - m] + format(t, f"0{m}b") if m else x for t in range(1 << m)})


class RowSumExceeded(ValueError):
    pass


class CarveFailed(AssertionError):
    """Must never fire when the row-sum precondition holds."""


@dataclass
class PairAllocator:
    """Symmetric table u'(x, y) realized as disjoint clopen sets U_{x,y}.

    Each accepted increment r on a pair (x, y) carves fresh measure r/2 that
    avoids everything already allocated at x and at y, so that
    measure(U_{x,y}) == u'(x,y)/2 exactly and, per vertex, all sets stay
    pairwise disjoint with total measure <= 1/2.
    """

    table: dict[tuple[str, str], Dyadic] = field(default_factory=dict)
    sets: dict[tuple[str, str], ClopenSet] = field(default_factory=dict)
    row_sum: dict[str, Dyadic] = field(default_factory=dict)
    _occupied: dict[str, PrefixIndex] = field(default_factory=dict)

    @staticmethod
    def _key(x: str, y: str) -> tuple[str, str]:
        return (x, y) if x <= y else (y, x)

    def value(self, x: str, y: str) -> Dyadic:
        return self.table.get(self._key(x, y), ZERO)

    def set_of(self, x: str, y: str) -> ClopenSet:
        return self.sets.get(self._key(x, y), ClopenSet.empty())

    def occupied_at(self, x: str) -> PrefixIndex:
        ix = self._occupied.get(x)
        if ix is None:
            ix = self._occupied[x] = PrefixIndex()
        return ix

    def step(self, x: str, y: str, r: Dyadic) -> ClopenSet:
        """Raise u'(x,y) by r and allocate measure r/2; returns the new pieces."""
        if not r:
            raise ValueError("increment must be positive")
        half = Dyadic(r.num, r.exp + 1)
        for v in {x, y}:
            if self.row_sum.get(v, ZERO) + r > Dyadic(1):
                raise RowSumExceeded(
                    f"row sum at {v} would exceed 1 after +{r}"
                )
        occ_x, occ_y = self.occupied_at(x), self.occupied_at(y)
        try:
            pieces = carve_avoiding([occ_x, occ_y], half)
        except InsufficientMeasure as exc:  # pragma: no cover - guarded by row sums
            raise CarveFailed(str(exc)) from exc
        key = self._key(x, y)
        self.table[key] = self.value(x, y) + r
        self.sets[key] = self.set_of(x, y).union(pieces)
        for v in {x, y}:
            self.row_sum[v] = self.row_sum.get(v, ZERO) + r
        for z in pieces.intervals:
            occ_x.add(z)
            if occ_y is not occ_x:
                occ_y.add(z)
        return pieces

    def check_invariants(self) -> None:
        """Exact consistency of measures, disjointness, and row sums."""
        for key, u in self.table.items():
            got = self.sets[key].measure()
            want = u * Dyadic(1, 1)
            if got != want:
                raise AssertionError(f"pair {key}: measure {got} != u'/2 = {want}")
        per_vertex: dict[str, Dyadic] = {}
        for (x, y), cs in self.sets.items():
            for v in {x, y}:
                per_vertex[v] = per_vertex.get(v, ZERO) + cs.measure()
        for v, total in per_vertex.items():
            if self.occupied_at(v).measure() != total:
                raise AssertionError(f"vertex {v}: union not disjoint")
            if total > Dyadic(1, 1):
                raise AssertionError(f"vertex {v}: allocated {total} > 1/2")
