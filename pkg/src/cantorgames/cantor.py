"""Clopen subsets of Cantor space with exact dyadic measure.

An interval is identified with a finite bit string z: [z] is the set of all
infinite extensions of z, of measure 2^-|z|.  The empty prefix denotes the
whole space.  A clopen set is a finite union of such intervals, held in
canonical form: pairwise-disjoint maximal intervals (sibling pairs merged),
sorted lexicographically.  Two dyadic intervals are either nested or
disjoint, which keeps every operation here exact and cheap.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Iterator, Optional, Sequence

from .dyadic import Dyadic, ZERO


def check_prefix(z: str) -> str:
    if any(c not in "01" for c in z):
        raise ValueError(f"not a bit string: {z!r}")
    return z


def interval_size(z: str) -> Dyadic:
    return Dyadic(1, len(z))


def intervals_disjoint(a: str, b: str) -> bool:
    """Dyadic intervals are disjoint iff neither prefix extends the other."""
    return not (a.startswith(b) or b.startswith(a))


def sibling(z: str) -> str:
    return z[:-1] + ("1" if z[-1] == "0" else "0")


def grid_prefixes(k: int) -> Iterator[str]:
    """All 2^k grid prefixes of length k in lexicographic order."""
    for i in range(1 << k):
        yield format(i, f"0{k}b") if k else ""


def _canonical(prefixes: Iterable[str]) -> tuple[str, ...]:
    s = {check_prefix(z) for z in prefixes}
    if not s:
        return ()
    if len(s) == 1:
        return (next(iter(s)),)
    if "" in s:
        return ("",)
    # drop intervals covered by a proper ancestor
    keep = {z for z in s if not any(z[:i] in s for i in range(len(z)))}
    # merge sibling pairs bottom-up; a merge may enable another one level up
    by_len: dict[int, set[str]] = defaultdict(set)
    for z in keep:
        by_len[len(z)].add(z)
    for length in range(max(by_len), 0, -1):
        bucket = by_len.get(length, set())
        for z in sorted(bucket):
            if z in bucket and sibling(z) in bucket:
                bucket.discard(z)
                bucket.discard(sibling(z))
                by_len[length - 1].add(z[:-1])
    out = sorted(z for bucket in by_len.values() for z in bucket)
    return tuple(out)


class ClopenSet:
    """Immutable canonical finite union of dyadic intervals."""

    __slots__ = ("intervals",)

    def __init__(self, prefixes: Iterable[str] = ()):
        object.__setattr__(self, "intervals", _canonical(prefixes))

    def __setattr__(self, *a):
        raise AttributeError("ClopenSet is immutable")

    @staticmethod
    def empty() -> "ClopenSet":
        return _EMPTY

    @staticmethod
    def whole() -> "ClopenSet":
        return _WHOLE

    # -- basic queries -------------------------------------------------------

    def is_empty(self) -> bool:
        return not self.intervals

    def measure(self) -> Dyadic:
        if not self.intervals:
            return ZERO
        m = max(len(z) for z in self.intervals)
        return Dyadic(sum(1 << (m - len(z)) for z in self.intervals), m)

    def nu(self) -> Dyadic:
        """Size of the largest whole interval contained in the set.

        In canonical form that is simply the largest member interval.
        """
        if not self.intervals:
            return ZERO
        return Dyadic(1, min(len(z) for z in self.intervals))

    def contains_interval(self, z: str) -> bool:
        return any(z.startswith(w) for w in self.intervals)

    def intersects_interval(self, z: str) -> bool:
        return any(not intervals_disjoint(z, w) for w in self.intervals)

    # -- set algebra (exact point-set semantics) ------------------------------

    def union(self, other: "ClopenSet") -> "ClopenSet":
        return ClopenSet(self.intervals + other.intervals)

    def intersection(self, other: "ClopenSet") -> "ClopenSet":
        out = []
        for z in self.intervals:
            for w in other.intervals:
                if z.startswith(w):
                    out.append(z)
                elif w.startswith(z):
                    out.append(w)
        return ClopenSet(out)

    def difference(self, other: "ClopenSet") -> "ClopenSet":
        out: list[str] = []
        for z in self.intervals:
            if any(z.startswith(w) for w in other.intervals):
                continue
            inner = [w for w in other.intervals if w.startswith(z) and w != z]
            _subtract_into(z, inner, out)
        return ClopenSet(out)

    def disjoint(self, other: "ClopenSet") -> bool:
        return all(
            intervals_disjoint(z, w) for z in self.intervals for w in other.intervals
        )

    def complement(self) -> "ClopenSet":
        return _WHOLE.difference(self)

    # -- neighborhoods ---------------------------------------------------------

    def eps_neighborhood(self, eps: Dyadic) -> "ClopenSet":
        """Union of all grid intervals of size eps meeting the set."""
        k = _grid_depth(eps)
        out = []
        for z in self.intervals:
            out.append(z if len(z) <= k else z[:k])
        return ClopenSet(out)

    # -- protocol ----------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, ClopenSet) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def __iter__(self) -> Iterator[str]:
        return iter(self.intervals)

    def __repr__(self):
        return f"ClopenSet({list(self.intervals)!r})"


def _subtract_into(z: str, inner: Sequence[str], out: list[str]) -> None:
    """Append the canonical pieces of [z] minus the strictly-deeper intervals."""
    if not inner:
        out.append(z)
        return
    for child in (z + "0", z + "1"):
        sub = [w for w in inner if w.startswith(child)]
        if any(w == child for w in sub):
            continue
        _subtract_into(child, sub, out)


def _grid_depth(eps: Dyadic) -> int:
    if not eps.is_pow2() or eps > Dyadic(1):
        raise ValueError(f"grid size must be a power of two <= 1: {eps}")
    return -eps.log2()


_EMPTY = ClopenSet(())
_WHOLE = ClopenSet(("",))


# -- textual encoding ---------------------------------------------------------

def encode_clopen(cs: ClopenSet) -> str:
    """Comma-separated prefixes; '.' stands for the empty prefix, '' for the empty set."""
    return ",".join(z if z else "." for z in cs.intervals)


def decode_clopen(text: str) -> ClopenSet:
    if text == "":
        return _EMPTY
    return ClopenSet("" if tok == "." else tok for tok in text.split(","))


# -- mutable occupancy index ----------------------------------------------------

class PrefixIndex:
    """Grow-only set of pairwise-disjoint intervals with fast subtree queries.

    Used by the referee for per-vertex occupied space and by allocating
    strategies for free-slot searches.  `below[p]` holds the exact occupied
    measure strictly inside [p], so "is [z] covered?", "is anything inside
    [z]?" and "is [z] completely full?" are all O(|z|) dictionary probes.
    """

    # occupied measure below a node is tracked as an integer count of units
    # of size 2^-_UNIT_EXP, which keeps the hot path free of object churn
    _UNIT_EXP = 448

    __slots__ = ("members", "below", "_measure")

    def __init__(self):
        self.members: set[str] = set()
        self.below: dict[str, int] = {}
        self._measure = ZERO

    def add(self, z: str) -> None:
        if len(z) > self._UNIT_EXP:
            raise ValueError(f"interval deeper than 2^-{self._UNIT_EXP}")
        if self.intersects(z):
            raise ValueError(f"interval {z!r} overlaps existing content")
        self.members.add(z)
        units = 1 << (self._UNIT_EXP - len(z))
        below = self.below
        for i in range(len(z)):
            p = z[:i]
            below[p] = below.get(p, 0) + units
        self._measure = self._measure + interval_size(z)

    def covers(self, z: str) -> bool:
        """True iff some member contains [z]."""
        return any(z[:i] in self.members for i in range(len(z) + 1))

    def has_below(self, z: str) -> bool:
        return z in self.below

    def full_below(self, z: str) -> bool:
        """True iff the members strictly inside [z] already cover all of it."""
        return self.below.get(z, 0) == 1 << (self._UNIT_EXP - len(z))

    def intersects(self, z: str) -> bool:
        return self.covers(z) or self.has_below(z)

    def measure(self) -> Dyadic:
        return self._measure

    def snapshot(self) -> ClopenSet:
        return ClopenSet(self.members)

    def __bool__(self):
        return bool(self.members)


def find_free_slot(
    indexes: Sequence[PrefixIndex], depth: int, base: str = ""
) -> Optional[str]:
    """Lexicographically least grid prefix of the given depth inside [base]
    whose interval is disjoint from every index; None if there is none.

    The walk maintains the invariant that no strict ancestor of the current
    node is a member of any index, so each node costs a handful of dictionary
    probes, and any subtree that some index has packed completely full is
    skipped in O(1).
    """
    if len(base) > depth:
        raise ValueError("base deeper than requested grid")
    if any(ix.covers(base) for ix in indexes):
        return None

    def walk(z: str) -> Optional[str]:
        busy = False
        for ix in indexes:
            if z in ix.members or ix.full_below(z):
                return None
            busy = busy or z in ix.below
        if not busy:
            return z + "0" * (depth - len(z))
        if len(z) == depth:
            return None
        return walk(z + "0") or walk(z + "1")

    return walk(base)


class InsufficientMeasure(ValueError):
    pass


def carve(free: ClopenSet, target: Dyadic) -> ClopenSet:
    """Subset of `free` with measure exactly `target`.

    Deterministic: canonical intervals are consumed in lexicographic order
    and the last one is split left-first as needed.  Always possible when
    measure(free) >= target since all quantities are dyadic.
    """
    rem = target
    out: list[str] = []
    for z in free.intervals:
        if not rem:
            break
        rem = _take_from(z, rem, out)
    if rem:
        raise InsufficientMeasure(
            f"free measure {free.measure()} cannot cover target {target}"
        )
    return ClopenSet(out)


def _take_from(z: str, rem: Dyadic, out: list[str]) -> Dyadic:
    size = interval_size(z)
    if size <= rem:
        out.append(z)
        return rem - size
    rem = _take_from(z + "0", rem, out)
    if rem:
        rem = _take_from(z + "1", rem, out)
    return rem


def carve_avoiding(
    indexes: Sequence[PrefixIndex], target: Dyadic, base: str = ""
) -> ClopenSet:
    """Measure-exact carve from the free space of [base] w.r.t. the indexes,
    taking lexicographically least intervals first."""

    out: list[str] = []
    if any(ix.covers(base) for ix in indexes):
        raise InsufficientMeasure(f"base {base!r} fully occupied")

    def walk(z: str, rem: Dyadic) -> Dyadic:
        if not rem:
            return rem
        busy = False
        for ix in indexes:
            if z in ix.members or ix.full_below(z):
                return rem
            busy = busy or z in ix.below
        if not busy:
            return _take_from(z, rem, out)
        return walk(z + "1", walk(z + "0", rem))

    rem = walk(base, target)
    if rem:
        raise InsufficientMeasure(f"cannot carve {target} from free space under {base!r}")
    return ClopenSet(out)
