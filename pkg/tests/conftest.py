"""Shared test helpers: a brute-force bit-vector model of clopen sets.

A clopen set truncated at depth D is a subset of the 2^D grid intervals,
stored as a Python int bitmask (bit i = the i-th depth-D prefix in
lexicographic order).  All set operations become boolean arithmetic, giving
an independent oracle for the exact interval algebra.
"""

from __future__ import annotations

import pytest

from cantorgames.cantor import ClopenSet
from cantorgames.dyadic import Dyadic, ZERO


def mask_of_prefix(z: str, depth: int) -> int:
    """Bitmask of all depth-D grid intervals inside [z]."""
    if len(z) > depth:
        raise ValueError("prefix deeper than the grid")
    span = 1 << (depth - len(z))
    start = int(z, 2) << (depth - len(z)) if z else 0
    return ((1 << span) - 1) << start


def mask_of(cs: ClopenSet | list[str], depth: int) -> int:
    intervals = cs.intervals if isinstance(cs, ClopenSet) else cs
    m = 0
    for z in intervals:
        m |= mask_of_prefix(z, depth)
    return m


def mask_measure(m: int, depth: int) -> Dyadic:
    return Dyadic(m.bit_count(), depth) if m else ZERO


def mask_nu(m: int, depth: int) -> Dyadic:
    """Largest aligned fully-covered dyadic block in the mask."""
    for k in range(depth + 1):
        block = 1 << (depth - k)
        ones = (1 << block) - 1
        for pos in range(1 << k):
            if (m >> (pos * block)) & ones == ones:
                return Dyadic(1, k)
    return ZERO


def mask_neighborhood(m: int, depth: int, k: int) -> int:
    """Union of depth-k grid blocks meeting the mask, as a depth-D mask."""
    block = 1 << (depth - k)
    ones = (1 << block) - 1
    out = 0
    for pos in range(1 << k):
        if (m >> (pos * block)) & ones:
            out |= ones << (pos * block)
    return out


def mask_first_free(m: int, depth: int, k: int) -> str | None:
    """Lexicographically least depth-k grid prefix fully outside the mask."""
    block = 1 << (depth - k)
    ones = (1 << block) - 1
    for pos in range(1 << k):
        if (m >> (pos * block)) & ones == 0:
            return format(pos, f"0{k}b") if k else ""
    return None


@pytest.fixture
def depth() -> int:
    return 8
