import itertools
import random

import pytest
from hypothesis import given, strategies as st

from cantorgames.cantor import ClopenSet
from cantorgames.constructions import (
    CapacityExceeded,
    DegreePromiseViolated,
    EdgeColoring,
    PairAllocator,
    RowSumExceeded,
    one_sided_ball,
    ordinal_decode,
    ordinal_encode,
    prefix_suffix_ball,
)
from cantorgames.dyadic import Dyadic, ZERO


# -- online edge coloring -----------------------------------------------------

def test_path_gets_least_unused_colors():
    ec = EdgeColoring()
    assert ec.add_edge(2, "a", "b") == "000"
    assert ec.add_edge(2, "b", "c") == "001"
    assert ec.add_edge(2, "c", "a") == "010"  # 000 used at a, 001 used at c


def test_degree_promise_is_strict():
    # at level 1 every vertex admits at most 2^1 - 1 = 1 edge, so even a
    # two-edge path breaks the promise at the middle vertex
    ec = EdgeColoring()
    ec.add_edge(1, "a", "b")
    with pytest.raises(DegreePromiseViolated):
        ec.add_edge(1, "b", "c")


def test_single_edge_all_zero_color():
    ec = EdgeColoring()
    assert ec.add_edge(4, "x", "y") == "00000"


def test_star_fills_palette_within_bits():
    n = 3
    ec = EdgeColoring()
    colors = [ec.add_edge(n, "hub", f"leaf{i}") for i in range((1 << n) - 1)]
    assert len(set(colors)) == len(colors)
    assert all(len(c) == n + 1 for c in colors)
    with pytest.raises(DegreePromiseViolated):
        ec.add_edge(n, "hub", "one-too-many")


def test_duplicate_edge_rejected():
    ec = EdgeColoring()
    ec.add_edge(2, "a", "b")
    with pytest.raises(ValueError):
        ec.add_edge(2, "b", "a")


def test_lookup_table_decodes_partner():
    ec = EdgeColoring()
    c = ec.add_edge(2, "a", "b")
    assert ec.lookup(c, "a") == "b"
    assert ec.lookup(c, "b") == "a"
    assert ec.lookup(c, "zzz") is None


def _random_bounded_stream(n, edges, seed):
    rng = random.Random(seed)
    degree: dict[str, int] = {}
    out = []
    seen = set()
    cap = (1 << n) - 1
    while len(out) < edges:
        u = f"s{rng.randrange(4 * edges)}"
        v = f"s{rng.randrange(4 * edges)}"
        if u == v or (min(u, v), max(u, v)) in seen:
            continue
        if degree.get(u, 0) >= cap or degree.get(v, 0) >= cap:
            continue
        seen.add((min(u, v), max(u, v)))
        degree[u] = degree.get(u, 0) + 1
        degree[v] = degree.get(v, 0) + 1
        out.append((u, v))
    return out


def test_random_stream_proper_and_immutable():
    n = 4
    stream = _random_bounded_stream(n, 300, seed=5)
    ec = EdgeColoring()
    first = {}
    for u, v in stream:
        first[(u, v)] = ec.add_edge(n, u, v)
    # proper: brute-force re-check per vertex
    at_vertex: dict[str, list[str]] = {}
    for (u, v), c in first.items():
        at_vertex.setdefault(u, []).append(c)
        at_vertex.setdefault(v, []).append(c)
    for colors in at_vertex.values():
        assert len(set(colors)) == len(colors)
    # online stability: stored colors unchanged after the whole stream
    for (u, v), c in first.items():
        assert ec.color_of(n, u, v) == c


# -- ordinal codes ---------------------------------------------------------------

def test_ordinal_examples():
    assert ordinal_encode(2, 2, 1) == "10"  # third enumerated element, c=1
    assert ordinal_encode(3, 1, 2) == "11"  # c=2: 2-bit codes cover 4 entries
    with pytest.raises(CapacityExceeded):
        ordinal_encode(4, 1, 2)


@given(st.integers(0, 12), st.integers(1, 9), st.integers(0, 5000))
def test_ordinal_roundtrip(n, c, raw):
    ordinal = raw % (c << n)
    code = ordinal_encode(ordinal, n, c)
    overhead = (c - 1).bit_length()
    assert len(code) == n + overhead
    assert ordinal_decode(code, c) == (n, ordinal)


def test_ordinal_injective_within_level():
    n, c = 4, 3
    codes = {ordinal_encode(i, n, c) for i in range(c << n)}
    assert len(codes) == c << n


# -- prefix/suffix balls --------------------------------------------------------------

def test_ball_trivial_and_small():
    assert prefix_suffix_ball("0" * 8, 0) == 1
    # m=1: x itself, first-bit flip, last-bit flip
    assert prefix_suffix_ball("00000000", 1) == 3


def _ball_closed_form(m):
    # inclusion-exclusion over the maximal windows A_{k,m-k}: the union gains
    # 2^(m-1) fresh strings per k >= 1 on top of |A_{0,m}| = 2^m
    return (1 << m) + m * (1 << (m - 1)) if m else 1


@given(st.integers(0, 6), st.integers(0, 100))
def test_ball_matches_closed_form(m, salt):
    n = 2 * m + (salt % 5)
    if n == 0:
        n = 1
        m = 0
    x = format(random.Random(salt).getrandbits(n), f"0{n}b")
    assert prefix_suffix_ball(x, m) == _ball_closed_form(m)


def test_ball_rejects_overlap_regime():
    with pytest.raises(ValueError):
        prefix_suffix_ball("0000", 3)


def test_one_sided_balls_exactly_2m():
    x = "0110" * 6
    for m in range(0, 9):
        assert one_sided_ball(x, m, "prefix") == 1 << m
        assert one_sided_ball(x, m, "suffix") == 1 << m


def test_growth_exceeds_single_sided():
    # n=24, m=8: the two-sided ball is 5*2^m, far above the 2^m cap that
    # either one-sided ball obeys
    x = "0" * 24
    m = 8
    two_sided = prefix_suffix_ball(x, m)
    assert two_sided > 4 * (1 << m)
    assert one_sided_ball(x, m) <= 1 << m


# -- semimeasure allocator ---------------------------------------------------------------

def test_allocator_first_step():
    alloc = PairAllocator()
    pieces = alloc.step("x", "y", Dyadic(1, 1))
    assert pieces == ClopenSet(["00"])
    assert alloc.set_of("x", "y").measure() == Dyadic(1, 2)
    alloc.check_invariants()


def test_allocator_saturate_row():
    alloc = PairAllocator()
    alloc.step("x", "a", Dyadic(1, 1))
    alloc.step("x", "b", Dyadic(1, 2))
    alloc.step("x", "c", Dyadic(1, 2))
    total = ZERO
    for other in "abc":
        total = total + alloc.set_of("x", other).measure()
    assert total == Dyadic(1, 1)
    alloc.check_invariants()
    with pytest.raises(RowSumExceeded):
        alloc.step("x", "d", Dyadic(1, 4))
    assert alloc.value("x", "d") == ZERO  # state unchanged on rejection


def test_allocator_symmetry_and_diagonal():
    alloc = PairAllocator()
    alloc.step("y", "x", Dyadic(1, 2))
    assert alloc.set_of("x", "y") == alloc.set_of("y", "x")
    alloc.step("x", "x", Dyadic(1, 2))
    alloc.check_invariants()


def test_allocator_random_run_keeps_exact_halves():
    rng = random.Random(11)
    alloc = PairAllocator()
    vertices = [f"n{i}" for i in range(12)]
    for _ in range(400):
        x, y = rng.sample(vertices, 2)
        r = Dyadic(1, rng.randint(3, 8))
        if alloc.row_sum.get(x, ZERO) + r > Dyadic(1):
            continue
        if alloc.row_sum.get(y, ZERO) + r > Dyadic(1):
            continue
        alloc.step(x, y, r)
    alloc.check_invariants()
    for (x, y), u in alloc.table.items():
        assert alloc.sets[(x, y)].measure() == Dyadic(u.num, u.exp + 1)
