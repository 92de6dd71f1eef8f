"""Sample-and-verify combinatorial families.

Two families back the restricted-game strategy:

* region colorings: lists over an r-letter alphabet whose color classes
  overlap evenly across any two distinct members (checked exactly within
  [ell/(2r^2), 2*ell/r^2] for every ordered pair of classes), and
* dominance patterns: s-bit strings with, for every ordered pair (a, b),
  at least s/8 positions where a has 1 and b has 0.

Builders draw uniformly at random and verify by exact integer counting;
a returned family satisfies its conditions with certainty.  Retrying is
expected to terminate fast: the sampling failure probabilities are checked
by the certificate helpers below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

_ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


class RetryLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ColoringFamilyParams:
    members: int  # family size (2^m at desk scale, 2^n at full scale)
    r: int  # alphabet size
    ell: int  # list length (number of blocks)
    k_bound: int = 0  # monitor cap; defaults to 64 r^2

    def __post_init__(self):
        if self.members < 1 or self.r < 2 or self.ell < 1:
            raise ValueError("need members >= 1, r >= 2, ell >= 1")
        if self.k_bound == 0:
            object.__setattr__(self, "k_bound", 64 * self.r * self.r)


@dataclass
class ColoringFamily:
    params: ColoringFamilyParams
    matrix: np.ndarray  # (members, ell) uint8 color ids
    _classes: dict = field(default_factory=dict, repr=False)

    def class_blocks(self, v: int, a: int) -> np.ndarray:
        """Sorted block indices of color a in member v."""
        key = (v, a)
        got = self._classes.get(key)
        if got is None:
            got = np.flatnonzero(self.matrix[v] == a)
            self._classes[key] = got
        return got

    def overlap(self, v: int, a: int, w: int, b: int) -> int:
        row = self.matrix[w]
        return int(np.count_nonzero(row[self.class_blocks(v, a)] == b))


def coloring_first_condition_violation(fam: ColoringFamily) -> str | None:
    """Exact check of the pairwise class-overlap bounds; None when clean.

    The bounds apply across distinct members (classes of one member are
    disjoint by construction).  Class sizes are additionally required to sit
    in [ell/(2r), 2*ell/r], which is what the per-member accounting uses.
    """
    p = fam.params
    r, ell, mem = p.r, p.ell, p.members
    counts = np.stack(
        [np.bincount(fam.matrix[v], minlength=r) for v in range(mem)]
    )
    if np.any(2 * r * counts < ell) or np.any(r * counts > 2 * ell):
        return "class size outside [ell/(2r), 2*ell/r]"
    for v in range(mem):
        for w in range(v + 1, mem):
            eq = fam.matrix[v].astype(np.int32) * r + fam.matrix[w]
            ov = np.bincount(eq, minlength=r * r)
            if np.any(2 * r * r * ov < ell) or np.any(r * r * ov > 2 * ell):
                return f"overlap bound broken for members ({v},{w})"
    return None


def build_coloring_family(
    params: ColoringFamilyParams, seed: int, retry_limit: int = 3
) -> ColoringFamily:
    for attempt in range(retry_limit):
        rng = np.random.default_rng((seed, attempt))
        matrix = rng.integers(0, params.r, size=(params.members, params.ell), dtype=np.uint8)
        fam = ColoringFamily(params, matrix)
        if coloring_first_condition_violation(fam) is None:
            return fam
    raise RetryLimitExceeded(
        f"no valid coloring family in {retry_limit} attempts at {params}"
    )


def second_condition_count(
    fam: ColoringFamily, v: int, a: int, blocks: Iterable[int]
) -> int:
    """Exact count of pairs (w, b) with nonempty |I ∩ w[b]| at least half of
    |v[a] ∩ w[b]|, for I the given subset of v's color-a blocks.

    This monitors the conclusion the second family condition guarantees; the
    condition itself quantifies over exponentially many I and is only checked
    on the sets that actually arise.
    """
    I = np.asarray(sorted(set(blocks)), dtype=np.int64)
    va = fam.class_blocks(v, a)
    if I.size and not np.all(np.isin(I, va)):
        raise ValueError("I must be a subset of the (v, a) class")
    if I.size == 0:
        return 0
    r = fam.params.r
    count = 0
    for w in range(fam.params.members):
        row = fam.matrix[w]
        in_I = np.bincount(row[I], minlength=r)
        in_va = np.bincount(row[va], minlength=r)
        count += int(np.count_nonzero((in_I > 0) & (2 * in_I >= in_va)))
    return count


@dataclass(frozen=True)
class DominanceFamilyParams:
    members: int  # 2^m patterns at desk scale
    s: int  # pattern length

    def __post_init__(self):
        if self.members < 1 or self.s < 8:
            raise ValueError("need members >= 1 and s >= 8")


@dataclass
class DominanceFamily:
    params: DominanceFamilyParams
    patterns: np.ndarray  # (members, s) uint8 in {0,1}


def dominance_violation(fam: DominanceFamily) -> str | None:
    """Exact check that every ordered pair (a, b), a != b, has
    sum a_i (1 - b_i) >= s/8.  Both orders matter: the quantity is
    asymmetric, so the verifier checks the full off-diagonal matrix."""
    A = fam.patterns.astype(np.int32)
    cross = A @ (1 - A).T  # cross[i, j] = sum_i a (1 - b)
    s = fam.params.s
    bad = 8 * cross < s
    np.fill_diagonal(bad, False)
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        return f"ordered pair ({i},{j}) has overlap {int(cross[i, j])} < s/8"
    return None


def build_dominance_family(
    params: DominanceFamilyParams, seed: int, retry_limit: int = 3
) -> DominanceFamily:
    for attempt in range(retry_limit):
        rng = np.random.default_rng((seed, attempt))
        patterns = rng.integers(0, 2, size=(params.members, params.s), dtype=np.uint8)
        fam = DominanceFamily(params, patterns)
        if dominance_violation(fam) is None:
            return fam
    raise RetryLimitExceeded(
        f"no valid dominance family in {retry_limit} attempts at {params}"
    )


# -- sampling-success certificates ---------------------------------------------

def coloring_certificate(params: ColoringFamilyParams) -> dict:
    """Bounds on the sampling failure probability at these constants.

    Chernoff for one ordered class pair: the overlap is a sum of ell
    Bernoulli(1/r^2) variables, so undershooting ell/(2r^2) has probability
    at most exp(-ell/(8 r^2)) and overshooting 2 ell/r^2 at most
    exp(-ell/(3 r^2)); the union is over all ordered pairs including class
    sizes.  The certificate holds when the union bound stays below 1/2.
    """
    pairs = (params.r * params.members) ** 2
    tail = math.exp(-params.ell / (8 * params.r**2)) + math.exp(
        -params.ell / (3 * params.r**2)
    )
    bound = pairs * tail
    return {
        "pairs": pairs,
        "tail_per_pair": tail,
        "union_bound": bound,
        "ok": bound < 0.5,
    }


def dominance_certificate(params: DominanceFamilyParams) -> dict:
    """Union bound members^2 * exp(-2 s / 64) < 1 for the pairwise margin."""
    bound = params.members**2 * math.exp(-2 * params.s / 64)
    return {"union_bound": bound, "ok": bound < 1.0}


def coloring_hypotheses(params: ColoringFamilyParams) -> dict:
    """The family-lemma hypotheses at these constants, in exact integers:
    2^m >= 4r (i.e. m >= 2 + log r) and ell >= 2^7 r^3 m."""
    m = max(1, (params.members - 1).bit_length())
    return {
        "m": m,
        "m_ge_2_plus_log_r": params.members >= 4 * params.r,
        "ell_ge_128_r3_m": params.ell >= (1 << 7) * params.r**3 * m,
    }


def dominance_hypotheses(params: DominanceFamilyParams) -> dict:
    """s >= 64 m for m = log2(members)."""
    m = max(1, (params.members - 1).bit_length())
    return {"m": m, "s_ge_64_m": params.s >= 64 * m}


# -- flat text serialization ------------------------------------------------------

def save_coloring_family(path, fam: ColoringFamily) -> None:
    p = fam.params
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# coloring members={p.members} r={p.r} ell={p.ell} k_bound={p.k_bound}\n")
        for row in fam.matrix:
            fh.write("".join(_ALPHABET[c] for c in row) + "\n")


def load_coloring_family(path) -> ColoringFamily:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        kv = dict(tok.split("=") for tok in header if "=" in tok)
        rows = [line.strip() for line in fh if line.strip()]
    params = ColoringFamilyParams(
        members=int(kv["members"]), r=int(kv["r"]), ell=int(kv["ell"]),
        k_bound=int(kv["k_bound"]),
    )
    matrix = np.array(
        [[_ALPHABET.index(ch) for ch in row] for row in rows], dtype=np.uint8
    )
    if matrix.shape != (params.members, params.ell):
        raise ValueError("family file shape mismatch")
    return ColoringFamily(params, matrix)


def save_dominance_family(path, fam: DominanceFamily) -> None:
    p = fam.params
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# dominance members={p.members} s={p.s}\n")
        for row in fam.patterns:
            fh.write("".join("1" if b else "0" for b in row) + "\n")


def load_dominance_family(path) -> DominanceFamily:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        kv = dict(tok.split("=") for tok in header if "=" in tok)
        rows = [line.strip() for line in fh if line.strip()]
    params = DominanceFamilyParams(members=int(kv["members"]), s=int(kv["s"]))
    patterns = np.array([[1 if c == "1" else 0 for c in row] for row in rows], dtype=np.uint8)
    if patterns.shape != (params.members, params.s):
        raise ValueError("family file shape mismatch")
    return DominanceFamily(params, patterns)
