"""Exact nonnegative dyadic rationals.

Every quantity the simulator tracks -- edge weights, request sizes,
measures of clopen sets, budgets -- is a nonnegative rational whose
denominator is a power of two.  Arithmetic here is exact over Python's
arbitrary-precision integers; nothing in the package ever touches a float.
"""

from __future__ import annotations

import re

_STR_RE = re.compile(r"^(\d+)(?:/(\d+|2\^\d+))?$")


class Dyadic:
    """value = num / 2**exp, canonical (num odd or exp == 0), num >= 0."""

    __slots__ = ("num", "exp")

    def __init__(self, num: int, exp: int = 0):
        if num < 0 or exp < 0:
            raise ValueError(f"dyadic must be nonnegative: {num}/2^{exp}")
        if num == 0:
            exp = 0
        else:
            while exp > 0 and num % 2 == 0:
                num //= 2
                exp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def __setattr__(self, *a):  # immutable
        raise AttributeError("Dyadic is immutable")

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def zero() -> "Dyadic":
        return _ZERO

    @staticmethod
    def one() -> "Dyadic":
        return _ONE

    @staticmethod
    def pow2(k: int) -> "Dyadic":
        """2**k for any integer k (negative k gives 1/2^|k|)."""
        if k >= 0:
            return Dyadic(1 << k, 0)
        return Dyadic(1, -k)

    @staticmethod
    def parse(text: str) -> "Dyadic":
        """Parse 'a', 'a/b' (b a power of two) or 'a/2^k'."""
        m = _STR_RE.match(text.strip())
        if not m:
            raise ValueError(f"not a dyadic literal: {text!r}")
        num = int(m.group(1))
        den = m.group(2)
        if den is None:
            return Dyadic(num)
        if den.startswith("2^"):
            return Dyadic(num, int(den[2:]))
        d = int(den)
        if d <= 0 or d & (d - 1):
            raise ValueError(f"denominator must be a power of two: {text!r}")
        return Dyadic(num, d.bit_length() - 1)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "Dyadic") -> "Dyadic":
        e = max(self.exp, other.exp)
        return Dyadic((self.num << (e - self.exp)) + (other.num << (e - other.exp)), e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        e = max(self.exp, other.exp)
        n = (self.num << (e - self.exp)) - (other.num << (e - other.exp))
        if n < 0:
            raise ValueError(f"dyadic subtraction went negative: {self} - {other}")
        return Dyadic(n, e)

    def __mul__(self, other: "Dyadic") -> "Dyadic":
        return Dyadic(self.num * other.num, self.exp + other.exp)

    def scaled(self, k: int) -> "Dyadic":
        """self * k for a nonnegative integer k."""
        return Dyadic(self.num * k, self.exp)

    def _cmp_key(self, other: "Dyadic"):
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp)

    def __eq__(self, other) -> bool:
        return isinstance(other, Dyadic) and self.num == other.num and self.exp == other.exp

    def __lt__(self, other: "Dyadic") -> bool:
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other: "Dyadic") -> bool:
        a, b = self._cmp_key(other)
        return a <= b

    def __gt__(self, other: "Dyadic") -> bool:
        return other < self

    def __ge__(self, other: "Dyadic") -> bool:
        return other <= self

    def __hash__(self):
        return hash((self.num, self.exp))

    def __bool__(self):
        return self.num != 0

    # -- structure -----------------------------------------------------------

    def is_pow2(self) -> bool:
        """True when the value is 2**k for some integer k (and nonzero)."""
        return self.num != 0 and self.num & (self.num - 1) == 0

    def log2(self) -> int:
        """Exact log2 of a power-of-two value."""
        if not self.is_pow2():
            raise ValueError(f"{self} is not a power of two")
        return self.num.bit_length() - 1 - self.exp

    def ratio(self, other: "Dyadic") -> int:
        """Exact integer self/other; raises if the quotient is not integral."""
        num = self.num << other.exp
        den = other.num << self.exp
        if den == 0:
            raise ZeroDivisionError("ratio by zero dyadic")
        q, r = divmod(num, den)
        if r:
            raise ValueError(f"{self}/{other} is not an integer")
        return q

    def __float__(self):  # diagnostics only
        return self.num / (1 << self.exp)

    def __str__(self):
        return f"{self.num}/2^{self.exp}"

    def __repr__(self):
        return f"Dyadic({self.num}, {self.exp})"


_ZERO = Dyadic(0)
_ONE = Dyadic(1)

ZERO = _ZERO
ONE = _ONE
