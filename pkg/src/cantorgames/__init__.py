"""Adversarial weight-allocation games on Cantor space.

Exact dyadic arithmetic and clopen-set algebra, a rule-enforcing referee for
three game variants, Alice's staged winning strategy, Bob's allocation
strategies (greedy, static/dynamic regions, and the two-substrategy
restricted-game winner), sample-and-verify combinatorial families, and a few
standalone constructive procedures (online edge coloring, ordinal codes,
edit-ball counting, a semimeasure allocator).
"""

from .cantor import ClopenSet, PrefixIndex, carve, find_free_slot
from .dyadic import Dyadic
from .referee import GameConfig, GameState, run_match

__version__ = "0.1.0"

__all__ = [
    "ClopenSet",
    "Dyadic",
    "GameConfig",
    "GameState",
    "PrefixIndex",
    "carve",
    "find_free_slot",
    "run_match",
    "__version__",
]
