"""Rank-2 logits whose row softmax reaches full rank."""
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateError, ValidationError
from ..linalg import DEFAULT_POLICY, numerical_rank
from ..net.network import philox
from ..net.softmax import softmax_rows

LIMIT_FACTOR = 64


@dataclass(frozen=True)
class Rank2Result:
    n: int
    seed: int
    c_found: float  # None when no c <= c_max worked
    rank_at_c: int
    identity_deviation: float  # max |softmax(LIMIT_FACTOR·c·B) - I|, None when not found

    def to_dict(self):
        return {"n": self.n, "seed": self.seed, "c_found": self.c_found, "rank_at_c": self.rank_at_c,
                "identity_deviation": self.identity_deviation}


def rank2_gram(n, seed):
    """``B = Ã Ãᵀ`` for a row-normalised standard normal ``A`` (n × 2)."""
    a = philox(seed, 61).normal(size=(n, 2))
    a_tilde = a / np.linalg.norm(a, axis=1, keepdims=True)
    return a_tilde @ a_tilde.T


def rank2_full_rank_search(n, seed, c_max=1e6, policy=DEFAULT_POLICY):
    """Double ``c`` from 1 until ``rank(softmax_rows(c·B)) == n`` or ``c > c_max``.

    Raises :class:`DegenerateError` when the draw does not give rank(B) == 2;
    such draws are reported, never silently replaced.
    """
    if n < 2:
        raise ValidationError("n must be >= 2")
    if c_max < 1:
        raise ValidationError("c_max must be >= 1")
    b = rank2_gram(n, seed)
    rb = numerical_rank(b, policy)
    if rb != 2:
        raise DegenerateError(f"rank(B) = {rb} for seed {seed}; draw again with a different seed")
    c, rank = 1.0, 0
    while c <= c_max:
        rank = numerical_rank(softmax_rows(c * b), policy)
        if rank == n:
            dev = float(np.abs(softmax_rows(LIMIT_FACTOR * c * b) - np.eye(n)).max())
            return Rank2Result(n, seed, c, rank, dev)
        c *= 2.0
    return Rank2Result(n, seed, None, rank, None)
