"""Neural-collapse logits: simplex-ETF class means give solution rank C - 1."""
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..linalg import DEFAULT_POLICY, numerical_rank


def etf_gram_target(c):
    return c / (c - 1) * np.eye(c) - np.ones((c, c)) / (c - 1)


def simplex_etf(c):
    """Class-mean matrix ``K_C`` (rows are unit vectors with pairwise inner product -1/(C-1))."""
    if c < 2:
        raise ValidationError("need at least two classes")
    return np.sqrt(c / (c - 1)) * (np.eye(c) - np.ones((c, c)) / c)


@dataclass(frozen=True)
class NcResult:
    classes: int
    per_class: int
    rank: int
    gram_error: float
    logits: np.ndarray

    @property
    def ok(self):
        return self.rank == self.classes - 1

    def to_dict(self):
        return {"classes": self.classes, "per_class": self.per_class, "rank": self.rank,
                "gram_error": self.gram_error}


def nc_rank_construction(c, per_class, alpha=1.0, policy=DEFAULT_POLICY):
    """Logits ``M = α (K Kᵀ) S`` with a binary class-selection matrix ``S``."""
    if per_class < 1:
        raise ValidationError("per_class must be >= 1")
    k = simplex_etf(c)
    gram = k @ k.T
    err = float(np.linalg.norm(gram - etf_gram_target(c)))
    labels = np.repeat(np.arange(c), per_class)
    sel = np.zeros((c, labels.size))
    sel[labels, np.arange(labels.size)] = 1.0
    m = alpha * gram @ sel
    return NcResult(c, per_class, numerical_rank(m, policy), err, m)
