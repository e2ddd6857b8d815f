from dataclasses import dataclass

from ..errors import ValidationError
from .matrix import EPS, as_matrix
from .svd import singular_values

RELATIVE = "relative"
ABSOLUTE = "absolute"


@dataclass(frozen=True)
class RankPolicy:
    """Threshold rule for numerical rank.

    ``relative``: cut at ``threshold * s[0] * max(rows, cols) * eps`` (with the
    default ``threshold=1`` this is the usual framework default).
    ``absolute``: cut at ``threshold`` itself.
    """

    mode: str = RELATIVE
    threshold: float = 1.0

    def __post_init__(self):
        if self.mode not in (RELATIVE, ABSOLUTE):
            raise ValidationError(f"rank mode must be 'relative' or 'absolute', got {self.mode!r}")
        if not self.threshold > 0:
            raise ValidationError(f"rank threshold must be > 0, got {self.threshold}")

    def cutoff(self, s, shape):
        if self.mode == ABSOLUTE:
            return float(self.threshold)
        top = float(s[0]) if len(s) else 0.0
        return self.threshold * top * max(shape) * EPS


DEFAULT_POLICY = RankPolicy()


def rank_from_singular_values(s, shape, policy=DEFAULT_POLICY):
    return int((s > policy.cutoff(s, shape)).sum())


def numerical_rank(m, policy=DEFAULT_POLICY):
    a = as_matrix(m)
    return rank_from_singular_values(singular_values(a), a.shape, policy)
