"""Column softmax of a rank-1 matrix across temperatures.

Columns are grouped by the row holding their pre-softmax maximum.  Cooling
pushes columns of different groups apart (inner products fall) and columns of
the same group together.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..linalg import DEFAULT_POLICY, rank_from_singular_values, singular_values
from ..net.network import philox
from ..net.softmax import softmax_with_temperature

GAP_FLOOR_RTOL = 1e-3


def default_temperatures():
    return tuple(float(x) for x in np.logspace(-3, 4, 30))


@dataclass(frozen=True)
class BifurcationPoint:
    temperature: float
    same_argmax_ip: float
    cross_argmax_ip: float
    gap: float
    rank: int

    def to_dict(self):
        return {"temperature": self.temperature, "same_argmax_ip": self.same_argmax_ip,
                "cross_argmax_ip": self.cross_argmax_ip, "gap": self.gap, "rank": self.rank}


def rank1_matrix(n, seed):
    rng = philox(seed, 71)
    return np.outer(rng.normal(size=n), rng.normal(size=n))


def bifurcation_sweep(n=5, temperatures=None, seed=0, policy=DEFAULT_POLICY, matrix=None):
    """Group-mean inner products, σ1 - σn and numerical rank of softmax_T(A) per temperature.

    A group with no column pairs reports ``nan``.
    """
    if n < 2:
        raise ValidationError("n must be >= 2")
    temps = default_temperatures() if temperatures is None else tuple(temperatures)
    if any(not t > 0 for t in temps):
        raise ValidationError("temperatures must be positive")
    a = rank1_matrix(n, seed) if matrix is None else np.asarray(matrix, dtype=np.float64)
    top = a.argmax(axis=0)
    iu = np.triu_indices(a.shape[1], k=1)
    same = top[iu[0]] == top[iu[1]]
    out = []
    for t in temps:
        s = softmax_with_temperature(a, t)
        ip = (s.T @ s)[iu]
        sv = singular_values(s)
        out.append(BifurcationPoint(
            float(t),
            float(ip[same].mean()) if same.any() else float("nan"),
            float(ip[~same].mean()) if (~same).any() else float("nan"),
            float(sv[0] - sv[-1]),
            rank_from_singular_values(sv, s.shape, policy),
        ))
    return out


def gap_floor_index(gaps, rtol=GAP_FLOOR_RTOL):
    """First index where the gap is within ``rtol`` of its minimum over the sweep."""
    g = np.asarray(gaps, dtype=np.float64)
    return int(np.flatnonzero(g <= g.min() * (1 + rtol) + 1e-300)[0])


def gap_rank_coincide(points, rtol=GAP_FLOOR_RTOL):
    """Does the gap-shrinking temperature sit within one grid step of a rank-maximising one?"""
    gi = gap_floor_index([p.gap for p in points], rtol)
    ranks = np.array([p.rank for p in points])
    best = np.flatnonzero(ranks == ranks.max())
    return bool(np.min(np.abs(best - gi)) <= 1), gi, best
