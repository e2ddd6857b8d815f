"""Singular-value gap bound for column-stochastic matrices.

For ``S`` with probability-vector columns and ``r = max_i Σ_{j≠i} <s_i, s_j>``:
``0 <= σ1(S) - σn(S) <= sqrt(1 + r) - sqrt(max(1/n - r, 0))``.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError, ValidationError
from ..linalg import column_gram, in_gershgorin_union, singular_values
from ..net.network import philox
from ..net.softmax import softmax_columns

STOCHASTIC_TOL = 1e-12
SLACK_TOL = 1e-9


@dataclass(frozen=True)
class BoundEntry:
    n: int
    r: float
    gap: float
    bound: float
    slack: float
    diag_ok: bool = True
    gershgorin_ok: bool = True

    @property
    def holds(self):
        return self.slack >= -SLACK_TOL and self.gap >= -SLACK_TOL

    def to_dict(self):
        return {"n": self.n, "r": self.r, "gap": self.gap, "bound": self.bound, "slack": self.slack,
                "diag_ok": self.diag_ok, "gershgorin_ok": self.gershgorin_ok}


def check_column_stochastic(s, tol=STOCHASTIC_TOL):
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {s.shape}")
    if not np.all(np.isfinite(s)) or s.min() < 0:
        raise ValidationError("entries must be finite and non-negative")
    sums = s.sum(axis=0)
    if np.abs(sums - 1.0).max() > tol:
        raise ValidationError(f"columns must sum to 1 (worst deviation {np.abs(sums - 1).max():.3g})")
    return s


def gap_upper_bound(n, r):
    return float(np.sqrt(1.0 + r) - np.sqrt(max(1.0 / n - r, 0.0)))


def gap_bound_check(s):
    s = check_column_stochastic(s)
    n = s.shape[0]
    g = column_gram(s)
    off = g - np.diag(np.diag(g))
    r = float(off.sum(axis=1).max()) if n > 1 else 0.0
    sv = singular_values(s)
    gap = float(sv[0] - sv[-1])
    bound = gap_upper_bound(n, r)
    d = np.diag(g)
    diag_ok = bool(np.all(d >= 1.0 / n - STOCHASTIC_TOL) and np.all(d <= 1.0 + STOCHASTIC_TOL))
    gersh_ok = bool(np.all(in_gershgorin_union(g, sv**2)))
    return BoundEntry(n, r, gap, bound, bound - gap, diag_ok, gersh_ok)


def random_stochastic(n, rng, log10_scale=(-2.0, 2.0)):
    """Column softmax of Gaussian logits at a log-uniform random scale."""
    scale = 10.0 ** rng.uniform(*log10_scale)
    return softmax_columns(scale * rng.normal(size=(n, n)))


def gap_bound_sweep(trials=10_000, n_range=(2, 64), seed=0):
    """Property sweep; trial ``i`` draws its matrix from the stream keyed (seed, i)."""
    lo, hi = n_range
    out = []
    for i in range(trials):
        rng = philox(seed, i)
        n = int(rng.integers(lo, hi + 1))
        out.append(gap_bound_check(random_stochastic(n, rng)))
    return out


def tightness_cases(n):
    """The two extremal matrices: identity (gap 0) and all mass on the first row (gap = bound = sqrt(n))."""
    first_row = np.zeros((n, n))
    first_row[0, :] = 1.0
    return {"identity": gap_bound_check(np.eye(n)), "first_row": gap_bound_check(first_row)}
