"""Post-softmax rank of scaled low-rank random matrices ``c · A Bᵀ``."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from ..linalg import DEFAULT_POLICY, numerical_rank, rank_from_singular_values, singular_values
from ..net.network import philox
from ..net.softmax import softmax_columns


def default_scales(lo=1e-16, hi=1e3, points=40):
    return tuple(float(x) for x in np.logspace(np.log10(lo), np.log10(hi), points))


@dataclass(frozen=True)
class ScalingExperimentConfig:
    n: int = 50
    k_values: tuple = (1, 2, 3, 4, 5)
    scales: tuple = field(default_factory=default_scales)
    trials: int = 20
    seed: int = 0

    def __post_init__(self):
        if any(k < 1 or k > self.n for k in self.k_values):
            raise ValidationError(f"every k must lie in [1, n={self.n}]")
        s = np.asarray(self.scales, dtype=np.float64)
        if s.size == 0 or np.any(s <= 0) or np.any(np.diff(s) <= 0):
            raise ValidationError("scales must be positive and strictly increasing")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")


@dataclass
class ScalingPoint:
    k: int
    scale: float
    mean_rank: float
    mean_gap: float
    pre_rank_ok: bool

    def to_dict(self):
        return {"k": self.k, "scale": self.scale, "mean_rank": self.mean_rank,
                "mean_gap": self.mean_gap, "pre_rank_ok": self.pre_rank_ok}


def low_rank_matrix(n, k, seed, trial):
    rng = philox(seed, (k << 32) | trial)
    a = rng.uniform(-1.0, 1.0, size=(n, k))
    b = rng.uniform(-1.0, 1.0, size=(n, k))
    return a @ b.T


def scaling_experiment(cfg=ScalingExperimentConfig(), policy=DEFAULT_POLICY):
    """Mean post-softmax rank per (k, scale); ``pre_rank_ok`` records that rank(c·M) = k in every trial."""
    points = []
    for k in cfg.k_values:
        mats = [low_rank_matrix(cfg.n, k, cfg.seed, t) for t in range(cfg.trials)]
        for c in cfg.scales:
            ranks, gaps, pre_ok = [], [], True
            for m in mats:
                cm = c * m
                pre_ok &= numerical_rank(cm, policy) == k
                sv = singular_values(softmax_columns(cm))
                ranks.append(rank_from_singular_values(sv, cm.shape, policy))
                gaps.append(sv[0] - sv[-1])
            points.append(ScalingPoint(k, float(c), float(np.mean(ranks)), float(np.mean(gaps)), bool(pre_ok)))
    return points
