"""Linear probes on frozen representations, trained with Adam."""
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateError, DimensionError
from ..net.network import one_hot, philox
from ..net.softmax import softmax_columns

_STREAM_SPLIT = 51
_STREAM_FEATURES = 52
_STREAM_PROBE_SHUFFLE = 54


@dataclass(frozen=True)
class ProbeConfig:
    learning_rate: float = 1e-3
    weight_decay: float = 1e-3
    epochs: int = 50
    batch_size: int = 4096
    max_features: int = 10_000
    train_fraction: float = 0.8
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8


@dataclass(frozen=True)
class ProbeResult:
    layer: int
    split: str
    accuracy: float
    stage: str = "post_activation"

    def to_dict(self):
        return {"layer": self.layer, "split": self.split, "stage": self.stage, "accuracy": self.accuracy}


def split_indices(n, seed, train_fraction=0.8):
    perm = philox(seed, _STREAM_SPLIT).permutation(n)
    cut = int(round(train_fraction * n))
    cut = min(max(cut, 1), n - 1)
    return perm[:cut], perm[cut:]


def feature_subset(dim, seed, cap):
    if dim <= cap:
        return np.arange(dim)
    return np.sort(philox(seed, _STREAM_FEATURES).permutation(dim)[:cap])


def fit_linear_probe(x, y, class_count, seed, cfg=ProbeConfig()):
    """Affine softmax classifier fitted with Adam (L2 weight decay in the gradient).

    ``x`` is (dim, n). Returns ``(W, b)``.
    """
    d, n = x.shape
    # Zero start: with only a few dozen Adam steps a random start would dominate the fit.
    w = np.zeros((class_count, d))
    b = np.zeros((class_count, 1))
    params = [w, b]
    m = [np.zeros_like(p) for p in params]
    v = [np.zeros_like(p) for p in params]
    step = 0
    for epoch in range(cfg.epochs):
        order = philox(seed, (_STREAM_PROBE_SHUFFLE << 32) | epoch).permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            xb = x[:, idx]
            p = softmax_columns(w @ xb + b)
            dz = (p - one_hot(y[idx], class_count)) / idx.size
            grads = [dz @ xb.T, dz.sum(axis=1, keepdims=True)]
            step += 1
            for j, (prm, g) in enumerate(zip(params, grads)):
                g = g + cfg.weight_decay * prm
                m[j] = cfg.beta1 * m[j] + (1 - cfg.beta1) * g
                v[j] = cfg.beta2 * v[j] + (1 - cfg.beta2) * g * g
                mhat = m[j] / (1 - cfg.beta1**step)
                vhat = v[j] / (1 - cfg.beta2**step)
                prm -= cfg.learning_rate * mhat / (np.sqrt(vhat) + cfg.adam_eps)
    return w, b


def train_probe(features, labels, seed, *, layer=0, split="test", stage="post_activation",
                class_count=None, cfg=ProbeConfig()):
    """Held-out accuracy of a linear probe on frozen ``features`` (dim, n).

    Samples are split train/eval by ``cfg.train_fraction``; at most
    ``cfg.max_features`` feature rows are kept (seed-fixed subset).
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or x.shape[1] != y.shape[0]:
        raise DimensionError(f"features {x.shape} do not match {y.shape[0]} labels")
    if y.size < 2 or np.unique(y).size < 2:
        raise DegenerateError("probe needs at least two distinct labels")
    if class_count is None:
        class_count = int(y.max()) + 1
    x = x[feature_subset(x.shape[0], seed, cfg.max_features)]
    tr, te = split_indices(y.size, seed, cfg.train_fraction)
    w, b = fit_linear_probe(x[:, tr], y[tr], class_count, seed, cfg)
    pred = (w @ x[:, te] + b).argmax(axis=0)
    return ProbeResult(layer=layer, split=split, accuracy=float(np.mean(pred == y[te])), stage=stage)
