import numpy as np

from ..linalg import DEFAULT_POLICY, frobenius_norm, numerical_rank
from ..net.softmax import softmax_with_temperature


def logits_norm_curve(trace):
    return np.array([frobenius_norm(s.logits) for s in trace.snapshots])


def rank_curves(trace, policy=DEFAULT_POLICY):
    """Numerical rank of the logits and of their column softmax at the run's temperature."""
    t = trace.config.temperature
    pre = [numerical_rank(s.logits, policy) for s in trace.snapshots]
    post = [numerical_rank(softmax_with_temperature(s.logits, t), policy) for s in trace.snapshots]
    return np.array(pre, dtype=np.int64), np.array(post, dtype=np.int64)
