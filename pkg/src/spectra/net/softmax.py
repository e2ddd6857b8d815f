"""Temperature softmax over matrix columns (classes down rows, samples across)."""
import numpy as np

from ..errors import DomainError, ValidationError
from ..linalg.matrix import as_matrix


def _check_t(t):
    if not (np.isfinite(t) and t > 0):
        raise DomainError(f"temperature must be > 0, got {t}")


def softmax_columns(logits):
    """Plain softmax down each column with max-subtraction."""
    z = logits - logits.max(axis=0, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=0, keepdims=True)


def softmax_rows(logits):
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def softmax_with_temperature(logits, t):
    """Column-wise ``exp(e/T) / sum exp(e/T)``; computed literally as softmax of ``e/T``."""
    _check_t(t)
    m = as_matrix(logits, name="logits")
    return softmax_columns(m / t)


def log_softmax_with_temperature(logits, t):
    _check_t(t)
    z = np.asarray(logits, dtype=np.float64) / t
    z = z - z.max(axis=0, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=0, keepdims=True))


def per_sample_cross_entropy(logits, labels, t):
    logp = log_softmax_with_temperature(logits, t)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape[0] != logp.shape[1]:
        raise ValidationError("one label per logits column required")
    return -logp[labels, np.arange(labels.shape[0])]
