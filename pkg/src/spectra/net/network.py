"""Bias-free ReLU MLP: initialisation, forward pass and exact backward pass.

Layer ``i`` (1-based) maps ``A^{i-1}`` to ``Z^i = W^i A^{i-1}``; hidden layers
apply ReLU, the last layer's ``Z^L`` is the logits matrix.  Samples are
columns throughout.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import ConfigError, DimensionError, ValidationError
from .softmax import log_softmax_with_temperature, softmax_with_temperature

CROSS_ENTROPY = "cross_entropy"
MSE_AFTER_SOFTMAX = "mse_after_softmax"
LOSS_KINDS = (CROSS_ENTROPY, MSE_AFTER_SOFTMAX)

INIT_KINDS = ("kaiming", "framework_default", "normal")

# Philox key words separating independent random streams of one seed.
STREAM_INIT = 11


@dataclass(frozen=True)
class NetSpec:
    layer_widths: tuple
    activation: str = "relu"

    def __post_init__(self):
        widths = tuple(int(w) for w in self.layer_widths)
        object.__setattr__(self, "layer_widths", widths)
        if len(widths) < 2:
            raise ValidationError("a network needs at least an input and an output width")
        if any(w < 1 for w in widths):
            raise ValidationError(f"all widths must be >= 1, got {widths}")
        if self.activation != "relu":
            raise ValidationError(f"unsupported activation {self.activation!r}")

    @property
    def depth(self):
        return len(self.layer_widths) - 1

    @property
    def input_dim(self):
        return self.layer_widths[0]

    @property
    def class_count(self):
        return self.layer_widths[-1]


@dataclass(frozen=True)
class InitScheme:
    kind: str = "kaiming"
    sigma: float = None

    def __post_init__(self):
        if self.kind not in INIT_KINDS:
            raise ValidationError(f"init kind must be one of {INIT_KINDS}, got {self.kind!r}")
        if self.kind == "normal" and not (self.sigma is not None and self.sigma > 0):
            raise ValidationError("normal init needs sigma > 0")


def philox(*key_words):
    """Generator keyed on up to two 64-bit words (counter-based, order-free)."""
    words = [int(w) % (1 << 64) for w in key_words]
    if len(words) > 2:
        raise ValueError("Philox keys hold two words")
    words += [0] * (2 - len(words))
    return np.random.Generator(np.random.Philox(key=np.array(words, dtype=np.uint64)))


def init_network(spec, scheme, seed):
    """List of weight matrices ``W^i`` of shape (width_i, width_{i-1})."""
    weights = []
    for i in range(spec.depth):
        fan_in, fan_out = spec.layer_widths[i], spec.layer_widths[i + 1]
        rng = philox(seed, (STREAM_INIT << 32) | i)
        if scheme.kind == "kaiming":
            w = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in))
        elif scheme.kind == "framework_default":
            bound = 1.0 / np.sqrt(fan_in)
            w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        else:
            w = rng.normal(0.0, scheme.sigma, size=(fan_out, fan_in))
        weights.append(w)
    return weights


class Forward(NamedTuple):
    activations: list  # A^0 (the batch) .. A^{L-1}
    preactivations: list  # Z^1 .. Z^L, Z^L is the logits
    logits: np.ndarray
    probs: np.ndarray


def _check_shapes(weights, spec, batch):
    if len(weights) != spec.depth:
        raise DimensionError(f"expected {spec.depth} weight matrices, got {len(weights)}")
    for i, w in enumerate(weights):
        want = (spec.layer_widths[i + 1], spec.layer_widths[i])
        if w.shape != want:
            raise DimensionError(f"W^{i + 1} has shape {w.shape}, expected {want}")
    if batch.ndim != 2 or batch.shape[0] != spec.input_dim:
        raise DimensionError(f"batch must have {spec.input_dim} rows, got shape {batch.shape}")


def forward(weights, spec, batch, t):
    batch = np.asarray(batch, dtype=np.float64)
    _check_shapes(weights, spec, batch)
    acts = [batch]
    pres = []
    a = batch
    for i, w in enumerate(weights):
        z = w @ a
        pres.append(z)
        if i < spec.depth - 1:
            a = np.maximum(z, 0.0)
            acts.append(a)
    logits = pres[-1]
    return Forward(acts, pres, logits, softmax_with_temperature(logits, t))


def one_hot(labels, c):
    labels = np.asarray(labels, dtype=np.int64)
    y = np.zeros((c, labels.shape[0]))
    y[labels, np.arange(labels.shape[0])] = 1.0
    return y


def loss_value(logits, labels, t, loss_kind, probs=None):
    """Mean loss over the batch."""
    if loss_kind == CROSS_ENTROPY:
        logp = log_softmax_with_temperature(logits, t)
        labels = np.asarray(labels, dtype=np.int64)
        return float(-logp[labels, np.arange(labels.shape[0])].mean())
    if loss_kind == MSE_AFTER_SOFTMAX:
        p = softmax_with_temperature(logits, t) if probs is None else probs
        y = one_hot(labels, logits.shape[0])
        return float(np.mean((p - y) ** 2))
    raise ConfigError(f"unknown loss kind {loss_kind!r}", field="train.loss")


def logits_gradient(probs, labels, t, loss_kind):
    """dL/dM for mean loss; the 1/T factor comes from differentiating M/T."""
    c, b = probs.shape
    y = one_hot(labels, c)
    if loss_kind == CROSS_ENTROPY:
        return (probs - y) / (t * b)
    if loss_kind == MSE_AFTER_SOFTMAX:
        dp = 2.0 * (probs - y) / (c * b)
        dz = probs * (dp - (probs * dp).sum(axis=0, keepdims=True))
        return dz / t
    raise ConfigError(f"unknown loss kind {loss_kind!r}", field="train.loss")


def backward(weights, spec, batch, labels, t, loss_kind, fwd=None):
    """Exact gradients ``dL/dW^i`` of the mean loss, in layer order."""
    if loss_kind not in LOSS_KINDS:
        raise ConfigError(f"unknown loss kind {loss_kind!r}", field="train.loss")
    if fwd is None:
        fwd = forward(weights, spec, batch, t)
    delta = logits_gradient(fwd.probs, labels, t, loss_kind)
    grads = [None] * spec.depth
    for i in range(spec.depth - 1, -1, -1):
        grads[i] = delta @ fwd.activations[i].T
        if i > 0:
            delta = (weights[i].T @ delta) * (fwd.preactivations[i - 1] > 0.0)
    return grads
