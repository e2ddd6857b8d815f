"""Minibatch SGD with momentum, weight decay and milestone LR decay."""
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DimensionError, TrainingError, ValidationError
from .network import CROSS_ENTROPY, LOSS_KINDS, backward, forward, init_network, loss_value, philox

log = logging.getLogger(__name__)

DIAGNOSTIC_CAP = 2048
_STREAM_SHUFFLE = 41
_STREAM_DIAGNOSTIC = 42


@dataclass(frozen=True)
class TrainConfig:
    temperature: float = 1.0
    learning_rate: float = 0.05
    momentum: float = 0.0
    weight_decay: float = 0.0
    epochs: int = 100
    batch_size: int = 128
    seed: int = 0
    loss: str = CROSS_ENTROPY
    lr_decay_milestones: tuple = ()
    lr_decay_gamma: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "lr_decay_milestones", tuple(int(m) for m in self.lr_decay_milestones))
        checks = [
            (self.temperature > 0, "temperature", "must be > 0"),
            (self.learning_rate >= 0, "learning_rate", "must be >= 0"),
            (self.momentum >= 0, "momentum", "must be >= 0"),
            (self.weight_decay >= 0, "weight_decay", "must be >= 0"),
            (self.epochs >= 0, "epochs", "must be >= 0"),
            (self.batch_size >= 1, "batch_size", "must be >= 1"),
            (self.seed >= 0, "seed", "must be >= 0"),
            (self.loss in LOSS_KINDS, "loss", f"must be one of {LOSS_KINDS}"),
            (self.lr_decay_gamma >= 0, "lr_decay_gamma", "must be >= 0"),
        ]
        for ok, name, msg in checks:
            if not ok:
                raise ConfigError(f"train.{name} {msg}", field=f"train.{name}")

    def lr_at(self, epoch):
        """Learning rate used during 1-based ``epoch``."""
        passed = sum(1 for m in self.lr_decay_milestones if epoch > m)
        return self.learning_rate * self.lr_decay_gamma**passed


@dataclass
class Snapshot:
    epoch: int
    weights: list
    preactivations: list  # Z^1..Z^L on the diagnostic batch
    activations: list  # A^0..A^{L-1} on the diagnostic batch
    gradients: list  # dL/dW^i on the diagnostic batch
    logits: np.ndarray
    probs: np.ndarray
    loss: float
    accuracy: float


@dataclass
class TrainTrace:
    spec: object
    init: object
    config: TrainConfig
    diagnostic_features: np.ndarray
    diagnostic_labels: np.ndarray
    snapshots: list = field(default_factory=list)
    shuffle_orders: list = field(default_factory=list)

    @property
    def epochs(self):
        return [s.epoch for s in self.snapshots]

    @property
    def final(self):
        return self.snapshots[-1]

    def at_epoch(self, epoch):
        for s in self.snapshots:
            if s.epoch == epoch:
                return s
        raise KeyError(epoch)


def diagnostic_indices(n, seed, cap=DIAGNOSTIC_CAP):
    """Fixed diagnostic sample: everything when ``n <= cap``, else a seeded subset."""
    if n <= cap:
        return np.arange(n)
    return np.sort(philox(seed, _STREAM_DIAGNOSTIC).permutation(n)[:cap])


def shuffle_order(n, seed, epoch):
    return philox(seed, (_STREAM_SHUFFLE << 32) | int(epoch)).permutation(n)


def evaluate(weights, spec, dataset, t, loss_kind):
    fwd = forward(weights, spec, dataset.features, t)
    loss = loss_value(fwd.logits, dataset.labels, t, loss_kind, probs=fwd.probs)
    acc = float(np.mean(fwd.logits.argmax(axis=0) == dataset.labels))
    return loss, acc


def snapshot(weights, spec, config, train_set, diag_x, diag_y, epoch):
    t = config.temperature
    fwd = forward(weights, spec, diag_x, t)
    grads = backward(weights, spec, diag_x, diag_y, t, config.loss, fwd=fwd)
    loss, acc = evaluate(weights, spec, train_set, t, config.loss)
    return Snapshot(
        epoch=epoch,
        weights=[w.copy() for w in weights],
        preactivations=fwd.preactivations,
        activations=fwd.activations,
        gradients=grads,
        logits=fwd.logits,
        probs=fwd.probs,
        loss=loss,
        accuracy=acc,
    )


def _record_set(record_epochs, epochs):
    if record_epochs == "all":
        return set(range(epochs + 1))
    wanted = {int(e) for e in record_epochs} | {0}
    bad = [e for e in wanted if not 0 <= e <= epochs]
    if bad:
        raise ConfigError(f"record_epochs {sorted(bad)} outside [0, {epochs}]", field="record_epochs")
    return wanted


def train(spec, init, config, train_set, diagnostic_batch=None, record_epochs="all",
          shuffle_orders=None, weights=None):
    """Train from ``init`` (or given ``weights``) and return the recorded trace.

    ``diagnostic_batch`` is an index array into ``train_set``; by default the
    fixed subset from :func:`diagnostic_indices`.  ``shuffle_orders`` replays
    the per-epoch permutations of another run; otherwise they are derived from
    ``(seed, epoch)``.
    """
    if train_set.dim != spec.input_dim:
        raise DimensionError(f"dataset dim {train_set.dim} != network input width {spec.input_dim}")
    if train_set.labels.max() >= spec.class_count:
        raise DimensionError("labels exceed the network's class count")
    n = train_set.size
    if diagnostic_batch is None:
        diagnostic_batch = diagnostic_indices(n, config.seed)
    diag = train_set.subset(diagnostic_batch)
    wanted = _record_set(record_epochs, config.epochs)
    if shuffle_orders is not None and len(shuffle_orders) < config.epochs:
        raise ConfigError("replayed shuffle orders do not cover every epoch")

    if weights is None:
        weights = init_network(spec, init, config.seed)
    weights = [np.array(w, dtype=np.float64) for w in weights]
    buffers = [None] * len(weights)
    trace = TrainTrace(spec, init, config, diag.features, diag.labels)
    trace.snapshots.append(snapshot(weights, spec, config, train_set, diag.features, diag.labels, 0))

    t = config.temperature
    bs = config.batch_size
    for epoch in range(1, config.epochs + 1):
        order = shuffle_orders[epoch - 1] if shuffle_orders is not None else shuffle_order(n, config.seed, epoch)
        order = np.asarray(order, dtype=np.int64)
        trace.shuffle_orders.append(order)
        lr = config.lr_at(epoch)
        for start in range(0, n, bs):
            idx = order[start:start + bs]
            x, y = train_set.features[:, idx], train_set.labels[idx]
            try:
                fwd = forward(weights, spec, x, t)
            except ValidationError as exc:  # softmax refuses overflowed logits
                raise TrainingError(f"non-finite logits during epoch {epoch}", epoch - 1, trace) from exc
            grads = backward(weights, spec, x, y, t, config.loss, fwd=fwd)
            for i, (w, g) in enumerate(zip(weights, grads)):
                if config.weight_decay:
                    g = g + config.weight_decay * w
                if config.momentum:
                    buffers[i] = g if buffers[i] is None else config.momentum * buffers[i] + g
                    g = buffers[i]
                w -= lr * g
        if not all(np.all(np.isfinite(w)) for w in weights):
            raise TrainingError(f"non-finite weights after epoch {epoch}", epoch - 1, trace)
        snap = None
        if epoch in wanted or epoch == config.epochs:
            try:
                snap = snapshot(weights, spec, config, train_set, diag.features, diag.labels, epoch)
            except ValidationError as exc:
                raise TrainingError(f"non-finite logits at epoch {epoch}", epoch - 1, trace) from exc
            if not np.isfinite(snap.loss):
                raise TrainingError(f"loss became non-finite at epoch {epoch}", epoch - 1, trace)
        if epoch in wanted:
            trace.snapshots.append(snap)
            log.debug("epoch %d loss %.6g acc %.4f", epoch, snap.loss, snap.accuracy)
    return trace
