"""Datasets: synthetic Gaussian blobs, labelled CSV and CIFAR-10 binary batches."""
import csv
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .network import philox

SPLITS = ("train", "test", "ood")
CIFAR_RECORD = 3073

_STREAM_CENTERS = 21
_STREAM_OOD_CENTERS = 22
_STREAM_NOISE = {"train": 31, "test": 32, "ood": 33}


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray  # (dim, n), one sample per column
    labels: np.ndarray
    class_count: int
    split: str = "train"

    def __post_init__(self):
        f = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "labels", y)
        if f.ndim != 2:
            raise ValidationError("features must be a (dim, n) matrix")
        if y.ndim != 1 or y.shape[0] != f.shape[1]:
            raise ValidationError(f"{y.shape[0]} labels for {f.shape[1]} samples")
        if self.class_count < 1:
            raise ValidationError("class_count must be >= 1")
        if y.size and (y.min() < 0 or y.max() >= self.class_count):
            raise ValidationError(f"labels must lie in [0, {self.class_count})")
        if self.split not in SPLITS:
            raise ValidationError(f"split must be one of {SPLITS}")
        if not np.all(np.isfinite(f)):
            raise ValidationError("features contain non-finite values")

    @property
    def dim(self):
        return self.features.shape[0]

    @property
    def size(self):
        return self.features.shape[1]

    def subset(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.features[:, idx], self.labels[idx], self.class_count, self.split)


def generate_blobs(class_count, dim, per_class, spread, seed, split="train"):
    """Isotropic Gaussian clusters around unit-norm random centres.

    ``train`` and ``test`` share centres and differ in noise; ``ood`` draws its
    centres from a separate stream so its classes are unrelated to the others.
    """
    if min(class_count, dim, per_class) < 1:
        raise ValidationError("class_count, dim and per_class must be >= 1")
    if not spread >= 0:
        raise ValidationError("spread must be >= 0")
    if split not in SPLITS:
        raise ValidationError(f"split must be one of {SPLITS}")
    stream = _STREAM_OOD_CENTERS if split == "ood" else _STREAM_CENTERS
    centers = philox(seed, stream).normal(size=(class_count, dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    labels = np.repeat(np.arange(class_count), per_class)
    noise = philox(seed, _STREAM_NOISE[split]).normal(size=(dim, labels.size))
    features = centers[labels].T + spread * noise
    return Dataset(features, labels, class_count, split)


def _is_number(tok):
    try:
        float(tok)
    except ValueError:
        return False
    return True


def read_dataset_csv(path, split="train", class_count=None):
    """``label,f0,f1,...`` per line; a header is skipped when its first token is not numeric."""
    labels, rows = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh)):
            if not row or not "".join(row).strip():
                continue
            if lineno == 0 and not _is_number(row[0]):
                continue
            lab = float(row[0])
            if lab != int(lab):
                raise ValidationError(f"{path}:{lineno + 1}: label {row[0]!r} is not an integer")
            labels.append(int(lab))
            rows.append([float(x) for x in row[1:]])
    if not rows:
        raise ValidationError(f"{path}: no samples")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValidationError(f"{path}: ragged rows (feature counts {sorted(widths)})")
    labels = np.asarray(labels)
    if class_count is None:
        class_count = int(labels.max()) + 1
    return Dataset(np.asarray(rows).T, labels, class_count, split)


def write_dataset_csv(ds, path, header=True):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(["label"] + [f"f{i}" for i in range(ds.dim)])
        for j in range(ds.size):
            w.writerow([int(ds.labels[j])] + [repr(float(x)) for x in ds.features[:, j]])


def read_cifar10_batch(paths, split="train"):
    """CIFAR-10 binary batches: 1 label byte + 3072 pixel bytes per record."""
    if isinstance(paths, (str, bytes)) or hasattr(paths, "__fspath__"):
        paths = [paths]
    feats, labels = [], []
    for path in paths:
        raw = np.fromfile(path, dtype=np.uint8)
        if raw.size == 0 or raw.size % CIFAR_RECORD:
            raise ValidationError(f"{path}: length {raw.size} is not a multiple of {CIFAR_RECORD}")
        rec = raw.reshape(-1, CIFAR_RECORD)
        labels.append(rec[:, 0].astype(np.int64))
        feats.append(rec[:, 1:].astype(np.float64) / 255.0)
    labels = np.concatenate(labels)
    if labels.max() > 9:
        raise ValidationError("CIFAR-10 labels must be in [0, 10)")
    return Dataset(np.concatenate(feats).T, labels, 10, split)
