"""Run configuration: a YAML file whose sections mirror :class:`RunConfig`.

Unknown keys are rejected so a typo can never silently change a run.
"""
import hashlib
import json
from dataclasses import dataclass, fields, replace

import yaml

from ..errors import ConfigError, SpectraError
from ..linalg import RankPolicy
from ..net import InitScheme, NetSpec, TrainConfig
from ..net.data import generate_blobs, read_cifar10_batch, read_dataset_csv

DATASET_KINDS = ("blobs", "csv", "cifar10")
_SECTIONS = ("net", "init", "train", "dataset", "ood_dataset", "rank_policy", "record_epochs", "output_dir")
_REQUIRED = {"net": ("layer_widths",), "train": ("temperature",)}
_DATASET_KEYS = {
    "blobs": {"kind", "class_count", "dim", "per_class", "spread", "seed", "test_per_class"},
    "csv": {"kind", "path", "test_path", "class_count"},
    "cifar10": {"kind", "paths", "test_paths"},
}


@dataclass(frozen=True)
class DatasetSource:
    """One of: generated blobs, a ``label,features...`` CSV, or CIFAR-10 binary batches.

    ``seed`` for blobs defaults to the run seed.  For the OOD source only the
    training-side entries (``path`` / ``paths``) are used.
    """
    kind: str = "blobs"
    class_count: int = 10
    dim: int = 64
    per_class: int = 100
    test_per_class: int = None
    spread: float = 0.3
    seed: int = None
    path: str = None
    test_path: str = None
    paths: tuple = ()
    test_paths: tuple = ()

    def to_dict(self):
        keep = _DATASET_KEYS[self.kind]
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name in keep and v is not None and v != ():
                out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    def load(self, split, run_seed):
        """Materialise the ``train``, ``test`` or ``ood`` split."""
        if self.kind == "blobs":
            seed = run_seed if self.seed is None else self.seed
            per = self.per_class
            if split == "test" and self.test_per_class is not None:
                per = self.test_per_class
            return generate_blobs(self.class_count, self.dim, per, self.spread, seed, split)
        if self.kind == "csv":
            path = self.test_path if split == "test" else self.path
            if path is None:
                raise ConfigError(f"dataset.test_path is needed for the {split} split", field="dataset.test_path")
            return read_dataset_csv(path, split, self.class_count)
        paths = self.test_paths if split == "test" else self.paths
        if not paths:
            raise ConfigError(f"dataset.test_paths is needed for the {split} split", field="dataset.test_paths")
        return read_cifar10_batch(list(paths), split)


@dataclass(frozen=True)
class RunConfig:
    net: NetSpec
    init: InitScheme
    train: TrainConfig
    dataset: DatasetSource
    ood_dataset: DatasetSource = None
    rank_policy: RankPolicy = RankPolicy()
    record_epochs: object = "all"
    output_dir: str = "runs"

    @property
    def seed(self):
        return self.train.seed

    def ood_source(self):
        """OOD data: the configured source, else blobs with fresh centres shaped like the ID blobs."""
        if self.ood_dataset is not None:
            return self.ood_dataset
        if self.dataset.kind == "blobs":
            return self.dataset
        raise ConfigError("ood_dataset is required for non-blob datasets", field="ood_dataset")

    def to_dict(self):
        out = {
            "net": {"layer_widths": list(self.net.layer_widths), "activation": self.net.activation},
            "init": {"kind": self.init.kind} | ({"sigma": self.init.sigma} if self.init.sigma is not None else {}),
            "train": {f.name: _plain(getattr(self.train, f.name)) for f in fields(self.train)},
            "dataset": self.dataset.to_dict(),
            "rank_policy": {"mode": self.rank_policy.mode, "threshold": self.rank_policy.threshold},
            "record_epochs": self.record_epochs if self.record_epochs == "all" else list(self.record_epochs),
            "output_dir": self.output_dir,
        }
        if self.ood_dataset is not None:
            out["ood_dataset"] = self.ood_dataset.to_dict()
        return out


def _plain(v):
    return list(v) if isinstance(v, tuple) else v


def _check_keys(section, given, allowed):
    extra = sorted(set(given) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key {section}.{extra[0]}", field=f"{section}.{extra[0]}")


def _section(raw, name):
    sec = raw.get(name, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section {name} must be a mapping", field=name)
    for key in _REQUIRED.get(name, ()):
        if key not in sec:
            raise ConfigError(f"missing required field {name}.{key}", field=f"{name}.{key}")
    return sec


def _build(cls, section, values, allowed=None):
    allowed = allowed if allowed is not None else {f.name for f in fields(cls)}
    _check_keys(section, values, allowed)
    try:
        return cls(**values)
    except ConfigError:
        raise
    except (SpectraError, TypeError, ValueError) as exc:
        raise ConfigError(f"{section}: {exc}", field=section) from exc


def _dataset(section, values):
    kind = values.get("kind", "blobs")
    if kind not in DATASET_KINDS:
        raise ConfigError(f"{section}.kind must be one of {DATASET_KINDS}", field=f"{section}.kind")
    values = dict(values)
    for key in ("paths", "test_paths"):
        if key in values:
            v = values[key]
            values[key] = (v,) if isinstance(v, str) else tuple(v)
    return _build(DatasetSource, section, values, _DATASET_KEYS[kind])


def config_from_dict(raw):
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of sections")
    _check_keys("", raw, _SECTIONS)
    for name in ("net", "train", "dataset"):
        if name not in raw:
            raise ConfigError(f"missing section {name}", field=name)
    net = _build(NetSpec, "net", _section(raw, "net"))
    init = _build(InitScheme, "init", _section(raw, "init"))
    tr = dict(_section(raw, "train"))
    if "lr_decay_milestones" in tr:
        tr["lr_decay_milestones"] = tuple(tr["lr_decay_milestones"] or ())
    train = _build(TrainConfig, "train", tr)
    dataset = _dataset("dataset", _section(raw, "dataset"))
    ood = _dataset("ood_dataset", _section(raw, "ood_dataset")) if raw.get("ood_dataset") else None
    policy = _build(RankPolicy, "rank_policy", _section(raw, "rank_policy"))
    rec = raw.get("record_epochs", "all")
    if rec != "all":
        if not isinstance(rec, list) or not all(isinstance(e, int) and e >= 0 for e in rec):
            raise ConfigError("record_epochs must be 'all' or a list of epochs", field="record_epochs")
        if any(e > train.epochs for e in rec):
            raise ConfigError(f"record_epochs beyond train.epochs={train.epochs}", field="record_epochs")
        rec = tuple(sorted(set(rec) | {0, train.epochs}))
    out = str(raw.get("output_dir", "runs"))
    if dataset.kind == "blobs" and dataset.dim != net.input_dim:
        raise ConfigError(f"dataset.dim {dataset.dim} != net input width {net.input_dim}", field="dataset.dim")
    if dataset.kind == "blobs" and dataset.class_count != net.class_count:
        raise ConfigError("dataset.class_count differs from the net output width", field="dataset.class_count")
    return RunConfig(net, init, train, dataset, ood, policy, rec, out)


def load_config(path):
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    return config_from_dict(raw)


def dump_config(cfg):
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True, default_flow_style=None)


def canonical_json(cfg):
    d = cfg.to_dict()
    d.pop("output_dir")
    return json.dumps(d, sort_keys=True, separators=(",", ":"))


def run_id(cfg):
    """Short content hash of everything that influences the run (not where it is stored)."""
    return hashlib.sha256(canonical_json(cfg).encode()).hexdigest()[:12]


def with_train(cfg, **changes):
    try:
        return replace(cfg, train=replace(cfg.train, **changes))
    except TypeError as exc:
        raise ConfigError(str(exc), field="train") from exc


def apply_overrides(cfg, overrides):
    """Apply ``train.<field>=<yaml value>`` overrides; any other section is rejected."""
    changes = {}
    names = {f.name for f in fields(TrainConfig)}
    for item in overrides:
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"override {item!r} is not key=value")
        section, _, name = key.partition(".")
        if section != "train":
            raise ConfigError(f"override {key} touches {section}; paired variants may only change train.*",
                              field=key)
        if name not in names:
            raise ConfigError(f"unknown key {key}", field=key)
        if name == "seed":
            raise ConfigError("paired runs must share train.seed", field=key)
        v = yaml.safe_load(value)
        changes[name] = tuple(v) if isinstance(v, list) else v
    return with_train(cfg, **changes)
