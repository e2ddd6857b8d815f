"""On-disk layout of a run.

::

    <out>/<run-id>/manifest.json        schema_version, status, per-file sha256
    <out>/<run-id>/config.yaml
    <out>/<run-id>/diagnostic_{features,labels}.csv
    <out>/<run-id>/shuffle_orders.csv
    <out>/<run-id>/snapshots/epoch_<k>/{W,grad}_<i>.csv, logits.csv, probs.csv
    <out>/<run-id>/metrics/...
    <out>/<run-id>/run.log              timestamps (never hashed)

Activations are not stored; loading recomputes them from the weights.
"""
import datetime
import hashlib
import io
import json
import os
import tempfile

import numpy as np

from ..errors import MissingArtifactsError, SpectraError
from ..linalg import read_csv, write_csv
from ..net import forward
from ..net.train import Snapshot, TrainTrace
from .config import dump_config, load_config

SCHEMA_VERSION = 1
MANIFEST = "manifest.json"


def atomic_write(path, data):
    """Write to a temp file in the target directory, then rename over ``path``."""
    if isinstance(data, str):
        data = data.encode()
    d = os.path.dirname(path) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _matrix_csv(m):
    buf = io.StringIO()
    write_csv(np.atleast_2d(m), buf)
    return buf.getvalue()


def log_event(run_dir, message):
    os.makedirs(run_dir, exist_ok=True)
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    with open(os.path.join(run_dir, "run.log"), "a") as fh:
        fh.write(f"{stamp} {message}\n")


def save_run(trace, cfg, run_dir, status="complete", error=None):
    """Persist ``trace`` and write the manifest last, so a manifest means a complete write."""
    files = {}

    def put(rel, text):
        atomic_write(os.path.join(run_dir, rel), text)
        files[rel] = hashlib.sha256(text.encode()).hexdigest()

    put("config.yaml", dump_config(cfg))
    put("diagnostic_features.csv", _matrix_csv(trace.diagnostic_features))
    put("diagnostic_labels.csv", _matrix_csv(trace.diagnostic_labels.astype(np.float64)))
    if trace.shuffle_orders:
        put("shuffle_orders.csv", _matrix_csv(np.asarray(trace.shuffle_orders, dtype=np.float64)))
    snaps = []
    for s in trace.snapshots:
        base = f"snapshots/epoch_{s.epoch}"
        for i, (w, g) in enumerate(zip(s.weights, s.gradients), start=1):
            put(f"{base}/W_{i}.csv", _matrix_csv(w))
            put(f"{base}/grad_{i}.csv", _matrix_csv(g))
        put(f"{base}/logits.csv", _matrix_csv(s.logits))
        put(f"{base}/probs.csv", _matrix_csv(s.probs))
        snaps.append({"epoch": s.epoch, "loss": repr(float(s.loss)), "accuracy": repr(float(s.accuracy))})
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "status": status,
        "depth": trace.spec.depth,
        "epochs": [s["epoch"] for s in snaps],
        "snapshots": snaps,
        "files": dict(sorted(files.items())),
    }
    if error is not None:
        manifest["error"] = error
    atomic_write(os.path.join(run_dir, MANIFEST), json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def read_manifest(run_dir):
    path = os.path.join(run_dir, MANIFEST)
    if not os.path.exists(path):
        raise MissingArtifactsError(f"{run_dir}: no {MANIFEST}")
    with open(path) as fh:
        manifest = json.load(fh)
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise SpectraError(f"unsupported manifest schema_version {manifest.get('schema_version')!r}")
    return manifest


def missing_files(run_dir, manifest):
    return [rel for rel in manifest["files"] if not os.path.exists(os.path.join(run_dir, rel))]


def load_run(run_dir):
    """Return ``(cfg, trace, manifest)``; raises :class:`MissingArtifactsError` naming absent epochs."""
    manifest = read_manifest(run_dir)
    gone = missing_files(run_dir, manifest)
    if gone:
        epochs = sorted({int(r.split("/")[1][len("epoch_"):]) for r in gone if r.startswith("snapshots/")})
        detail = f"missing snapshot epochs {epochs}" if epochs else f"missing files {gone}"
        raise MissingArtifactsError(f"{run_dir}: {detail}", epochs)
    cfg = load_config(os.path.join(run_dir, "config.yaml"))
    rd = lambda rel: read_csv(os.path.join(run_dir, rel))  # noqa: E731
    diag_x = rd("diagnostic_features.csv")
    diag_y = rd("diagnostic_labels.csv").ravel().astype(np.int64)
    orders = []
    if "shuffle_orders.csv" in manifest["files"]:
        orders = [row.astype(np.int64) for row in rd("shuffle_orders.csv")]
    trace = TrainTrace(cfg.net, cfg.init, cfg.train, diag_x, diag_y, shuffle_orders=orders)
    depth = manifest["depth"]
    t = cfg.train.temperature
    for entry in manifest["snapshots"]:
        base = f"snapshots/epoch_{entry['epoch']}"
        weights = [rd(f"{base}/W_{i}.csv") for i in range(1, depth + 1)]
        grads = [rd(f"{base}/grad_{i}.csv") for i in range(1, depth + 1)]
        fwd = forward(weights, cfg.net, diag_x, t)
        trace.snapshots.append(Snapshot(
            epoch=entry["epoch"], weights=weights, preactivations=fwd.preactivations,
            activations=fwd.activations, gradients=grads, logits=rd(f"{base}/logits.csv"),
            probs=rd(f"{base}/probs.csv"), loss=float(entry["loss"]), accuracy=float(entry["accuracy"]),
        ))
    return cfg, trace, manifest
