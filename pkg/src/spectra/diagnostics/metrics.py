"""Summary metrics (effective depth, OOD generalisation loss, solutions rank,
OrthoDev) and the report that bundles them with the training curves."""
import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateError, DimensionError, SpectraError
from ..linalg import DEFAULT_POLICY, numerical_rank
from ..net.network import forward
from .alignment import DEFAULT_K, alignment_report
from .curves import logits_norm_curve, rank_curves
from .probe import ProbeConfig, ProbeResult, train_probe

SCHEMA_VERSION = 1
QUALIFY_FRACTION = 0.99
CURVE_NAMES = ("logits_norm", "pre_rank", "post_rank", "alignment_avg")


def effective_depth(probe_accs, total_layers=None):
    """κ: 1-based index of the first layer within 99% of the last layer's accuracy, over L."""
    accs = np.asarray(probe_accs, dtype=np.float64)
    if accs.size == 0:
        raise DimensionError("effective depth needs at least one layer")
    if total_layers is not None and total_layers != accs.size:
        raise DimensionError(f"{accs.size} accuracies for {total_layers} layers")
    target = QUALIFY_FRACTION * accs[-1]
    first = int(np.flatnonzero(accs >= target)[0]) + 1
    return first / accs.size


def ood_generalization_loss(ood_probe_accs):
    """ρ = (best layer accuracy - final layer accuracy) / best layer accuracy."""
    accs = np.asarray(ood_probe_accs, dtype=np.float64)
    if accs.size == 0:
        raise DimensionError("OOD generalisation loss needs at least one layer")
    best = accs.max()
    if best <= 0:
        raise DegenerateError("all OOD accuracies are zero; ρ is undefined")
    return float((best - accs[-1]) / best)


def solutions_rank(logits, policy=DEFAULT_POLICY):
    return numerical_rank(logits, policy)


def orthodev(penultimate_id, labels, penultimate_ood):
    """Mean |cos| between ID class means and the global OOD mean (columns are samples)."""
    x = np.asarray(penultimate_id, dtype=np.float64)
    z = np.asarray(penultimate_ood, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if x.shape[0] != z.shape[0]:
        raise DimensionError("ID and OOD representations come from different widths")
    if x.shape[1] != y.size:
        raise DimensionError("one label per ID sample required")
    g = z.mean(axis=1)
    gn = np.linalg.norm(g)
    if gn == 0:
        raise DegenerateError("global OOD mean has zero norm")
    cosines = []
    for c in np.unique(y):
        mu = x[:, y == c].mean(axis=1)
        mn = np.linalg.norm(mu)
        if mn == 0:
            raise DegenerateError(f"class {int(c)} mean has zero norm")
        cosines.append(abs(float(mu @ g)) / (mn * gn))
    return float(np.mean(cosines))


@dataclass
class MetricsReport:
    kappa: float
    rho: float
    sr: int
    orthodev: float
    curves: dict = field(default_factory=dict)  # name -> list of (epoch, value)
    probes: list = field(default_factory=list)

    def curve(self, name):
        return np.array([v for _, v in self.curves[name]])

    @property
    def logits_norm_growth(self):
        c = self.curve("logits_norm")
        return float(c[-1] / c[0]) if c[0] > 0 else float("inf")

    @property
    def final_alignment(self):
        return float(self.curve("alignment_avg")[-1])

    def probe_accuracies(self, split, stage_final="pre_softmax"):
        rows = sorted((p for p in self.probes if p.split == split and p.stage != _other(stage_final)),
                      key=lambda p: p.layer)
        return [p.accuracy for p in rows]

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "kappa": self.kappa,
            "rho": self.rho,
            "sr": self.sr,
            "orthodev": self.orthodev,
            "curves": {k: [{"epoch": int(e), "value": v} for e, v in pts] for k, pts in self.curves.items()},
            "probes": [p.to_dict() for p in self.probes],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        if d.get("schema_version") != SCHEMA_VERSION:
            raise SpectraError(f"unsupported metrics schema_version {d.get('schema_version')!r}")
        curves = {k: [(int(p["epoch"]), p["value"]) for p in pts] for k, pts in d["curves"].items()}
        probes = [ProbeResult(p["layer"], p["split"], p["accuracy"], p.get("stage", "post_activation"))
                  for p in d["probes"]]
        return cls(d["kappa"], d["rho"], int(d["sr"]), d["orthodev"], curves, probes)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def curves_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epoch", *CURVE_NAMES])
        columns = [dict(self.curves.get(name, [])) for name in CURVE_NAMES]
        for epoch in sorted(columns[0]):
            w.writerow([epoch] + [_fmt(col.get(epoch, "")) for col in columns])
        return buf.getvalue()


def _other(stage):
    return "post_softmax" if stage == "pre_softmax" else "pre_softmax"


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def layer_probes(weights, spec, dataset, t, seed, split, cfg=ProbeConfig()):
    """Probe every layer: post-activation hidden layers, then logits and softmax outputs."""
    fwd = forward(weights, spec, dataset.features, t)
    out = []
    reps = [(i, fwd.activations[i], "post_activation") for i in range(1, spec.depth)]
    reps += [(spec.depth, fwd.logits, "pre_softmax"), (spec.depth, fwd.probs, "post_softmax")]
    for layer, feats, stage in reps:
        try:
            res = train_probe(feats, dataset.labels, seed, layer=layer, split=split, stage=stage,
                              class_count=dataset.class_count, cfg=cfg)
        except SpectraError as exc:
            raise type(exc)(f"probe layer {layer} ({stage}, {split}): {exc}") from exc
        out.append(res)
    return out, fwd


def metrics_report(trace, id_set, ood_set, policy=DEFAULT_POLICY, seed=0, *, k=DEFAULT_K,
                   probe_cfg=ProbeConfig(), alignment_epochs=None):
    """Probe every layer on the ID test and OOD sets with the final weights and
    assemble κ, ρ, SR, OrthoDev and the per-epoch curves.

    SR is taken on the trace's diagnostic batch, which is the full training set
    whenever it has at most 2048 samples.  κ and ρ use the pre-softmax probe
    for the last layer.
    """
    spec, t = trace.spec, trace.config.temperature
    final = trace.final
    id_probes, id_fwd = layer_probes(final.weights, spec, id_set, t, seed, "test", probe_cfg)
    ood_probes, ood_fwd = layer_probes(final.weights, spec, ood_set, t, seed, "ood", probe_cfg)
    probes = id_probes + ood_probes

    def accs(rows):
        return [p.accuracy for p in rows if p.stage != "post_softmax"]

    kappa = effective_depth(accs(id_probes))
    rho = ood_generalization_loss(accs(ood_probes))
    sr = solutions_rank(final.logits, policy)
    penult = spec.depth - 1
    od = orthodev(id_fwd.activations[penult], id_set.labels, ood_fwd.activations[penult])

    epochs = trace.epochs
    norms = logits_norm_curve(trace)
    pre, post = rank_curves(trace, policy)
    align = alignment_report(trace, k=min(k, min(spec.layer_widths[:-1])), epochs=alignment_epochs)
    curves = {
        "logits_norm": [(e, float(v)) for e, v in zip(epochs, norms)],
        "pre_rank": [(e, int(v)) for e, v in zip(epochs, pre)],
        "post_rank": [(e, int(v)) for e, v in zip(epochs, post)],
        "alignment_avg": [(e, float(v)) for e, v in zip(align.epochs, align.curve())],
    }
    return MetricsReport(kappa, rho, sr, od, curves, probes)
