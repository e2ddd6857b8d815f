"""Implementations behind each subcommand; usable directly from Python."""
import csv
import io
import json
import multiprocessing
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ..diagnostics import SCHEMA_VERSION, MetricsReport, metrics_report, solutions_rank
from ..errors import ConfigError, TrainingError
from ..net import InitScheme, train
from ..net.train import shuffle_order
from ..theory import run_verifier, sweep_csv
from .config import apply_overrides, run_id
from .store import atomic_write, load_run, log_event, save_run

DELTA_KEYS = ("kappa", "rho", "sr", "orthodev", "final_logits_norm_ratio")


def run_dir_for(cfg):
    return os.path.join(cfg.output_dir, run_id(cfg))


def _train_and_save(cfg, shuffle_orders=None):
    rdir = run_dir_for(cfg)
    train_set = cfg.dataset.load("train", cfg.seed)
    log_event(rdir, f"train start run_id={run_id(cfg)}")
    try:
        trace = train(cfg.net, cfg.init, cfg.train, train_set, record_epochs=cfg.record_epochs,
                      shuffle_orders=shuffle_orders)
    except TrainingError as exc:
        if exc.trace is not None:
            save_run(exc.trace, cfg, rdir, status="diverged",
                     error={"message": str(exc), "last_valid_epoch": exc.last_valid_epoch})
        log_event(rdir, f"train diverged: {exc}")
        raise
    save_run(trace, cfg, rdir)
    log_event(rdir, "train done")
    return rdir, trace


def cmd_train(cfg):
    """Train and persist; returns the run directory."""
    return _train_and_save(cfg)[0]


def _analyze_trace(cfg, trace, ood_source=None, alignment_epochs=None):
    id_set = cfg.dataset.load("test", cfg.seed)
    ood_set = (ood_source or cfg.ood_source()).load("ood", cfg.seed)
    return metrics_report(trace, id_set, ood_set, cfg.rank_policy, seed=cfg.seed,
                          alignment_epochs=alignment_epochs)


def write_metrics(report, rdir):
    atomic_write(os.path.join(rdir, "metrics", "metrics.json"), report.to_json() + "\n")
    atomic_write(os.path.join(rdir, "metrics", "curves.csv"), report.curves_csv())


def cmd_analyze(run_dir, ood_source=None, rank_policy=None, alignment_epochs=None):
    cfg, trace, _ = load_run(run_dir)
    if rank_policy is not None:
        cfg = replace(cfg, rank_policy=rank_policy)
    report = _analyze_trace(cfg, trace, ood_source, alignment_epochs)
    write_metrics(report, run_dir)
    log_event(run_dir, "analyze done")
    return report


@dataclass
class PairedRunResult:
    baseline: MetricsReport
    variant: MetricsReport
    deltas: dict
    baseline_dir: str = None
    variant_dir: str = None

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "baseline_run": self.baseline_dir,
            "variant_run": self.variant_dir,
            "baseline": self.baseline.to_dict(),
            "variant": self.variant.to_dict(),
            "deltas": self.deltas,
        }


def paired_deltas(base, var):
    """Variant minus baseline; the logits entry compares final/initial norm growth."""
    return {
        "kappa": var.kappa - base.kappa,
        "rho": var.rho - base.rho,
        "sr": var.sr - base.sr,
        "orthodev": var.orthodev - base.orthodev,
        "final_logits_norm_ratio": var.logits_norm_growth - base.logits_norm_growth,
    }


def _one_side(args):
    cfg, orders = args
    rdir, trace = _train_and_save(cfg, orders)
    report = _analyze_trace(cfg, trace)
    write_metrics(report, rdir)
    return rdir, report


def cmd_paired(cfg, overrides, parallel=False):
    """Baseline ``cfg`` against ``cfg`` with ``train.*`` overrides, on identical data and shuffles."""
    variant = apply_overrides(cfg, overrides)
    n = cfg.dataset.load("train", cfg.seed).size
    if variant.train.epochs > cfg.train.epochs:
        raise ConfigError("the variant cannot run more epochs than the baseline whose shuffles it replays",
                          field="train.epochs")
    # Both sides replay the baseline's per-epoch permutations.
    orders = [shuffle_order(n, cfg.seed, e) for e in range(1, cfg.train.epochs + 1)]
    jobs = [(cfg, orders), (variant, orders)]
    if parallel:
        # spawn: forking after the OpenMP runtime has started is unsafe
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=2, mp_context=ctx) as ex:
            (bdir, base), (vdir, var) = ex.map(_one_side, jobs)
    else:
        (bdir, base), (vdir, var) = map(_one_side, jobs)
    result = PairedRunResult(base, var, paired_deltas(base, var), bdir, vdir)
    out = os.path.join(cfg.output_dir, f"paired_{run_id(cfg)}_{run_id(variant)}.json")
    atomic_write(out, json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n")
    return result, out


def sr_mode(values):
    """Most frequent SR; ties go to the smaller rank."""
    counts = Counter(int(v) for v in values)
    best = max(counts.values())
    return min(v for v, c in counts.items() if c == best)


def aggregate_paired(results):
    """Mean of κ, ρ, OrthoDev and logits growth; mode of SR."""
    def agg(reports):
        return {
            "kappa": float(np.mean([r.kappa for r in reports])),
            "rho": float(np.mean([r.rho for r in reports])),
            "sr": sr_mode([r.sr for r in reports]),
            "orthodev": float(np.mean([r.orthodev for r in reports])),
            "logits_norm_growth": float(np.mean([r.logits_norm_growth for r in reports])),
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "seeds": len(results),
        "baseline": agg([r.baseline for r in results]),
        "variant": agg([r.variant for r in results]),
    }


def cmd_verify(claim_id, out_dir, **params):
    records, summary = run_verifier(claim_id, **params)
    doc = {"schema_version": SCHEMA_VERSION, "summary": summary, "trials": records}
    path = os.path.join(out_dir, "verify", f"{claim_id}.json")
    atomic_write(path, json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n")
    text = sweep_csv(claim_id, records)
    if text is not None:
        atomic_write(os.path.join(out_dir, "verify", f"{claim_id}.csv"), text)
    return summary, path


INIT_SWEEP_HEADER = ("sigma", "seed", "initial_logits_norm", "final_sr")


def init_sweep_rows(cfg, sigmas, seeds):
    rows = []
    for seed in seeds:
        for sigma in sigmas:
            run = replace(cfg, init=InitScheme("normal", float(sigma)),
                          train=replace(cfg.train, seed=int(seed)), record_epochs=(0, cfg.train.epochs))
            _, trace = _train_and_save(run)
            first = trace.snapshots[0]
            rows.append((float(sigma), int(seed), float(np.linalg.norm(first.logits)),
                         solutions_rank(trace.final.logits, cfg.rank_policy)))
    return rows


def cmd_init_sweep(cfg, sigmas, seeds=None):
    seeds = [cfg.seed] if not seeds else seeds
    rows = init_sweep_rows(cfg, sigmas, seeds)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(INIT_SWEEP_HEADER)
    for s, seed, norm, sr in rows:
        w.writerow((repr(s), seed, repr(norm), sr))
    path = os.path.join(cfg.output_dir, "init_sweep.csv")
    atomic_write(path, buf.getvalue())
    return rows, path
