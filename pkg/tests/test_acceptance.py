"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line and
stores it for the end-of-session summary; thresholds are fixed constants here."""
import os
import time
from dataclasses import replace

import numpy as np
import pytest

from conftest import ACCEPTANCE
from oracles import net_loss_ref, singular_values_oracle
from spectra.cli.commands import cmd_paired, init_sweep_rows
from spectra.cli.config import load_config, with_train
from spectra.diagnostics import effective_depth, gradient_rank_check, ood_generalization_loss
from spectra.linalg import singular_values
from spectra.net import InitScheme, NetSpec, backward, forward, generate_blobs, init_network, train
from spectra.net import TrainConfig, per_sample_cross_entropy, softmax_with_temperature
from spectra.theory import run_verifier

REFERENCE = os.path.join(os.path.dirname(__file__), "..", "configs", "reference.yaml")
SEEDS = (1, 2, 3)


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def test_c01_gap_bound_suite():
    t0 = time.perf_counter()
    _, s = run_verifier("gap_bound", trials=10_000, n_min=2, n_max=64, seed=0)
    dt = time.perf_counter() - t0
    ident, first = s["tightness"]["identity"], s["tightness"]["first_row"]
    ok = (s["violations"] == 0 and s["worst_slack"] >= -1e-9 and ident["gap"] == 0.0
          and abs(first["gap"] - 2.0) < 1e-9 and abs(first["bound"] - 2.0) < 1e-9 and dt < 120)
    assert record(1, ok, f"violations={s['violations']} worst_slack={s['worst_slack']:.3g} {dt:.1f}s")


def test_c02_rank2_full_rank():
    t0 = time.perf_counter()
    _, s = run_verifier("rank2_full", sizes=(4, 8, 16, 32), seeds=100, c_max=1e6, seed=0)
    dt = time.perf_counter() - t0
    ok = s["rank_violations"] == 0 and s["limit_violations"] == 0 and dt < 180
    assert record(2, ok, f"full-rank misses={s['rank_violations']}/{s['trials']} "
                         f"identity-limit misses={s['limit_violations']} degenerate={s['degenerate']} {dt:.1f}s")


def test_c03_nc_rank():
    t0 = time.perf_counter()
    recs, s = run_verifier("nc_rank", classes=list(range(2, 65)), per_class=5)
    dt = time.perf_counter() - t0
    ok = (s["violations"] == 0 and all(r["rank"] == r["classes"] - 1 for r in recs)
          and max(r["gram_error"] for r in recs) < 1e-9 and dt < 30)
    assert record(3, ok, f"violations={s['violations']} max_gram_err={max(r['gram_error'] for r in recs):.2g} "
                         f"{dt:.1f}s")


def test_c04_scaling():
    t0 = time.perf_counter()
    recs, _ = run_verifier("scaling", n=50, k=(1, 2, 3, 4, 5), trials=20, seed=0)
    dt = time.perf_counter() - t0
    pre_ok = all(r["pre_rank_ok"] for r in recs)
    lo = {k: next(r for r in recs if r["k"] == k) for k in range(1, 6)}
    hi = {k: [r for r in recs if r["k"] == k][-1] for k in range(1, 6)}
    assert all(r["scale"] < 1e-3 for r in lo.values()) and all(r["scale"] >= 1e3 for r in hi.values())
    ok = (pre_ok and all(r["mean_rank"] == 1.0 for r in lo.values())
          and all(r["mean_rank"] >= 45 for r in hi.values()) and dt < 120)
    detail = "rank@max=" + ",".join(f"{hi[k]['mean_rank']:.1f}" for k in range(1, 6))
    assert record(4, ok, f"pre_rank_ok={pre_ok} rank@min={[lo[k]['mean_rank'] for k in lo]} {detail} {dt:.1f}s")


def test_c05_gradient_rank_bound():
    t0 = time.perf_counter()
    spec = NetSpec((16, 16, 16, 16, 10))
    ds = generate_blobs(10, 16, 50, 0.3, seed=5)
    cells = []
    for t in (1.0, 100.0):
        tr = train(spec, InitScheme(), TrainConfig(temperature=t, epochs=20, batch_size=64, momentum=0.9, seed=5), ds)
        cells += gradient_rank_check(tr)
    dt = time.perf_counter() - t0
    bad = sum(not c.bound_ok for c in cells)
    assert record(5, bad == 0 and dt < 60, f"{len(cells) - bad}/{len(cells)} cells hold {dt:.1f}s")


def _fd_rel_error(weights, spec, x, y, t, loss, h=1e-5):
    grads = backward(weights, spec, x, y, t, loss)
    num, den = 0.0, 0.0
    for i, w in enumerate(weights):
        for idx in np.ndindex(w.shape):
            wp = [v.copy() for v in weights]
            wm = [v.copy() for v in weights]
            wp[i][idx] += h
            wm[i][idx] -= h
            fd = (net_loss_ref(wp, x, y, t, loss) - net_loss_ref(wm, x, y, t, loss)) / (2 * h)
            num += (grads[i][idx] - fd) ** 2
            den += fd**2
    return np.sqrt(num / den) if den > 0 else np.sqrt(num)


def test_c06_gradient_finite_differences():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for trial in range(50):
        depth = int(rng.integers(1, 5))
        widths = tuple(int(w) for w in rng.integers(2, 17, depth + 1))
        spec = NetSpec(widths)
        t = float(rng.choice([0.1, 1.0, 10.0, 100.0]))
        loss = str(rng.choice(["cross_entropy", "mse_after_softmax"]))
        w = init_network(spec, InitScheme(), int(rng.integers(0, 2**31)))
        x = rng.normal(size=(widths[0], 8))
        y = rng.integers(0, widths[-1], 8)
        worst = max(worst, _fd_rel_error(w, spec, x, y, t, loss))
    dt = time.perf_counter() - t0
    assert record(6, worst <= 1e-5 and dt < 120, f"worst relative error {worst:.2e} over 50 cases {dt:.1f}s")


def test_c07_temperature_identity():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        e = rng.normal(scale=10.0, size=(int(rng.integers(2, 20)), 1))
        for t in (0.1, 1.0, 10.0, 1000.0):
            worst = max(worst, np.abs(softmax_with_temperature(e, t) - softmax_with_temperature(e / t, 1.0)).max())
    assert record(7, worst <= 1e-15, f"max entrywise difference {worst:.2e}")


@pytest.fixture(scope="module")
def paired_runs(tmp_path_factory):
    out = tmp_path_factory.mktemp("paired")
    base = replace(load_config(REFERENCE), output_dir=str(out))
    t0 = time.perf_counter()
    results = {}
    for seed in SEEDS:
        results[seed], _ = cmd_paired(with_train(base, seed=seed), ["train.temperature=100"])
    return results, time.perf_counter() - t0


def test_c08_directional_rank_deficit(paired_runs):
    results, dt = paired_runs
    rows, wins = [], 0
    for seed, r in results.items():
        b, v = r.baseline, r.variant
        checks = (v.logits_norm_growth > b.logits_norm_growth, v.final_alignment > b.final_alignment,
                  v.sr <= b.sr, v.kappa <= b.kappa)
        wins += all(checks)
        rows.append(f"s{seed}:growth {b.logits_norm_growth:.3g}->{v.logits_norm_growth:.3g} "
                    f"align {b.final_alignment:.3f}->{v.final_alignment:.3f} sr {b.sr}->{v.sr} "
                    f"kappa {b.kappa:.3f}->{v.kappa:.3f}")
    assert record(8, wins == 3 and dt < 1200, f"{wins}/3 seeds; {dt:.0f}s; " + "; ".join(rows))


@pytest.mark.xfail(strict=True, reason="at desk scale the high-T variant shows larger OrthoDev; see ledger")
def test_c08_orthodev_direction(paired_runs):
    results, _ = paired_runs
    assert all(r.variant.orthodev < r.baseline.orthodev for r in results.values())


def test_c09_high_temperature_symmetry():
    spec = NetSpec((64,) + (256,) * 7 + (10,))
    ds = generate_blobs(10, 64, 100, 0.3, seed=1)
    fwd = forward(init_network(spec, InitScheme(), 1), spec, ds.features, 1e6)
    ce = per_sample_cross_entropy(fwd.logits, ds.labels, 1e6)
    worst = float(np.abs(ce - np.log(10.0)).max())
    assert record(9, worst <= 1e-3, f"max |CE - ln 10| = {worst:.2e} over {ds.size} samples")


def test_c10_init_sweep():
    t0 = time.perf_counter()
    cfg = load_config(REFERENCE)
    sigmas = (1e-4, 1e-3, 1e-2, 1e-1)
    ok_seeds, rows = 0, []
    import tempfile
    with tempfile.TemporaryDirectory() as tmp:
        out = init_sweep_rows(replace(cfg, output_dir=tmp), sigmas, SEEDS)
    for seed in SEEDS:
        r = [row for row in out if row[1] == seed]
        norms = [row[2] for row in r]
        srs = [row[3] for row in r]
        ok = all(np.diff(norms) > 0) and all(np.diff(srs) >= 0)
        ok_seeds += ok
        rows.append(f"s{seed}: norms {', '.join(f'{n:.1e}' for n in norms)} sr {srs}")
    dt = time.perf_counter() - t0
    assert record(10, ok_seeds >= 2 and dt < 900, f"{ok_seeds}/3 seeds; {dt:.0f}s; " + "; ".join(rows))


def test_c11_svd_oracle():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(500):
        m, n = (int(v) for v in rng.integers(1, 65, 2))
        a = rng.normal(size=(m, n))
        s, o = singular_values(a), singular_values_oracle(a)
        worst = max(worst, float(np.max(np.abs(s - o) / o)))
    assert record(11, worst <= 1e-9, f"worst relative deviation {worst:.2e} over 500 matrices")


def test_c12_metric_fixtures():
    kappa = effective_depth([0.10, 0.20, 0.30, 0.40, 0.50, 0.95, 0.96, 0.955])
    rho = ood_generalization_loss([0.40, 0.60, 0.50, 0.30])
    assert record(12, kappa == 0.75 and rho == 0.5, f"kappa={kappa!r} rho={rho!r}")
