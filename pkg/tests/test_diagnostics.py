import numpy as np
import pytest

from spectra.diagnostics import (MetricsReport, ProbeConfig, ProbeResult, alignment_grid, alignment_report,
                                 effective_depth, gradient_rank_check, metrics_report, ood_generalization_loss,
                                 orthodev, rank_curves, shared_rank_pair, solutions_rank, train_probe)
from spectra.diagnostics.curves import logits_norm_curve
from spectra.errors import DegenerateError, DimensionError
from spectra.net import InitScheme, NetSpec, TrainConfig, generate_blobs, train


def test_effective_depth_examples():
    assert effective_depth([0.2, 0.5, 0.9, 1.0]) == 1.0
    assert effective_depth([0.2, 0.5, 0.995, 1.0]) == 0.75
    assert effective_depth([1.0, 1.0, 1.0]) == pytest.approx(1 / 3)
    assert effective_depth([0.1, 0.2, 0.3, 0.4, 0.5, 0.9, 0.91, 0.9]) == 6 / 8
    with pytest.raises(DimensionError):
        effective_depth([])
    with pytest.raises(DimensionError):
        effective_depth([0.5], total_layers=2)


def test_ood_loss_examples():
    assert ood_generalization_loss([0.3, 0.6, 0.3]) == 0.5
    assert ood_generalization_loss([0.1, 0.4]) == 0.0
    with pytest.raises(DegenerateError):
        ood_generalization_loss([0.0, 0.0])


def test_solutions_rank_hand_computed():
    m = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]])
    assert solutions_rank(m) == 2


def test_orthodev_hand_computed():
    x = np.array([[1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 2.0, 2.0]])
    y = np.array([0, 0, 1, 1])
    z = np.array([[1.0, 1.0], [1.0, 1.0]])
    # class means e1 and 2*e2, OOD mean (1,1): both |cos| = 1/sqrt(2)
    assert orthodev(x, y, z) == pytest.approx(1 / np.sqrt(2), abs=1e-15)
    with pytest.raises(DegenerateError):
        orthodev(x, y, np.zeros((2, 2)))


def test_alignment_grid_perfect_and_orthogonal():
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    a = q @ np.diag([6.0, 5, 4, 3, 2, 1])
    w = np.diag([9.0, 8, 7, 6, 5, 4]) @ q.T  # right vectors of W = left vectors of A
    assert np.allclose(np.diag(alignment_grid(w, a, 3)), 1.0)
    e = np.eye(4)
    assert np.allclose(alignment_grid(np.diag([2.0, 1, 0, 0]), np.diag([0, 0, 2.0, 1]) @ e, 2), 0.0)
    with pytest.raises(DimensionError):
        alignment_grid(np.ones((2, 3)), np.ones((4, 2)), 1)


def test_shared_rank_pair():
    a = np.diag([1.0, 1e-12, 0.0])
    g = np.diag([1.0, 0.0, 0.0])
    gr, ar, cut = shared_rank_pair(g, a)
    assert (gr, ar) == (1, 1) and cut == 1e-10


@pytest.fixture(scope="module")
def small_run():
    spec = NetSpec((8, 12, 12, 12, 4))
    ds = generate_blobs(4, 8, 25, 0.2, seed=3)
    trace = train(spec, InitScheme(), TrainConfig(epochs=6, batch_size=20, momentum=0.9, seed=3), ds)
    return spec, trace


def test_curves_and_gradrank(small_run):
    spec, trace = small_run
    norms = logits_norm_curve(trace)
    assert norms.shape == (7,) and np.all(norms > 0)
    pre, post = rank_curves(trace)
    assert np.all(pre <= 4) and np.all(post <= 4)
    cells = gradient_rank_check(trace)
    assert len(cells) == 7 * spec.depth and all(c.bound_ok for c in cells)


def test_alignment_report_k_checks(small_run):
    spec, trace = small_run
    rep = alignment_report(trace, k=5)
    assert rep.epochs == trace.epochs
    last = [la for la in rep.layers if la.layer == spec.depth]
    assert all(la.k == 4 for la in last)  # classifier weight has only 4 right vectors
    assert np.all((rep.curve() >= 0) & (rep.curve() <= 1 + 1e-12))
    with pytest.raises(DimensionError):
        alignment_report(trace, k=13)


def test_probe_learns_separable_features():
    ds = generate_blobs(3, 5, 60, 0.05, seed=0)
    res = train_probe(ds.features * 10, ds.labels, 0, layer=1, split="test", class_count=3,
                      cfg=ProbeConfig(epochs=200, learning_rate=1e-2))
    assert res.accuracy > 0.9
    with pytest.raises(DegenerateError):
        train_probe(ds.features, np.zeros(ds.size, dtype=int), 0, layer=1, split="test", class_count=3)


def test_metrics_report_schema_and_round_trip(small_run):
    spec, trace = small_run
    id_set = generate_blobs(4, 8, 25, 0.2, seed=3, split="test")
    ood = generate_blobs(4, 8, 25, 0.2, seed=3, split="ood")
    rep = metrics_report(trace, id_set, ood, seed=0, k=5)
    assert 0 < rep.kappa <= 1 and 0 <= rep.rho <= 1 and 1 <= rep.sr <= 4
    assert {p.stage for p in rep.probes} == {"post_activation", "pre_softmax", "post_softmax"}
    assert len(rep.probe_accuracies("test")) == spec.depth
    back = MetricsReport.from_json(rep.to_json())
    assert back.to_json() == rep.to_json()
    lines = rep.curves_csv().splitlines()
    assert lines[0] == "epoch,logits_norm,pre_rank,post_rank,alignment_avg" and len(lines) == 8


def test_probe_result_dict():
    assert ProbeResult(2, "ood", 0.5).to_dict() == {"layer": 2, "split": "ood", "stage": "post_activation",
                                                    "accuracy": 0.5}
