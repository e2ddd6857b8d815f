import json
import os

import numpy as np
import pytest
import yaml

from spectra.cli.config import config_from_dict, dump_config, load_config, run_id
from spectra.cli.main import main
from spectra.errors import ConfigError
from spectra.linalg import write_csv

BASE = {
    "net": {"layer_widths": [6, 10, 10, 3]},
    "init": {"kind": "kaiming"},
    "train": {"temperature": 1.0, "learning_rate": 0.05, "momentum": 0.9, "epochs": 2, "batch_size": 10,
              "seed": 4},
    "dataset": {"kind": "blobs", "class_count": 3, "dim": 6, "per_class": 10, "spread": 0.2},
    "record_epochs": "all",
}


def write_cfg(tmp_path, name="run.yaml", **changes):
    raw = json.loads(json.dumps(BASE))
    for key, value in changes.items():
        section, _, field = key.partition("__")
        if field:
            if value is None:
                raw[section].pop(field)
            else:
                raw[section][field] = value
        else:
            raw[section] = value
    raw["output_dir"] = str(tmp_path / "runs")
    path = tmp_path / name
    path.write_text(yaml.safe_dump(raw))
    return str(path)


def only_run(tmp_path):
    runs = [d for d in os.listdir(tmp_path / "runs") if os.path.isdir(tmp_path / "runs" / d)]
    assert len(runs) == 1
    return tmp_path / "runs" / runs[0]


def test_config_round_trip(tmp_path):
    cfg = load_config(write_cfg(tmp_path))
    again = config_from_dict(yaml.safe_load(dump_config(cfg)))
    assert again == cfg and run_id(again) == run_id(cfg)


def test_missing_temperature_names_field(tmp_path, capsys):
    with pytest.raises(ConfigError) as err:
        load_config(write_cfg(tmp_path, train__temperature=None))
    assert err.value.field == "train.temperature"
    assert main(["train", write_cfg(tmp_path, train__temperature=None)]) == 2
    assert "train.temperature" in capsys.readouterr().err


def test_unknown_keys_are_errors(tmp_path):
    with pytest.raises(ConfigError, match="train.momentun"):
        load_config(write_cfg(tmp_path, train__momentun=0.9))
    with pytest.raises(ConfigError, match="extra"):
        config_from_dict({**BASE, "extra": 1})


def test_width_mismatch_is_config_error(tmp_path):
    assert main(["train", write_cfg(tmp_path, dataset__dim=5)]) == 2


def test_train_writes_snapshots_and_is_reproducible(tmp_path):
    cfg = write_cfg(tmp_path)
    assert main(["train", cfg]) == 0
    rdir = only_run(tmp_path)
    assert sorted(os.listdir(rdir / "snapshots")) == ["epoch_0", "epoch_1", "epoch_2"]
    first = (rdir / "manifest.json").read_bytes()
    manifest = json.loads(first)
    assert manifest["schema_version"] == 1 and manifest["status"] == "complete"
    assert "run.log" not in manifest["files"]
    assert main(["train", cfg]) == 0
    assert (rdir / "manifest.json").read_bytes() == first
    assert not [f for f in os.listdir(rdir) if f.startswith(".tmp-")]


def test_analyze_is_byte_identical(tmp_path):
    main(["train", write_cfg(tmp_path)])
    rdir = only_run(tmp_path)
    assert main(["analyze", str(rdir)]) == 0
    a = {f: (rdir / "metrics" / f).read_bytes() for f in ("metrics.json", "curves.csv")}
    assert main(["analyze", str(rdir)]) == 0
    assert a == {f: (rdir / "metrics" / f).read_bytes() for f in a}
    doc = json.loads(a["metrics.json"])
    assert doc["schema_version"] == 1 and doc["kappa"] <= 1 and 0 <= doc["rho"] <= 1


def test_analyze_sr_matches_fixture_logits(tmp_path):
    main(["train", write_cfg(tmp_path)])
    rdir = only_run(tmp_path)
    rng = np.random.default_rng(0)
    logits = rng.normal(size=(3, 2)) @ rng.normal(size=(2, 30))  # rank 2 by construction
    write_csv(logits, str(rdir / "snapshots" / "epoch_2" / "logits.csv"))
    main(["analyze", str(rdir)])
    assert json.loads((rdir / "metrics" / "metrics.json").read_text())["sr"] == 2


def test_missing_snapshot_exit_4(tmp_path, capsys):
    main(["train", write_cfg(tmp_path)])
    rdir = only_run(tmp_path)
    for f in os.listdir(rdir / "snapshots" / "epoch_1"):
        os.unlink(rdir / "snapshots" / "epoch_1" / f)
    assert main(["analyze", str(rdir)]) == 4
    assert "[1]" in capsys.readouterr().err
    assert main(["analyze", str(tmp_path / "nowhere")]) == 4


def test_divergence_exit_3_keeps_partial_trace(tmp_path):
    cfg = write_cfg(tmp_path, train__learning_rate=1e200)
    with np.errstate(all="ignore"):
        assert main(["train", cfg]) == 3
    manifest = json.loads((only_run(tmp_path) / "manifest.json").read_text())
    assert manifest["status"] == "diverged" and 0 in manifest["epochs"]


def test_paired_identical_variant_has_zero_deltas(tmp_path):
    assert main(["paired", write_cfg(tmp_path)]) == 0
    (path,) = [f for f in os.listdir(tmp_path / "runs") if f.startswith("paired_")]
    doc = json.loads((tmp_path / "runs" / path).read_text())
    assert doc["schema_version"] == 1
    assert all(v == 0 for v in doc["deltas"].values())


def test_paired_rejects_non_train_overrides(tmp_path):
    cfg = write_cfg(tmp_path)
    assert main(["paired", cfg, "--set", "net.layer_widths=[6,3]"]) == 2
    assert main(["paired", cfg, "--set", "dataset.spread=1.0"]) == 2
    assert main(["paired", cfg, "--set", "train.seed=9"]) == 2


def test_paired_variant_shares_shuffles(tmp_path):
    assert main(["paired", write_cfg(tmp_path), "--set", "train.temperature=100"]) == 0
    runs = sorted(d for d in os.listdir(tmp_path / "runs") if not d.endswith(".json"))
    orders = [(tmp_path / "runs" / d / "shuffle_orders.csv").read_bytes() for d in runs]
    assert len(runs) == 2 and orders[0] == orders[1]


def test_verify_commands(tmp_path, capsys):
    out = str(tmp_path / "v")
    assert main(["verify", "nc_rank", "--classes", "10", "--out", out]) == 0
    doc = json.loads(open(os.path.join(out, "verify", "nc_rank.json")).read())
    assert doc["trials"][0]["rank"] == 9 and doc["summary"]["violations"] == 0
    assert main(["verify", "gap_bound", "--trials", "200", "--out", out]) == 0
    assert main(["verify", "bogus", "--out", out]) == 2
    capsys.readouterr()
    main(["verify", "scaling", "--n", "20", "--k", "1", "--trials", "2", "--points", "6", "--out", out])
    lines = open(os.path.join(out, "verify", "scaling.csv")).read().splitlines()
    assert lines[0] == "scale_or_temperature,k,mean_rank,gap" and len(lines) == 7


def test_init_sweep_single_sigma(tmp_path):
    assert main(["init-sweep", write_cfg(tmp_path), "--sigmas", "0.1"]) == 0
    lines = (tmp_path / "runs" / "init_sweep.csv").read_text().splitlines()
    assert lines[0] == "sigma,seed,initial_logits_norm,final_sr" and len(lines) == 2


def test_global_flags(tmp_path):
    out = tmp_path / "elsewhere"
    assert main(["train", write_cfg(tmp_path), "--seed", "9", "--out", str(out), "--rank-mode", "absolute",
                 "--rank-threshold", "0.5"]) == 0
    (rdir,) = os.listdir(out)
    cfg = load_config(str(out / rdir / "config.yaml"))
    assert cfg.seed == 9 and cfg.rank_policy.mode == "absolute" and cfg.rank_policy.threshold == 0.5
    assert main(["train", write_cfg(tmp_path), "--rank-threshold", "-1"]) == 2
    assert main(["nonsense"]) == 2
