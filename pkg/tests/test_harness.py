"""Experiment configs, gates, reports, and the command line driver."""

import json
import math
import os

import numpy as np
import pytest

from loopsoup.cli import main as cli_main
from loopsoup.harness import (ConfigError, ExperimentConfig, Report,
                              batch_means_stderr, emit_report, run_experiment,
                              run_functionals, svg_histogram)
from loopsoup.graph import WeightedGraph, build_transition, OneForm


K3 = {"vertices": 3, "edges": [[0, 1], [1, 2], [0, 2]],
      "kappa": [1.0, 1.0, 1.0]}


def test_config_validation_errors():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"kind": "nope"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"kind": "charfn", "samples": 0})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(
            {"kind": "charfn", "samples": 10, "lams": []})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(
            {"kind": "charfn", "samples": 10, "lams": [-1.0]})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"kind": "oracle", "seed": -3})
    cfg = ExperimentConfig.from_dict(
        {"kind": "charfn", "samples": 10, "graph": K3})
    with pytest.raises(ConfigError):
        cfg.one_form(cfg.graph())  # one_form missing
    cfg2 = ExperimentConfig.from_dict(
        {"kind": "charfn", "samples": 10, "graph": K3,
         "one_form": [[0, 0, 1.0]]})
    with pytest.raises(ConfigError):
        cfg2.one_form(cfg2.graph())  # non-edge


def test_config_hash_is_canonical():
    a = ExperimentConfig.from_dict({"kind": "oracle", "k_max": 4, "seed": 1})
    b = ExperimentConfig.from_dict({"seed": 1, "k_max": 4, "kind": "oracle"})
    assert a.config_hash() == b.config_hash()
    c = ExperimentConfig.from_dict({"kind": "oracle", "k_max": 5, "seed": 1})
    assert a.config_hash() != c.config_hash()


def test_cli_seed_overrides_config():
    cfg = ExperimentConfig.from_dict({"kind": "oracle", "seed": 3}, seed=99)
    assert cfg.seed == 99
    cfg = ExperimentConfig.from_dict({"kind": "oracle", "seed": 3})
    assert cfg.seed == 3


def test_report_round_trip_and_all_pass():
    r = Report("spitzer", "ff" * 32, 7, "0.1.0")
    r.rows.append({"delta": 0.1, "s": 1.0})
    r.add_gate("g1", 1.0, 1.0, 0.1, "closed_form", True)
    r.add_gate("g2", 9.0, 0.0, 0.1, "definition", False, skipped=True)
    assert r.all_pass
    again = Report.from_json(r.to_json())
    assert again == r
    r.add_gate("g3", 9.0, 0.0, 0.1, "recomputed", False)
    assert not r.all_pass


def test_batch_means_stderr_iid():
    """On iid data the batch-means standard error must agree with the
    naive sd/sqrt(n) up to batching noise."""
    rng = np.random.default_rng(0)
    x = rng.normal(size=100_000)
    se = batch_means_stderr(x)
    naive = float(np.std(x) / math.sqrt(len(x)))
    assert se == pytest.approx(naive, rel=0.25)
    assert batch_means_stderr(np.array([1.0])) == 0.0


def test_run_functionals_chunking_invariance():
    """Any worker count must produce the same array because replicas own
    fixed streams and the fixed 64 chunks are concatenated in order."""
    g = WeightedGraph.from_dict(K3)
    P = build_transition(g)
    A = OneForm(g, {(0, 1): 1.0})
    w = A.matrix[None]
    one = run_functionals(P, 1.0, w, 500, 9, workers=1)
    two = run_functionals(P, 1.0, w, 500, 9, workers=2)
    assert np.array_equal(one, two)
    # sample counts not divisible by the chunk count still cover all rows
    odd = run_functionals(P, 1.0, w, 97, 9, workers=1)
    assert odd.shape == (97, 1)
    assert np.array_equal(odd, run_functionals(P, 1.0, w, 97, 9, workers=2))


def test_oracle_experiment_all_pass():
    cfg = ExperimentConfig.from_dict({"kind": "oracle", "k_max": 10, "seed": 2})
    report = run_experiment(cfg)
    assert report.all_pass
    assert report.kind == "oracle"
    sources = {g["source"] for g in report.gates}
    assert sources <= {"closed_form", "recomputed", "definition",
                       "expected_discrepancy"}


def test_charfn_experiment_report(tmp_path):
    cfg = ExperimentConfig.from_dict({
        "kind": "charfn", "graph": K3, "one_form": [[0, 1, 1.0]],
        "beta_grid": [0.0, math.pi], "lams": [1.0], "samples": 2000,
        "seed": 6,
    })
    report = run_experiment(cfg)
    assert report.all_pass
    # beta = 0 row is exact: charfn 1 with zero error
    row0 = [r for r in report.rows if r["beta"] == 0.0][0]
    assert row0["re_exact"] == 1.0 and row0["re_mc"] == pytest.approx(1.0)
    paths = emit_report(report, str(tmp_path))
    assert any(p.endswith("report.json") for p in paths)
    csvs = [p for p in paths if p.endswith(".csv")]
    assert len(csvs) == 1
    header = open(csvs[0]).readline().strip()
    assert header == "beta,re_exact,im_exact,re_mc,im_mc,stderr,n"


def test_emit_report_bytes_deterministic(tmp_path):
    cfg = ExperimentConfig.from_dict(
        {"kind": "spitzer", "lams": [2.0], "d_z": 1.0,
         "s_grid": [0.5, 1.0], "delta_grid": [1e-3, 1e-5]})
    report = run_experiment(cfg)
    d1, d2 = tmp_path / "a", tmp_path / "b"
    emit_report(report, str(d1))
    emit_report(report, str(d2))
    for name in ("report.json", "rows.csv"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_svg_histogram_well_formed(tmp_path):
    rng = np.random.default_rng(1)
    x = rng.normal(size=2000)
    svg = svg_histogram(x, sigma=1.0)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert "polyline" in svg  # the Gaussian overlay
    cfg = ExperimentConfig.from_dict(
        {"kind": "spitzer", "lams": [2.0], "d_z": 1.0,
         "s_grid": [0.5], "delta_grid": [1e-3]})
    report = run_experiment(cfg)
    paths = emit_report(report, str(tmp_path), samples=x, gaussian_sigma=1.0)
    assert any(p.endswith("histogram.svg") for p in paths)


def test_cli_end_to_end(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "graph": K3, "one_form": [[0, 1, 1.0]],
        "beta_grid": [0.0, 1.0], "lams": [1.0], "samples": 500,
    }))
    out_dir = tmp_path / "out"
    code = cli_main(["charfn", "--config", str(cfg_path),
                     "--seed", "3", "--out", str(out_dir)])
    captured = capsys.readouterr()
    assert code == 0
    assert "[PASS]" in captured.out
    assert (out_dir / "report.json").exists()
    report = Report.from_json((out_dir / "report.json").read_text())
    assert report.seed == 3


def test_cli_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"graph\": 3}")
    code = cli_main(["charfn", "--config", str(bad),
                     "--out", str(tmp_path / "o")])
    assert code == 2
    missing = cli_main(["oracle", "--config", str(tmp_path / "nope.json"),
                        "--out", str(tmp_path / "o")])
    assert missing == 2
    notjson = tmp_path / "notjson.json"
    notjson.write_text("]][[")
    assert cli_main(["oracle", "--config", str(notjson),
                     "--out", str(tmp_path / "o")]) == 2
    capsys.readouterr()
