import json
from dataclasses import replace
from fractions import Fraction

import pytest

from stepreg import worked_example as wx
from stepreg.config import ExperimentConfig, NoiseConfig, parse_config
from stepreg.pipeline import (
    aggregate,
    emit_report,
    load_summary,
    run_config,
    run_dp,
    run_monte_carlo,
    run_threshold,
    serialise,
)
from stepreg.repro import run_paper_repro


def example_cfg(kind, param, **kw):
    return replace(ExperimentConfig(), noise=NoiseConfig(kind, param), **kw)


def test_run_config_sections():
    report = serialise(run_config(ExperimentConfig()))
    assert set(report["methods"]) == {"xcorr", "threshold", "dp"}
    assert report["methods"]["xcorr"]["offset"] == -1
    assert report["methods"]["threshold"]["segmentation"] == [list(b) for b in wx.TRUE_BOUNDARIES]
    assert report["methods"]["dp"]["weight"] == 5
    assert report["truth"]["boundaries"] == [list(b) for b in wx.TRUE_BOUNDARIES]


def test_report_is_deterministic(tmp_path):
    cfg = example_cfg("gaussian", 0.1, seed=42)
    paths = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        emit_report(serialise(run_config(cfg)), out)
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    other = tmp_path / "other.json"
    emit_report(serialise(run_config(replace(cfg, seed=43))), other)
    assert other.read_bytes() != paths[0].read_bytes()


def test_emit_and_reload(tmp_path):
    report = serialise(run_config(ExperimentConfig()))
    rows = [{"a": 1, "b": [1, 2]}, {"a": 2, "b": [3]}]
    written = emit_report(report | {"timing": {"s": 1.0}}, tmp_path / "rep.json", {"t": rows})
    assert [p.name for p in written] == ["rep.json", "rep_t.csv"]
    back = load_summary(written[0])
    assert "timing" not in back
    assert back == json.loads(json.dumps({k: v for k, v in report.items() if k != "timing"}, sort_keys=True))
    assert written[1].read_text().splitlines()[0] == "a,b"


def test_config_round_trip(tmp_path):
    cfg = example_cfg("uniform", 0.2, seed=5, weight="w3")
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({k: v for k, v in cfg.to_dict().items() if k not in ("output",)}))
    assert parse_config(p.read_text()) == cfg


def test_threshold_and_dp_sections_at_half():
    y1, y2 = wx.observed_pair(Fraction(1, 2))
    th = run_threshold(y1, y2)
    assert not th["feasible"] and th["estimates"] == []
    dp = run_dp(y1, y2, Fraction(3, 4))
    assert (dp["weight"], dp["count"]) == (6, 2)
    assert all(p["m"] == 5 for p in dp["paths"])


def test_monte_carlo_needs_randomness():
    cfg = replace(ExperimentConfig(), noise=NoiseConfig("fixed", 0.0, ((0,) * 9, (0,) * 9)))
    with pytest.raises(ValueError, match="stochastic"):
        run_monte_carlo(cfg, 2)


def test_monte_carlo_zero_noise():
    mc = run_monte_carlo(example_cfg("symmetric_binary", 0.0), 20)["summary"]
    assert mc["threshold"]["exact_segmentation_rate"] == 1.0
    assert mc["dp"]["exact_segmentation_rate"] == 1.0
    assert mc["dp"]["false_points"] == 0
    assert mc["xcorr"]["offset_histogram"] == {"-1": 20}


def test_monte_carlo_gaussian_dp():
    # min jump 1, so v = 1/2 and sigma = 0.08 < 1 / (8 * sqrt 2)
    mc = run_monte_carlo(example_cfg("gaussian", 0.08, v=0.5, methods=("dp",), seed=1), 1000)["summary"]
    assert mc["dp"]["exact_segmentation_rate"] >= 0.99


def test_monte_carlo_binary_threshold_feasible():
    mc = run_monte_carlo(example_cfg("symmetric_binary", 0.15, methods=("threshold",), seed=2), 1000)["summary"]
    assert mc["threshold"]["feasible_rate"] == 1.0


def test_monte_carlo_order_independent():
    cfg = example_cfg("gaussian", 0.1, seed=3)
    a = run_monte_carlo(cfg, 12)
    assert aggregate(list(reversed(a["records"]))) == a["summary"]


def test_paper_repro_passes():
    report = run_paper_repro()
    failed = [c for c in report["checks"] if not c["passed"]]
    assert not failed, failed
    details = {c["name"]: c["detail"] for c in report["checks"]}
    assert details["energy threshold limit"] == "11/144 T"
    assert details["energy dp tie"].startswith("41/144 T")
