import csv
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from restereo.cli import main
from restereo.fileio import read_pfm_disparity, read_png_disparity


@pytest.fixture()
def synth_pair(tmp_path):
    d = tmp_path / "scene"
    rc = main(
        [
            "synth", "--kind", "constant", "--width", "240", "--height", "96",
            "--d", "8", "--seed", "3", "--out-dir", str(d),
        ]
    )
    assert rc == 0
    return d


def test_synth_writes_all_outputs(synth_pair, capsys):
    for name in ("left.png", "right.png", "gt_disp.pfm", "gt_disp.png"):
        assert (synth_pair / name).exists()
    gt = read_png_disparity(synth_pair / "gt_disp.png")
    assert gt.values[gt.valid].max() == 8.0
    assert not gt.valid[:, :8].any()


def test_match_eval_roundtrip(synth_pair, tmp_path, capsys):
    pred = tmp_path / "pred.pfm"
    pred_png = tmp_path / "pred.png"
    viz = tmp_path / "viz.png"
    trace = tmp_path / "trace.json"
    rc = main(
        [
            "match", str(synth_pair / "left.png"), str(synth_pair / "right.png"),
            "--out", str(pred), "--out-png", str(pred_png), "--viz", str(viz),
            "--trace", str(trace), "--scales", "6,3", "--dcv", "8",
        ]
    )
    assert rc == 0
    assert "matched 240x96" in capsys.readouterr().out
    for f in (pred, pred_png, viz, trace):
        assert f.exists()
    t = json.loads(trace.read_text())
    assert t["d_max"] == 36.0
    assert [s["scale_den"] for s in t["scales"]] == [6, 3]

    rep_json = tmp_path / "rep.json"
    rep_csv = tmp_path / "rep.csv"
    rc = main(
        [
            "eval", str(pred), str(synth_pair / "gt_disp.png"),
            "--json", str(rep_json), "--csv", str(rep_csv),
        ]
    )
    assert rc == 0
    report = json.loads(rep_json.read_text())
    assert report["epe"] < 0.5
    assert report["er1"] < 0.05
    with open(rep_csv) as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 1
    assert float(rows[0]["epe"]) == report["epe"]


def test_eval_of_identical_maps_is_zero(synth_pair, capsys):
    rc = main(
        ["eval", str(synth_pair / "gt_disp.png"), str(synth_pair / "gt_disp.png")]
    )
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["epe"] == 0.0 and report["er1"] == 0.0


def test_default_chain_reaches_372(synth_pair, tmp_path):
    trace = tmp_path / "trace.json"
    rc = main(
        [
            "match", str(synth_pair / "left.png"), str(synth_pair / "right.png"),
            "--trace", str(trace), "--refine", "none",
        ]
    )
    assert rc == 0
    t = json.loads(trace.read_text())
    assert t["d_max"] == 372.0  # 4 * (48+24+12+6+3)
    assert len(t["scales"]) == 5


def test_kitti_style_chain_reaches_180(synth_pair, tmp_path):
    trace = tmp_path / "trace.json"
    rc = main(
        [
            "match", str(synth_pair / "left.png"), str(synth_pair / "right.png"),
            "--trace", str(trace), "--scales", "24,12,6,3", "--dcv", "8",
            "--refine", "none",
        ]
    )
    assert rc == 0
    assert json.loads(trace.read_text())["d_max"] == 180.0


def test_odd_window_is_rejected(synth_pair, capsys):
    rc = main(
        [
            "match", str(synth_pair / "left.png"), str(synth_pair / "right.png"),
            "--dcv", "7",
        ]
    )
    assert rc == 2
    assert "d_cv must be even" in capsys.readouterr().err


def test_unknown_backend_is_rejected(synth_pair, capsys):
    rc = main(
        [
            "match", str(synth_pair / "left.png"), str(synth_pair / "right.png"),
            "--backend", "cuda",
        ]
    )
    assert rc == 2
    assert "unknown kernel backend" in capsys.readouterr().err


def test_eval_missing_file_fails_cleanly(tmp_path, capsys):
    rc = main(["eval", str(tmp_path / "a.png"), str(tmp_path / "b.png")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_bench_tiny_custom_resolution(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    rc = main(
        [
            "bench", "--resolutions", "64x48", "--repetitions", "2",
            "--csv", str(out),
        ]
    )
    assert rc == 0
    assert "resolution" in capsys.readouterr().out
    with open(out) as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 1
    row = rows[0]
    assert row["status"] == "ok"
    # nearest tier preset: small frames borrow the kitti-range chain
    assert row["d_cv"] == "8"
    assert row["scales"] == "24,12,6,3"
    assert float(row["d_max"]) == 180.0
    assert int(row["repetitions"]) == 2
    assert float(row["min_ms"]) <= float(row["mean_ms"])


def test_bench_explicit_config_overrides_presets(tmp_path):
    out = tmp_path / "bench.csv"
    rc = main(
        [
            "bench", "--resolutions", "64x48,96x48", "--repetitions", "1",
            "--dcv", "4", "--scales", "6,3", "--csv", str(out),
        ]
    )
    assert rc == 0
    with open(out) as f:
        rows = list(csv.DictReader(f))
    assert [r["d_cv"] for r in rows] == ["4", "4"]
    assert {r["scales"] for r in rows} == {"6,3"}
    assert {float(r["d_max"]) for r in rows} == {18.0}


def test_console_entry_point_runs():
    exe = shutil.which("restereo")
    if exe is None:
        proc = subprocess.run(
            [sys.executable, "-m", "restereo.cli", "--help"],
            capture_output=True, text=True,
        )
    else:
        proc = subprocess.run([exe, "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "match" in proc.stdout and "bench" in proc.stdout


def test_match_then_eval_pfm_gt_path(synth_pair, tmp_path, capsys):
    """PFM ground truth is dense, so the unmatched margin is scored too;
    the report still identifies a good reconstruction."""
    pred = tmp_path / "pred.pfm"
    rc = main(
        [
            "match", str(synth_pair / "left.png"), str(synth_pair / "right.png"),
            "--out", str(pred), "--scales", "6,3", "--dcv", "8",
        ]
    )
    assert rc == 0
    capsys.readouterr()
    rc = main(["eval", str(pred), str(synth_pair / "gt_disp.pfm")])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["n_valid"] == report["n_total"] == 240 * 96
    assert report["epe"] < 1.0


def test_single_scale_baseline(synth_pair, tmp_path):
    trace = tmp_path / "trace.json"
    rc = main(
        [
            "match", str(synth_pair / "left.png"), str(synth_pair / "right.png"),
            "--scales", "3", "--dcv", "24", "--refine", "none",
            "--trace", str(trace),
        ]
    )
    assert rc == 0
    t = json.loads(trace.read_text())
    assert [s["scale_den"] for s in t["scales"]] == [3]


def test_eval_sparse_ground_truth_counts_labeled(synth_pair, tmp_path, capsys):
    gt = read_png_disparity(synth_pair / "gt_disp.png")
    keep = np.zeros_like(gt.valid)
    keep[::2, ::3] = True  # fake a sparse labeling
    sparse_valid = gt.valid & keep
    sparse = tmp_path / "sparse.png"
    from restereo.fileio import write_png_disparity
    from restereo.types import DisparityMap

    write_png_disparity(DisparityMap(gt.values, sparse_valid, 1), sparse)
    rc = main(["eval", str(synth_pair / "gt_disp.png"), str(sparse)])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["n_valid"] == int(sparse_valid.sum())
    assert report["epe"] == 0.0


def test_synth_is_reproducible(tmp_path):
    args = [
        "synth", "--kind", "two-plane", "--width", "120", "--height", "48",
        "--d", "5", "--d2", "11", "--seed", "21",
    ]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out-dir", str(a)]) == 0
    assert main(args + ["--out-dir", str(b)]) == 0
    for name in ("left.png", "right.png", "gt_disp.pfm", "gt_disp.png"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
