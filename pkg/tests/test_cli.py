import json
import math
from pathlib import Path

import numpy as np
import pytest

from tdalab.cli import main
from tdalab import io


def run_cli(*args):
    return main([str(a) for a in args])


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def test_generate_holes_counts(tmp_path, capsys):
    out = tmp_path / "holes"
    assert run_cli("generate", "holes", "--out", out, "--clouds-per-shape", 2,
                   "--points", 30, "--seed", 7) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["files"]) == 40
    assert len(list(out.glob("cloud_*.csv"))) == 40


def test_generate_rerun_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        run_cli("generate", "holes", "--out", out, "--clouds-per-shape", 1,
                "--points", 20, "--seed", 7)
    assert (a / "manifest.json").read_text() == (b / "manifest.json").read_text()


def test_generate_convexity_regular_counts(tmp_path):
    out = tmp_path / "conv"
    assert run_cli("generate", "convexity", "--out", out, "--kind", "regular",
                   "--points", 40, "--seed", 1) == 0
    manifest = json.loads((out / "regular" / "manifest.json").read_text())
    assert len(manifest["files"]) == 480


def test_generate_curvature_writes_train_test(tmp_path):
    out = tmp_path / "curv"
    assert run_cli("generate", "curvature", "--out", out, "--clouds-per-kappa", 1,
                   "--points", 15, "--test-kappas", 3, "--seed", 0) == 0
    assert (out / "train" / "manifest.json").exists()
    assert (out / "test" / "manifest.json").exists()


def test_seed_env_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv("TDA_LAB_SEED", "7")
    a = tmp_path / "env"
    run_cli("generate", "holes", "--out", a, "--clouds-per-shape", 1, "--points", 20)
    b = tmp_path / "flag"
    run_cli("generate", "holes", "--out", b, "--clouds-per-shape", 1, "--points", 20,
            "--seed", 7)
    assert (a / "manifest.json").read_text() == (b / "manifest.json").read_text()


# ---------------------------------------------------------------------------
# ph
# ---------------------------------------------------------------------------


def test_ph_two_point_cloud(tmp_path):
    src = tmp_path / "two.csv"
    src.write_text("0.0,0.0\n2.0,0.0\n")
    out = tmp_path / "pd.csv"
    assert run_cli("ph", src, "--out", out) == 0
    rows = out.read_text().strip().splitlines()
    assert "0,0.0,2.0" in rows
    assert "0,0.0,inf" in rows


def test_ph_unit_square_contains_sqrt2_death(tmp_path):
    src = tmp_path / "square.csv"
    src.write_text("0,0\n1,0\n1,1\n0,1\n")
    out = tmp_path / "pd.csv"
    run_cli("ph", src, "--out", out)
    pd = io.read_diagram_csv(out)
    d1 = pd.in_dim(1)
    assert len(d1) == 1
    assert d1[0, 1] == pytest.approx(math.sqrt(2))


def test_ph_mask_tubular_single_component(tmp_path):
    src = tmp_path / "full.pbm"
    src.write_text("P1\n4 4\n" + "\n".join("1 1 1 1" for _ in range(4)) + "\n")
    out = tmp_path / "pd.csv"
    assert run_cli("ph", src, "--filtration", "tubular", "--line", "bottom",
                   "--out", out, "--max-dim", 0) == 0
    pd = io.read_diagram_csv(out)
    assert len(pd.in_dim(0)) == 1
    assert math.isinf(pd.in_dim(0)[0, 1])


def test_ph_svg_output(tmp_path):
    src = tmp_path / "two.csv"
    src.write_text("0.0,0.0\n2.0,0.0\n")
    svg = tmp_path / "pd.svg"
    run_cli("ph", src, "--out", tmp_path / "pd.csv", "--svg", svg)
    text = svg.read_text()
    assert text.startswith("<svg")
    assert "circle" in text


def test_ph_dtm_filtration(tmp_path):
    rng = np.random.default_rng(0)
    src = tmp_path / "cloud.csv"
    src.write_text("\n".join(f"{x},{y}" for x, y in rng.random((30, 2))) + "\n")
    out = tmp_path / "pd.csv"
    assert run_cli("ph", src, "--filtration", "dtm", "--m", "0.1", "--out", out) == 0
    assert len(io.read_diagram_csv(out)) > 0


def test_ph_missing_file_fails(tmp_path, capsys):
    with pytest.raises(SystemExit):
        run_cli("ph", tmp_path / "absent.csv")


def test_ph_malformed_file_reports_line(tmp_path, capsys):
    src = tmp_path / "bad.csv"
    src.write_text("1,2\nno,good,here,4\n")
    assert run_cli("ph", src) == 1
    assert "bad.csv" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def test_run_holes_from_generated_dataset(tmp_path, capsys):
    data = tmp_path / "holes"
    run_cli("generate", "holes", "--out", data, "--clouds-per-shape", 1,
            "--points", 60, "--seed", 1)
    report_path = tmp_path / "report.json"
    assert run_cli("run", "holes", "--data", data, "--out", report_path,
                   "--subsample", 30, "--seed", 1) == 0
    payload = json.loads(report_path.read_text())
    names = [r["name"] for r in payload["regimes"]]
    assert names[0] == "clean"
    assert len(names) == 7  # clean + six perturbations
    out = capsys.readouterr().out
    assert "clean" in out


def test_run_rerun_identical_json(tmp_path):
    data = tmp_path / "holes"
    run_cli("generate", "holes", "--out", data, "--clouds-per-shape", 1,
            "--points", 40, "--seed", 2)
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    for rp in (r1, r2):
        run_cli("run", "holes", "--data", data, "--out", rp, "--subsample", 20, "--seed", 5)
    assert r1.read_text() == r2.read_text()


def test_run_manifest_mismatch(tmp_path):
    curv = tmp_path / "curv"
    run_cli("generate", "curvature", "--out", curv, "--clouds-per-kappa", 1,
            "--points", 10, "--test-kappas", 1, "--seed", 0)
    # a holes run pointed at a curvature dataset must refuse
    with pytest.raises(SystemExit, match="curvature"):
        run_cli("run", "holes", "--data", curv / "train")
    # a missing dataset directory is an error exit, not a crash
    assert run_cli("run", "curvature", "--data", tmp_path / "absent") == 1


def test_run_convexity_measure_synthetic_masks(tmp_path):
    from tdalab.datagen import gen_polygon_masks
    from tdalab import io as tio

    mask_dir = tmp_path / "masks"
    mask_dir.mkdir()
    for i, mask in enumerate(gen_polygon_masks(24, 30, seed=0).items):
        tio.write_mask_pbm(mask_dir / f"mask_{i:03d}.pbm", mask)
    report_path = tmp_path / "report.json"
    assert run_cli("run", "convexity-measure", "--data", mask_dir,
                   "--out", report_path, "--seed", 0) == 0
    payload = json.loads(report_path.read_text())
    assert {r["name"] for r in payload["regimes"]} == {"mse", "spearman"}


def test_run_convexity_from_disk(tmp_path):
    data = tmp_path / "conv"
    run_cli("generate", "convexity", "--out", data, "--points", 300,
            "--clouds-per-shape", 2, "--polygons-per-class", 8, "--seed", 3)
    report_path = tmp_path / "report.json"
    assert run_cli("run", "convexity", "--data", data, "--out", report_path,
                   "--grid-side", 16, "--seed", 3) == 0
    payload = json.loads(report_path.read_text())
    names = [r["name"] for r in payload["regimes"]]
    assert names == ["regular/regular", "random/random", "regular/random", "random/regular"]


def test_run_csv_format(tmp_path):
    data = tmp_path / "holes"
    run_cli("generate", "holes", "--out", data, "--clouds-per-shape", 1,
            "--points", 30, "--seed", 0)
    out = tmp_path / "report.csv"
    assert run_cli("run", "holes", "--data", data, "--out", out, "--subsample", 15,
                   "--format", "csv") == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "name,metric,value"
    assert len(lines) == 8
