import csv
import json

import numpy as np
import pytest

from sepscope import make_synthetic, train_mlp, MlpConfig
from sepscope.cli import main


@pytest.fixture
def blob_fixture(tmp_path):
    """Two well-separated blobs, labels in a side file."""
    rng = np.random.default_rng(70)
    a = rng.normal((-4.0, 0.0), 0.5, (30, 2))
    b = rng.normal((4.0, 0.0), 0.5, (30, 2))
    data = tmp_path / "blobs.csv"
    rows = [f"{float(x)!r},{float(y)!r}" for x, y in np.vstack([a, b])]
    data.write_text("\n".join(rows) + "\n")
    labels = tmp_path / "labels.txt"
    labels.write_text("\n".join(["0"] * 30 + ["1"] * 30) + "\n")
    return data, labels


@pytest.fixture
def overlap_fixture(tmp_path):
    rng = np.random.default_rng(71)
    a = rng.normal((0.0, 0.0), 1.2, (25, 2))
    b = rng.normal((1.2, 0.0), 1.2, (25, 2))
    data = tmp_path / "overlap.csv"
    rows = [f"{float(x)!r},{float(y)!r}" for x, y in np.vstack([a, b])]
    data.write_text("\n".join(rows) + "\n")
    labels = tmp_path / "labels.txt"
    labels.write_text("\n".join(["0"] * 25 + ["1"] * 25) + "\n")
    return data, labels


def test_measure_separated_blobs(blob_fixture, tmp_path, capsys):
    data, labels = blob_fixture
    out = tmp_path / "out"
    code = main(["--out", str(out), "measure", "--data", str(data),
                 "--labels", str(labels), "--positive-class", "0",
                 "--weight", "approx"])
    assert code == 0
    doc = json.loads((out / "measure.json").read_text())
    assert doc[0]["ls1"] == 1.0
    assert "ls1=1" in capsys.readouterr().out


def test_measure_multiclass_three_classes(tmp_path):
    rng = np.random.default_rng(72)
    centers = [(0.0, 0.0), (8.0, 0.0), (0.0, 8.0)]
    pts = np.vstack([rng.normal(c, 0.6, (10, 2)) for c in centers])
    data = tmp_path / "three.csv"
    data.write_text("\n".join(f"{float(x)!r},{float(y)!r}" for x, y in pts) + "\n")
    labels = tmp_path / "y.txt"
    labels.write_text("\n".join(str(k // 10) for k in range(30)) + "\n")
    out = tmp_path / "out"
    code = main(["--out", str(out), "measure", "--data", str(data),
                 "--labels", str(labels), "--multiclass"])
    assert code == 0
    reports = json.loads((out / "measure.json").read_text())
    assert len(reports) == 3
    multi = json.loads((out / "multi_ls.json").read_text())
    assert multi["ls1"] == pytest.approx(1.0)


def test_measure_missing_file(tmp_path):
    code = main(["--out", str(tmp_path / "o"), "measure",
                 "--data", str(tmp_path / "absent.csv"),
                 "--labels", str(tmp_path / "absent.txt")])
    assert code == 1


def test_measure_degenerate_exit_code(tmp_path):
    data = tmp_path / "deg.csv"
    data.write_text("1,0\n-1,0\n2,1\n-2,-1\n")
    labels = tmp_path / "y.txt"
    labels.write_text("0\n0\n1\n1\n")
    code = main(["--out", str(tmp_path / "o"), "measure", "--data", str(data),
                 "--labels", str(labels), "--positive-class", "0"])
    assert code == 2


def test_unknown_flag_exits_one(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["--out", str(tmp_path), "measure", "--no-such-flag"])
    assert info.value.code == 1


def test_maxls_overlapping(overlap_fixture, tmp_path):
    data, labels = overlap_fixture
    out = tmp_path / "out"
    code = main(["--out", str(out), "maxls", "--data", str(data),
                 "--labels", str(labels), "--positive-class", "0"])
    assert code == 0
    doc = json.loads((out / "maxls.json").read_text())
    assert doc["verified"] is True
    assert len(doc["removed"]) > 0


def test_maxls_separable_no_removals(blob_fixture, tmp_path):
    data, labels = blob_fixture
    out = tmp_path / "out"
    code = main(["--out", str(out), "maxls", "--data", str(data),
                 "--labels", str(labels), "--positive-class", "0"])
    assert code == 0
    doc = json.loads((out / "maxls.json").read_text())
    assert doc["removed"] == []
    assert doc["verified"] is True


def test_maxls_exact_and_approx_both_verify(overlap_fixture, tmp_path):
    data, labels = overlap_fixture
    for mode in ("approx", "exact"):
        out = tmp_path / f"out_{mode}"
        code = main(["--out", str(out), "maxls", "--data", str(data),
                     "--labels", str(labels), "--positive-class", "0",
                     "--weight", mode])
        assert code == 0
        doc = json.loads((out / "maxls.json").read_text())
        assert doc["verified"] is True


def test_track_from_dumps(tmp_path):
    ds = make_synthetic("gaussians", 40, 1.0, seed=73)
    cfg = MlpConfig(widths=(2, 8, 2), epochs=3, seed=1, probe_size=30)
    train_mlp(cfg, ds, dump_dir=tmp_path / "dumps")
    out = tmp_path / "out"
    code = main(["--out", str(out), "--format", "csv", "track",
                 "--manifest", str(tmp_path / "dumps" / "manifest.json")])
    assert code == 0
    with open(out / "track.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 4  # header + 3 epochs
    assert rows[0][0] == "epoch"


def test_demo_train_default_epoch_count(tmp_path):
    out = tmp_path / "out"
    code = main(["--out", str(out), "--format", "csv", "demo-train"])
    assert code == 0
    with open(out / "track.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 101  # header + 100 epochs


def test_demo_train_config_file(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text(
        "dataset = rings\nn_per_class = 30\nnoise = 0.1\nepochs = 4\n"
        "widths = 2,8,2\ndump = 1\n"
    )
    out = tmp_path / "out"
    code = main(["--out", str(out), "--format", "csv", "demo-train",
                 "--config", str(config)])
    assert code == 0
    assert (out / "dumps" / "manifest.json").exists()
    with open(out / "track.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 5


def test_demo_train_bad_config_key(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text("no_such_key = 1\n")
    code = main(["--out", str(tmp_path / "o"), "demo-train",
                 "--config", str(config)])
    assert code == 1


def test_plm_study_widths_csv(tmp_path):
    out = tmp_path / "out"
    code = main(["--out", str(out), "--format", "csv", "--seed", "4",
                 "plm-study", "--widths", "2,4,8,16", "--trials", "5",
                 "--n-per-class", "20"])
    assert code == 0
    with open(out / "width_study.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 5
    fractions = [float(r[4]) for r in rows[1:]]
    assert all(0.0 <= f <= 1.0 for f in fractions)


def test_plm_study_needs_axis(tmp_path):
    code = main(["--out", str(tmp_path / "o"), "plm-study", "--trials", "3"])
    assert code == 1


def test_fsigma_grid_mask_symmetric(tmp_path):
    out = tmp_path / "out"
    code = main(["--out", str(out), "--format", "csv", "fsigma-grid",
                 "--kind", "sigmoid", "--range=-8,8", "--step", "1.0"])
    assert code == 0
    with open(out / "fsigma_grid.csv") as fh:
        rows = list(csv.reader(fh))[1:]
    above = {(r[0], r[1]) for r in rows if r[3] == "1"}
    assert above
    assert all((y, x) in above for x, y in above)


def test_compare_lda_emits_both_modes(blob_fixture, tmp_path):
    data, labels = blob_fixture
    out = tmp_path / "out"
    code = main(["--out", str(out), "compare-lda", "--data", str(data),
                 "--labels", str(labels), "--positive-class", "0"])
    assert code == 0
    docs = json.loads((out / "compare_lda.json").read_text())
    modes = {d["weight_mode"] for d in docs}
    assert modes == {"approximate", "exact"}
    assert all("j_omega" in d for d in docs)


def test_json_csv_encode_identical_values(blob_fixture, tmp_path):
    data, labels = blob_fixture
    out_json = tmp_path / "oj"
    out_csv = tmp_path / "oc"
    for fmt, out in (("json", out_json), ("csv", out_csv)):
        code = main(["--out", str(out), "--format", fmt, "measure",
                     "--data", str(data), "--labels", str(labels),
                     "--positive-class", "0"])
        assert code == 0
    doc = json.loads((out_json / "measure.json").read_text())[0]
    with open(out_csv / "measure.csv") as fh:
        header, row = list(csv.reader(fh))
    decoded = dict(zip(header, row))
    for key in ("ls_star", "ls0", "ls1", "ls2", "j_omega"):
        assert float(decoded[key]) == doc[key]
    assert int(decoded["pos"]) == doc["counts"]["pos"]
    assert int(decoded["zero"]) == doc["counts"]["zero"]
    assert bool(int(decoded["degenerate"])) == doc["degenerate"]


def test_env_var_thread_fallback(tmp_path, monkeypatch, blob_fixture):
    data, labels = blob_fixture
    monkeypatch.setenv("SEPSCOPE_THREADS", "4")
    out = tmp_path / "out"
    code = main(["--out", str(out), "measure", "--data", str(data),
                 "--labels", str(labels), "--multiclass"])
    assert code == 0
