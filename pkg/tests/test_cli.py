import json

import numpy as np
import pytest

from kerrkernel import io
from kerrkernel.cli import main


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert main(["gen-data", "--n", "240", "--seed", "3", "--out", str(d / "pts.csv")]) == 0
    assert main(["label", "--data", str(d / "pts.csv"), "--set", "munu3", "--out", str(d / "lab.csv"),
                 "--summary", str(d / "sum.json")]) == 0
    return d


def read(path):
    return path.read_bytes()


def test_gen_data_reproducible(work, tmp_path, capsys):
    out = tmp_path / "again.csv"
    assert main(["gen-data", "--n", "240", "--seed", "3", "--out", str(out)]) == 0
    assert read(out) == read(work / "pts.csv")
    assert "kurtosis" in capsys.readouterr().out


def test_gen_data_single_point(tmp_path):
    assert main(["gen-data", "--n", "1", "--seed", "0", "--out", str(tmp_path / "one.csv")]) == 0
    pts, labels = io.read_points(tmp_path / "one.csv")
    assert pts.shape == (1, 2) and labels is None
    assert main(["gen-data", "--n", "0", "--seed", "0", "--out", str(tmp_path / "z.csv")]) == 1


def test_label_summary(work):
    s = json.loads((work / "sum.json").read_text())
    assert s["count"] == 240
    assert s["counts"]["+1"] + s["counts"]["-1"] == 240
    assert s["proportions"]["+1"] == pytest.approx(s["counts"]["+1"] / 240)


def test_label_vacuum_fiducial_is_all_positive(work, tmp_path):
    # with alpha0 = 0 every encoded state is the vacuum and d(mu) = exp(-2|mu|^2) > 0
    out = tmp_path / "vac.csv"
    assert main(["label", "--data", str(work / "pts.csv"), "--alpha0", "0", "--out", str(out)]) == 0
    _, labels = io.read_points(out)
    assert np.all(labels == 1)


def test_label_from_sampled_displacements(work, tmp_path):
    disp = tmp_path / "d.json"
    assert main(["sample-displacements", "--count", "3", "--seed", "1", "--out", str(disp)]) == 0
    names = [o["name"] for o in json.loads(disp.read_text())]
    out = tmp_path / "l.csv"
    assert main(["label", "--data", str(work / "pts.csv"), "--displacements", str(disp), "--set", names[1],
                 "--out", str(out)]) == 0
    assert main(["label", "--data", str(work / "pts.csv"), "--displacements", str(disp), "--set", "nope",
                 "--out", str(out)]) == 1


def test_train_predict_and_config_round_trip(work, tmp_path):
    rep, model, mesh = tmp_path / "r.json", tmp_path / "m.json", tmp_path / "mesh.csv"
    argv = ["train", "--data", str(work / "lab.csv"), "--C", "10", "--seed", "7", "--report", str(rep),
            "--model", str(model), "--mesh", str(mesh), "--mesh-step", "0.1"]
    assert main(argv) == 0
    report = json.loads(rep.read_text())
    assert report["C"] == 10 and report["seed"] == 7 and report["config"]["split"] == 0.7
    assert len(mesh.read_text().splitlines()) == 1 + 11 * 11

    rep2 = tmp_path / "r2.json"
    assert main(["train", "--config", str(rep), "--report", str(rep2)]) == 0
    assert read(rep2) == read(rep)

    pred = tmp_path / "p.csv"
    assert main(["predict", "--model", str(model), "--data", str(work / "pts.csv"), "--out", str(pred)]) == 0
    _, labels = io.read_points(pred)
    assert set(np.unique(labels)) <= {-1, 1}


def test_train_rejects_bad_input(work, tmp_path):
    rep = str(tmp_path / "r.json")
    assert main(["train", "--data", str(work / "pts.csv"), "--seed", "1", "--report", rep]) == 1
    assert main(["train", "--data", str(work / "lab.csv"), "--report", rep]) == 1
    assert main(["train", "--data", str(work / "lab.csv"), "--seed", "1", "--split", "1.5", "--report", rep]) == 1
    assert main(["train", "--data", str(tmp_path / "missing.csv"), "--seed", "1", "--report", rep]) == 1
    assert main(["no-such-command"]) == 1


def test_kernel_exact_and_sampled(work, tmp_path):
    pts = tmp_path / "few.csv"
    full, _ = io.read_points(work / "pts.csv")
    io.write_points(pts, full[:12])
    ex, sa = tmp_path / "ex.csv", tmp_path / "sa.csv"
    assert main(["kernel", "--points", str(pts), "--out", str(ex)]) == 0
    assert main(["kernel", "--points", str(pts), "--mode", "sampled", "--shots", "20000", "--seed", "2",
                 "--out", str(sa)]) == 0
    assert main(["kernel", "--points", str(pts), "--mode", "sampled", "--out", str(sa)]) == 1
    K = np.loadtxt(ex, delimiter=",")
    S = np.loadtxt(sa, delimiter=",")
    assert np.allclose(np.diag(K), 1.0, atol=1e-12)
    assert np.max(np.abs(K - S)) < 0.02


@pytest.mark.filterwarnings("ignore:displacement beyond")
def test_wigner_variants(tmp_path):
    for extra in ([], ["--x2", "0.3", "--nu", "0.1,0.2"], ["--gamma", "0.1"]):
        out = tmp_path / "w.csv"
        assert main(["wigner", "--x", "0.25", "--steps", "5", "--out", str(out), *extra]) == 0
        rows = out.read_text().splitlines()
        assert rows[0] == "re,im,d_value" and len(rows) == 26
    assert main(["wigner", "--x", "0.25", "--x2", "0.3", "--gamma", "0.1", "--out", str(out)]) == 1


def test_sequential_and_divergence_exit_code(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sequential", "--x", "0.25", "--label", "1", "--epochs", "5", "--shots", "100",
                 "--seed", "0", "--out", str(out)]) == 0
    first = read(out)
    assert main(["sequential", "--x", "0.25", "--label", "1", "--epochs", "5", "--shots", "100",
                 "--seed", "0", "--out", str(out)]) == 0
    assert read(out) == first
    assert out.read_text().splitlines()[0] == "epoch,mu_re,mu_im,empirical_d,avg_error"
    # a huge step sends mu past the truncation: numerical failure
    assert main(["sequential", "--x", "0.25", "--label", "1", "--epochs", "50", "--eta", "1000",
                 "--gradient-mode", "exact", "--seed", "0", "--out", str(out)]) == 2


def test_loss_sweep_and_grid_search(work, tmp_path):
    out = tmp_path / "loss.csv"
    assert main(["loss-sweep", "--steps", "11", "--gammas", "0,0.1", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 22
    rep = tmp_path / "g.json"
    assert main(["grid-search", "--data", str(work / "lab.csv"), "--C-grid", "1,10", "--gamma-grid", "scale,5",
                 "--seed", "0", "--report", str(rep)]) == 0
    r = json.loads(rep.read_text())
    assert r["C"] in (1.0, 10.0) and 0 <= r["accuracy"] <= 1
