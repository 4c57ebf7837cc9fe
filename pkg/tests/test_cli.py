import numpy as np
import pytest

from rtreveal.cli import main
from rtreveal.io import read_curves, read_observations

LATENTS = ["--latent", "L=logistic:-2,1", "--latent", "M=logistic:1.5,1", "--latent", "H=logistic:-1,1"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    records = dict(line.split("=", 1) for line in out.splitlines() if line and not line.startswith("#"))
    return code, records, out, err


@pytest.fixture
def obs(tmp_path, capsys):
    path = tmp_path / "obs.csv"
    code, *_ = run(capsys, "simulate", *LATENTS, "--n", 400, "--eta-sigma", 0.2, "--eps-sigma", 0.2,
                   "--seed", 5, "--out", path)
    assert code == 0
    return path


def test_simulate_deterministic(tmp_path, capsys, obs):
    other = tmp_path / "again.csv"
    run(capsys, "simulate", *LATENTS, "--n", 400, "--eta-sigma", 0.2, "--eps-sigma", 0.2, "--seed", 5,
        "--workers", 3, "--out", other)
    assert obs.read_bytes() == other.read_bytes()
    tab = read_observations(obs)
    assert sorted(set(tab.group)) == ["H", "L", "M"] and tab.has_baseline


def test_simulate_requires_seed(tmp_path, capsys):
    code, _, _, err = run(capsys, "simulate", *LATENTS, "--out", tmp_path / "x.csv")
    assert code == 2 and "seed" in err


def test_build_h_and_detect(obs, capsys):
    code, rec, _, _ = run(capsys, "build-h", "--input", obs, "--groups", "M")
    assert code == 0 and rec["group"] == "M" and "median" in rec
    code, rec, _, _ = run(capsys, "detect", "mean_sign", "--input", obs, "--groups", "M")
    assert code == 0 and rec["verdict"] in ("detected", "indeterminate")


def test_compare(obs, capsys):
    code, rec, _, _ = run(capsys, "compare", "fosd", "--input", obs, "--groups", "M,L")
    assert code == 0 and rec["verdict"] == "detected"
    code, rec, _, _ = run(capsys, "compare", "correlation", "--input", obs, "--groups", "L,H,M")
    assert code == 0 and -1 <= float(rec["value"]) <= 1


def test_rationalize(obs, capsys):
    code, rec, _, _ = run(capsys, "rationalize", "--input", obs, "--groups", "M")
    assert code == 0 and rec["status"] in ("rationalizable", "not_rationalizable", "undecided")


def test_test_and_replicate(obs, capsys):
    a = run(capsys, "test", "htcond", "--input", obs, "--b", 100, "--seed", 2, "--alpha", 0.5)
    b = run(capsys, "test", "htcond", "--input", obs, "--b", 100, "--seed", 2, "--alpha", 0.5, "--workers", 4)
    assert a[0] == 0 and a[2] == b[2]
    assert float(a[1]["p_value"]) >= 0.9
    code, rec, out, _ = run(capsys, "replicate", "--input", obs, "--b", 100, "--seed", 2)
    assert code == 0
    for m in range(1, 9):
        assert len([k for k in rec if k.startswith(f"m{m}.p_")]) == 6
    assert float(rec["m4.alpha"]) == pytest.approx(0.623, abs=1e-3)


def test_missing_groups(tmp_path, capsys):
    path = tmp_path / "one.csv"
    run(capsys, "simulate", "--latent", "M=logistic:0,1", "--n", 50, "--eps-sigma", 0.1, "--seed", 1, "--out", path)
    code, _, _, err = run(capsys, "test", "avcond", "--input", path, "--b", 100, "--seed", 1, "--alpha", 0.5)
    assert code == 2 and "missing groups" in err and "L" in err and "H" in err


def test_plot_condition(obs, tmp_path, capsys):
    d = tmp_path / "plots"
    code, *_ = run(capsys, "plot", "condition", "--input", obs, "--alpha", 0.5, "--out", d)
    assert code == 0
    cols, meta = read_curves(d / "condition_avcond.csv")
    assert list(cols) == ["t", "lhs", "rhs"] and meta["condition"] == "avcond"
    assert np.all(np.diff(cols["t"]) > 0)
    assert (d / "condition_avcond.svg").read_text().startswith("<svg")


def test_bad_input_reports_line(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("group_id,response,time,baseline_time\nM,2,0.5,1\n")
    code, _, _, err = run(capsys, "build-h", "--input", p)
    assert code == 2 and "line 2" in err
