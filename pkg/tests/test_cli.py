import json

import pytest

from belltax.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def h14_file(tmp_path, capsys):
    path = tmp_path / "h14.json"
    assert run(capsys, "construct", "--name", "h14-violating", "--out", str(path))[0] == 0
    return path


def test_classify_h14(capsys, h14_file):
    code, out, _ = run(capsys, "classify", "--in", str(h14_file), "--partition", "alpha")
    assert code == 0 and out.strip() == "H14a strong"


def test_construct_then_classify_h29(capsys, tmp_path):
    path = tmp_path / "d.json"
    run(capsys, "construct", "--name", "h29-perfect", "--out", str(path))
    code, out, _ = run(capsys, "classify", "--in", str(path))
    assert out.strip() == "H29a local"
    assert run(capsys, "classify", "--in", str(path), "--assert", "H29a")[0] == 0
    assert run(capsys, "classify", "--in", str(path), "--assert", "strong")[0] == 1


def test_construct_transform(capsys, tmp_path):
    path = tmp_path / "d.json"
    run(capsys, "construct", "--name", "h29-perfect", "--transform", "swap-settings", "--out", str(path))
    assert run(capsys, "classify", "--in", str(path), "--assert", "H22a")[0] == 0


def test_classify_both_json(capsys, h14_file):
    code, out, _ = run(capsys, "classify", "--in", str(h14_file), "--partition", "both", "--json")
    data = json.loads(out)
    assert [c["class"] for c in data["classes"]][0] == "H14a"
    assert len(data["classes"]) == 2


def test_threshold(capsys):
    code, out, _ = run(capsys, "threshold", "--triple", "0.375,0.125,0.125")
    assert code == 0
    assert "eps_max = 0.04831" in out
    assert "delta = 1.1280e-04" in out
    code, out, _ = run(capsys, "threshold", "--triple", "0.1,0.2,0.3", "--json")
    assert json.loads(out)["eps_max"] is None


def test_check(capsys, h14_file):
    code, out, _ = run(capsys, "check", "--in", str(h14_file), "--assert", "violated")
    assert code == 0 and "VIOLATED" in out
    assert run(capsys, "check", "--in", str(h14_file), "--assert", "holds")[0] == 1
    code, out, _ = run(capsys, "check", "--triple", "3/8,1/8,1/8", "--json")
    data = json.loads(out)
    assert data["usual"]["margin"] == 0.125 and data["triple"] == ["3/8", "1/8", "1/8"]
    code, out, _ = run(capsys, "check", "--triple", "0.375,0.125,0.125", "--delta", "1e-3", "--assert", "generalized-holds")
    assert code == 0


def test_check_with_regime(capsys, tmp_path):
    path = tmp_path / "h10.json"
    run(capsys, "construct", "--name", "h10-violating", "--delta", "1/2000", "--out", str(path))
    code, out, _ = run(capsys, "check", "--in", str(path), "--regime", "nearly", "--delta", "1e-3")
    assert code == 0 and "residual 0" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["classify"],
        ["classify", "--in", "/nonexistent.json"],
        ["verify", "--class", "H40a"],
        ["threshold", "--triple", "1,2"],
        ["construct", "--name", "h10-violating"],
        ["check"],
        ["verify", "--class", "H4a", "--restarts", "0"],
        [],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_bad_json_reports_line(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "a_settings": [0,\n}')
    code, _, err = run(capsys, "classify", "--in", str(path))
    assert code == 2 and "line 3" in err


def test_verify_class(capsys, tmp_path):
    out_path = tmp_path / "w.json"
    code, out, _ = run(capsys, "verify", "--class", "H14a", "--restarts", "8", "--out", str(out_path), "--assert", "can-violate")
    assert code == 0 and "can-violate" in out
    assert run(capsys, "classify", "--in", str(out_path), "--assert", "H14a")[0] == 0
    code, out, _ = run(capsys, "verify", "--class", "H4a", "--restarts", "5", "--json")
    assert json.loads(out)["status"] == "inconsistent"


def test_verify_suites(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "collapse", "--class", "H16a", "--restarts", "10", "--assert", "ok")
    assert code == 0
    code, out, _ = run(capsys, "verify", "--suite", "partition", "--generator", "near-perfect", "--restarts", "20", "--json")
    assert json.loads(out)["models"] == 20


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("BELLTAX_SEED", "5")
    a = run(capsys, "verify", "--class", "H22a", "--restarts", "3", "--json")[1]
    b = run(capsys, "verify", "--class", "H22a", "--restarts", "3", "--seed", "5", "--json")[1]
    assert a == b
    monkeypatch.setenv("BELLTAX_SEED", "x")
    assert run(capsys, "verify", "--class", "H22a")[0] == 2


def test_report(capsys, tmp_path):
    path = tmp_path / "t.txt"
    code, _, _ = run(capsys, "report", "--regime", "strict", "--restarts", "5", "--out", str(path))
    lines = path.read_text().splitlines()
    assert code == 0 and len(lines) == 33
    assert lines[29].startswith("H29")
