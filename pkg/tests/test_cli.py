import json

import pytest

from pumbilic.cli import EXIT_CHECK, EXIT_INPUT, EXIT_OK, main
from pumbilic.io import read_polyline

from conftest import JET_DIR


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", JET_DIR / "J1.json")
    assert code == EXIT_OK
    assert "kind: D1" in out and "disc: 32" in out


def test_classify_empty_jet_is_umbilic(capsys):
    code, out, _ = run(capsys, "classify", JET_DIR / "empty.json")
    assert code == EXIT_OK and "Umbilic" in out


def test_bad_input(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"qq": 1}')
    code, _, err = run(capsys, "classify", bad)
    assert code == EXIT_INPUT and "unknown coefficient 'qq'" in err
    bad.write_text('{"a": ')
    code, _, err = run(capsys, "classify", bad)
    assert code == EXIT_INPUT and "line 1" in err
    code, _, err = run(capsys, "classify", JET_DIR / "J1.json", "--tol", "0")
    assert code == EXIT_INPUT


def test_classify_writes_report(capsys, tmp_path):
    out = tmp_path / "r.json"
    run(capsys, "classify", JET_DIR / "J5.json", "--out", out)
    rep = json.loads(out.read_text())
    assert rep["kind"] == "D23" and rep["invariants"]["chi23"] == 3


def test_curve(capsys):
    code, out, _ = run(capsys, "curve", JET_DIR / "J5.json", "--range", "0.03")
    assert code == EXIT_OK and "D2|D23|D3" in out


def test_curve_off_the_curve(capsys):
    code, _, err = run(capsys, "curve", JET_DIR / "J1.json", "--at", 1, 1, 1)
    assert code == EXIT_INPUT and "NewtonDiverged" in err


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_trace(capsys, tmp_path, fmt):
    out = tmp_path / f"line.{fmt}"
    code, text, _ = run(capsys, "trace", JET_DIR / "J1.json", "--at", 0.05, 0, 0.01,
                        "--length", 0.05, "--out", out, "--format", fmt)
    assert code == EXIT_OK and "F1" in text
    assert read_polyline(out, fmt).length == pytest.approx(0.05, rel=1e-3)


def test_separatrix(capsys, tmp_path):
    code, text, _ = run(capsys, "separatrix", JET_DIR / "J4.json", "--leaves", 2,
                        "--out", tmp_path, "--threads", 2)
    assert code == EXIT_OK
    assert {p.name for p in tmp_path.iterdir()} == {"zeta1.json", "zeta2.json"}
    assert "partial family" in text
    rec = json.loads((tmp_path / "zeta2.json").read_text())
    assert rec["partial"] and rec["nh_type"] == "saddle-node"


def test_verify_and_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", JET_DIR / "J3.json")
    assert code == EXIT_OK and "1/1 passed" in out
    code, out, _ = run(capsys, "verify", "--random", 2, "--class", "D2", "--threads", 2)
    assert code == EXIT_OK and "2/2 passed" in out
    code, _, _ = run(capsys, "verify")
    assert code == EXIT_INPUT


def test_verify_failure_exit_code(capsys, monkeypatch):
    from pumbilic import cli, verify

    def failing(jet, label, seed=0):
        return verify.VerifyReport(label, [verify.Check("forced", 1, 0, None, False)])

    monkeypatch.setattr(cli, "verify_jet", failing)
    code, out, _ = run(capsys, "verify", JET_DIR / "J1.json")
    assert code == EXIT_CHECK and "[FAIL] forced" in out


def test_oracle_diff(capsys):
    code, out, _ = run(capsys, "oracle-diff", JET_DIR / "J5.json", "--entry", "g13")
    assert code == EXIT_OK and "g13" in out
    code, _, err = run(capsys, "oracle-diff", JET_DIR / "J5.json", "--entry", "nope")
    assert code == EXIT_INPUT


def test_census(capsys):
    code, out, _ = run(capsys, "census", JET_DIR / "J1.json", "--seeds", 16)
    assert code == EXIT_OK and "separatrix_pairs: 1" in out
