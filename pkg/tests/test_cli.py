import json
import subprocess
import sys
from pathlib import Path

import pytest

from toricount.cli import main
from toricount.fan import library_fan, parse_fan

GOLDEN = Path(__file__).parent / "golden"
CONFIGS = sorted(p.name[: -len(".config.json")] for p in GOLDEN.glob("*.config.json"))


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fan_collections(capsys):
    code, out, _ = run(capsys, "fan", "collections", "p2")
    assert code == 0 and out.strip() == "{0,1,2}"


def test_fan_invariants(capsys):
    code, out, _ = run(capsys, "fan", "invariants", "p1xp1")
    assert code == 0 and "rank: 2" in out


def test_fan_validate_broken_file(capsys, tmp_path):
    path = tmp_path / "broken.fan"
    path.write_text(json.dumps({"dim": 2, "rays": [[1, 0], [0, 1], [-1, -1]],
                                "max_cones": [[0, 1], [1, 2]]}))
    code, out, _ = run(capsys, "fan", "validate", str(path))
    assert code == 3
    assert "complete=False" in out and "  - " in out


def test_fan_unreadable_file(capsys, tmp_path):
    path = tmp_path / "garbage.fan"
    path.write_text("{")
    assert run(capsys, "fan", "invariants", str(path))[0] == 3


def test_fan_dump_round_trips(capsys, tmp_path):
    out = tmp_path / "dp6.fan"
    assert run(capsys, "fan", "dump", "dp6", "--out", str(out))[0] == 0
    assert parse_fan(out.read_text()) == library_fan("dp6")


def test_series_moebius(capsys):
    code, out, _ = run(capsys, "series", "moebius", "p2")
    assert code == 0 and out.strip() == "1 - T0*T1*T2"


def test_series_campana_moebius(capsys):
    code, out, _ = run(capsys, "series", "campana-moebius", "p1", "--m", "2,2", "--bound", "4")
    assert code == 0
    assert "truncation: total<=4" in out
    assert "(2, 2) := -1" in out.splitlines()


def test_series_euler_counting(capsys):
    code, out, _ = run(capsys, "series", "euler", "p1", "--curve", "p1", "--q", "2", "--bound", "6")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# euler P1")
    assert "(1, 1) := 6" in lines
    assert all("L" not in line for line in lines[1:])


def test_series_euler_motivic(capsys):
    code, out, _ = run(capsys, "series", "euler", "p1", "--local", "moebius", "--bound", "4")
    assert code == 0
    assert "(1, 1) := -L - 1" in out.splitlines()


def test_count_p2(capsys):
    code, out, _ = run(capsys, "count", "--fan", "p2", "--q", "2", "--deg", "1,1,1")
    assert code == 0
    row = out.splitlines()[1].split(",")
    assert "24" in row and row.count("24") == 2


def test_count_campana(capsys):
    code, out, _ = run(capsys, "count", "--fan", "p1", "--q", "3", "--m", "2,2", "--deg", "2,2")
    assert code == 0
    assert ',24,24,' in out.splitlines()[1]


def test_count_inadmissible(capsys):
    code, out, _ = run(capsys, "count", "--fan", "p2", "--q", "2", "--deg", "1,2,1")
    assert code == 0
    assert ',"1,2,1",0,0,0,' in out.splitlines()[1]


def test_count_budget_exit(capsys):
    code, out, _ = run(capsys, "count", "--fan", "p2", "--q", "3", "--deg", "3,3,3",
                       "--budget", "1000")
    assert code == 5
    assert ',"3,3,3",,' in out


def test_count_bad_multiplicities(capsys):
    assert run(capsys, "count", "--fan", "p2", "--m", "2,2", "--deg", "1,1,1")[0] == 2
    assert run(capsys, "count", "--fan", "p2", "--deg", "1,1")[0] == 2


def test_count_mismatch_exit(capsys, monkeypatch):
    from toricount import ffcount

    def broken(*args, **kwargs):
        raise ffcount.OracleMismatch("forced")

    monkeypatch.setattr(ffcount, "count_both", broken)
    code, out, _ = run(capsys, "count", "--fan", "p1", "--q", "2", "--deg", "1,1")
    assert code == 4


def test_verify_classical(capsys):
    code, out, _ = run(capsys, "verify", "classical-p1")
    assert code == 0
    assert "[PASS] classical-p1" in out and "3/4" in out


def test_verify_failure_exit(capsys, monkeypatch):
    from toricount import verify

    monkeypatch.setitem(verify.SUITES, "classical-p1",
                        lambda budget=None: [verify.Verdict("forced", False, "no", 0.0)])
    code, out, _ = run(capsys, "verify", "classical-p1")
    assert code == 1 and "[FAIL] forced" in out


@pytest.mark.parametrize("name", CONFIGS)
def test_golden_reports(name, tmp_path, capsys):
    prefix = tmp_path / name
    code = main(["count", "--config", str(GOLDEN / f"{name}.config.json"), "--out", str(prefix)])
    capsys.readouterr()
    assert code == 0
    for suffix in (".csv", ".json"):
        expected = (GOLDEN / f"{name}{suffix}").read_text()
        assert Path(str(prefix) + suffix).read_text() == expected, suffix


def test_golden_is_independent_of_workers(tmp_path, capsys):
    prefix = tmp_path / "p2"
    code = main(["count", "--config", str(GOLDEN / "p2_identity.config.json"), "--workers", "3",
                 "--out", str(prefix)])
    capsys.readouterr()
    assert code == 0
    assert Path(str(prefix) + ".csv").read_text() == (GOLDEN / "p2_identity.csv").read_text()


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "toricount", "fan", "collections", "p1xp1"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["{0,1}", "{2,3}"]
