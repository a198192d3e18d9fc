import json
import subprocess
import sys

import pytest

from quilvm.cli import main

from conftest import BELL, CFG_EXAMPLE


@pytest.fixture
def bell_file(tmp_path):
    p = tmp_path / "bell.quil"
    p.write_text(BELL)
    return p


def call(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_run_dump_state(capsys, bell_file):
    code, out, _ = call(capsys, "run", bell_file, "--dump-state", "--seed", 7)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 4
    assert lines[0].split("\t")[0] == "0" and float(lines[0].split("\t")[1]) == pytest.approx(0.7071067811865476)


def test_run_prints_memory(capsys, tmp_path):
    p = tmp_path / "m.quil"
    p.write_text("X 0\nMEASURE 0 [1]\n")
    code, out, _ = call(capsys, "run", p, "--seed", 1)
    assert code == 0 and out == "0\t0\n1\t1\n"


def test_json(capsys, bell_file):
    code, out, _ = call(capsys, "json", bell_file)
    assert code == 0
    doc = json.loads(out)
    assert doc["type"] == "parsed_program"
    assert [e["type"] for e in doc["executable_program"]] == ["unresolved_application"] * 2


def test_missing_file(capsys):
    code, _, err = call(capsys, "run", "missing.quil")
    assert code == 1 and "not found" in err


def test_parse_error_reports_line(capsys, tmp_path):
    p = tmp_path / "bad.quil"
    p.write_text("H 0\nMEASURE 0 [x]\n")
    code, _, err = call(capsys, "parse", p)
    assert code == 1 and ":2:" in err


def test_link_error(capsys, tmp_path):
    p = tmp_path / "bad.quil"
    p.write_text("H 0\nJUMP @nowhere\n")
    code, _, err = call(capsys, "run", p)
    assert code == 1 and "line 2" in err


def test_budget_exit_code(capsys, tmp_path):
    p = tmp_path / "loop.quil"
    p.write_text("LABEL @L\nJUMP @L\n")
    code, _, err = call(capsys, "run", p, "--budget", 1000)
    assert code == 2 and "budget" in err


def test_wait_fail(capsys, tmp_path):
    p = tmp_path / "w.quil"
    p.write_text("WAIT\n")
    assert call(capsys, "run", p, "--wait-mode", "fail")[0] == 2
    assert call(capsys, "run", p)[0] == 0


def test_shots_histogram(capsys, tmp_path):
    p = tmp_path / "r.quil"
    p.write_text("H 0\nH 1\nMEASURE 0 [0]\nMEASURE 1 [1]\n")
    code, out, _ = call(capsys, "shots", p, "--shots", 400, "--seed", 3)
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines()]
    assert [r[0] for r in rows] == ["00", "01", "10", "11"]
    assert sum(int(r[1]) for r in rows) == 400
    again = call(capsys, "shots", p, "--shots", 400, "--seed", 3)[1]
    assert again == out


def test_shots_observe(capsys, tmp_path):
    p = tmp_path / "t.quil"
    p.write_text("TRUE [3]\n")
    code, out, _ = call(capsys, "shots", p, "--shots", 5, "--seed", 1, "--observe", "[2-3]")
    assert code == 0 and out == "10\t5\n"


def test_cfg(capsys, tmp_path):
    p = tmp_path / "c.quil"
    p.write_text(CFG_EXAMPLE)
    code, out, _ = call(capsys, "cfg", p)
    assert code == 0 and out.count("->") == 3


def test_compile(capsys, tmp_path):
    p = tmp_path / "c.quil"
    p.write_text("CNOT 0 2\nRX(0.5) 1\n")
    code, out, _ = call(capsys, "compile", p, "--topology", "line:3", "--rule",
                        "RX(%t) q -> H q; RZ(%t) q; H q")
    assert code == 0
    assert out == "SWAP 0 1\nCNOT 1 2\nSWAP 0 1\nH 1\nRZ(0.5) 1\nH 1\n"


def test_parallelize(capsys, tmp_path):
    p = tmp_path / "p.quil"
    p.write_text("H 0\nH 1\nCNOT 0 1\n")
    code, out, _ = call(capsys, "parallelize", p)
    assert code == 0 and out == "# block 0\n{ H 0; H 1 }\nCNOT 0 1\n"


def test_generators(capsys):
    assert call(capsys, "gen-qft", 2, "--symbolic")[1] == "H 1\nCPHASE(pi/2) 0 1\nH 0\nSWAP 0 1\n"
    assert call(capsys, "gen-bell", 0, 0)[0] == 1
    assert call(capsys, "gen-bell", 0, 1)[1].endswith("BELL 0 1\n")


def test_output_file(capsys, tmp_path, bell_file):
    out = tmp_path / "out.txt"
    assert call(capsys, "parse", bell_file, "-o", out)[0] == 0
    assert out.read_text() == BELL


def test_stdin_and_byte_identical_runs(tmp_path):
    args = [sys.executable, "-m", "quilvm.cli", "run", "-", "--seed", "11", "--dump-state"]
    src = "H 0\nH 1\nMEASURE 0 [0]\nCNOT 0 1\n"
    a = subprocess.run(args, input=src, capture_output=True, text=True)
    b = subprocess.run(args, input=src, capture_output=True, text=True)
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout


def test_no_stdgates(capsys, bell_file):
    assert call(capsys, "run", bell_file, "--no-stdgates")[0] == 1


def test_include_path(capsys, tmp_path):
    lib = tmp_path / "lib"
    lib.mkdir()
    (lib / "g.quil").write_text("DEFGATE MYX:\n    0, 1\n    1, 0\n")
    p = tmp_path / "p.quil"
    p.write_text('INCLUDE "g.quil"\nMYX 0\nMEASURE 0 [0]\n')
    assert call(capsys, "run", p)[0] == 1
    code, out, _ = call(capsys, "run", p, "-I", lib, "--seed", 0)
    assert code == 0 and out == "0\t1\n"
