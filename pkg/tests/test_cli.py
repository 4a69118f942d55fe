import json
import subprocess
import sys

import pytest

from amem.cli import main

TOY = """system toy
objects: a, yes
contents env: a
evolve env: a -> yes
evolve env: a ->
"""

CHAIN = """system chain
objects: a, b, c, yes, no
mu: env( m() )
input: m
evolve m: a -> b
evolve m: b -> c
out m: c -> yes
"""


@pytest.fixture
def files(tmp_path):
    (tmp_path / "toy.mem").write_text(TOY)
    (tmp_path / "chain.mem").write_text(CHAIN)
    (tmp_path / "loop.mem").write_text("objects: a\ncontents env: a\nevolve env: a -> a\n")
    (tmp_path / "grow.mem").write_text("objects: a\ncontents env: a\nevolve env: a -> a a\n")
    (tmp_path / "bad.mem").write_text("objects: a\nevolve env a\n")
    return tmp_path


def test_family_parity_reject(capsys):
    assert main(["family", "parity", "--word", "101"]) == 1
    assert capsys.readouterr().out.strip() == "Reject"


def test_family_parity_accept(capsys):
    assert main(["family", "parity", "--word", "1"]) == 0
    assert capsys.readouterr().out.strip() == "Accept"


def test_family_table(capsys):
    assert main(["family", "parity", "--all-up-to", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1 + 2 + 4 + 8
    assert lines[1].split() == ["0", "Reject"]
    assert lines[-1].split() == ["111", "Accept"]


def test_explore_nonconfluent_exit(files, capsys):
    assert main(["explore", str(files / "toy.mem"), "--mode", "acknowledger"]) == 3
    assert capsys.readouterr().out.startswith("NonConfluent")


def test_explore_with_input(files, capsys):
    assert main(["explore", str(files / "chain.mem"), "--word", "a*2"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "ConfluentAccept"
    assert "max depth: " in out


def test_explore_exits(files):
    assert main(["explore", str(files / "loop.mem")]) == 3
    assert main(["explore", str(files / "grow.mem"), "--max-configs", "5"]) == 4


def test_simulate_bound_exit(files):
    assert main(["simulate", str(files / "loop.mem"), "--max-steps", "5"]) == 4


def test_parse_error_exit(files, capsys):
    assert main(["simulate", str(files / "bad.mem")]) == 2
    assert "line 2" in capsys.readouterr().err


def test_usage_error_exit():
    assert main(["frobnicate"]) == 2
    assert main(["family", "parity"]) == 2


def test_compiled_machine_simulates_to_accept(tmp_path, capsys):
    out = tmp_path / "c.mem"
    assert main(["compile-tm", "builtin:stconn3", "--input", "001000000", "-o", str(out)]) == 0
    assert main(["simulate", str(out), "--seed", "3"]) == 0
    assert main(["compile-tm", "builtin:stconn3", "--input", "000000000", "-o", str(out)]) == 0
    assert main(["simulate", str(out)]) == 1
    assert main(["explore", str(out)]) == 1


def test_analyze(files, capsys):
    assert main(["analyze", str(files / "chain.mem"), "--word", "a"]) == 0
    out = capsys.readouterr().out
    assert "(a,m)" in out and out.strip().endswith("predicted: Accept")
    assert main(["analyze", str(files / "chain.mem"), "--mode", "recogniser"]) == 2


def test_simulate_trace_document(files, tmp_path):
    trace = tmp_path / "t.json"
    assert main(["simulate", str(files / "chain.mem"), "--word", "a", "--trace", str(trace)]) == 0
    doc = json.loads(trace.read_text())
    assert doc["verdict"] == "Accept" and doc["steps"] == 3
    assert len(doc["trace"]) == 4
    assert set(doc["trace"][0]) == {"id", "label", "contents", "children"}


def test_seeded_reports_identical(files, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        main(["simulate", str(files / "toy.mem"), "--seed", "11", "--trace", str(path)])
    assert a.read_bytes() == b.read_bytes()


def test_circuit_commands(tmp_path, capsys):
    out = tmp_path / "c.txt"
    assert main(["circuit", "synth", "m-family", "-n", "4", "-o", str(out)]) == 0
    assert main(["circuit", "eval", str(out), "--word", "0000"]) == 0
    assert main(["circuit", "eval", str(out), "--word", "0100"]) == 1
    assert main(["circuit", "eval", str(out), "--word", "010"]) == 2
    assert main(["circuit", "synth", "m-family", "-n", "4"]) == 2


def test_reduce_commands(capsys):
    assert main(["reduce", "dtt", "m-family", "--word", "0100"]) == 1
    out = capsys.readouterr().out
    assert "combiner: or" in out and out.strip().endswith("verdict: Reject")
    assert main(["reduce", "ctt", "m-family", "--word", "1000"]) == 0
    assert main(["reduce", "m", "m-family", "--word", "1000"]) == 0
    assert "combiner: identity" in capsys.readouterr().out
    assert main(["reduce", "dtt", "parity", "--word", "1"]) == 2


def test_descriptor_file(tmp_path, capsys):
    desc = tmp_path / "f.json"
    desc.write_text(json.dumps({"builder": "dtt-family", "program": "builtin:even-length",
                                "r": "one-positions", "bound": "n"}))
    assert main(["family", str(desc), "--word", "0100"]) == 0
    assert main(["reduce", "dtt", str(desc), "--word", "1010"]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "amem", "family", "parity", "--word", "11"],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stdout.strip() == "Reject"
