import json
from pathlib import Path

import pytest

from mcalc.cli import main

PATTERNS = Path(__file__).resolve().parent.parent / "patterns"


def pat(name: str) -> str:
    return str(PATTERNS / name)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_std_teleport_prints_standard_form(capsys):
    code, out, _ = run(capsys, "std", pat("teleport2.mc"))
    assert code == 0
    assert out.splitlines()[-1] == ("pattern Teleport2 { qubits: 1 2 3 inputs: 1 outputs: 3 "
                                    "seq: X(3;s2) Z(3;s1) M(2;-pi/5;s=s1) M(1;-pi/3) E(2,3) E(1,2) }")


def test_std_trace_lines(capsys):
    code, out, _ = run(capsys, "std", pat("teleport2.mc"), "--trace")
    rules = [line for line in out.splitlines() if line.startswith("RULE ")]
    assert code == 0 and rules
    assert rules[0] == "RULE EX @ 2 : E(2,3) X(2;s1) ⇒ X(2;s1) Z(3;s1) E(2,3)"
    assert all(" @ " in r and " : " in r and "⇒" in r for r in rules)


def test_std_shift_then_depth_ghz8(capsys, tmp_path):
    out_file = tmp_path / "g8.mc"
    assert run(capsys, "std", pat("ghz8.mc"), "--shift", "-o", out_file)[0] == 0
    code, out, _ = run(capsys, "depth", out_file, "--dot", tmp_path / "g.dot", "--json", tmp_path / "g.json")
    assert code == 0
    assert out.splitlines()[0] == "measurement rounds: 1, total depth: 2"
    assert (tmp_path / "g.dot").read_text().startswith("digraph")
    assert json.loads((tmp_path / "g.json").read_text())["depth"] == 2


def test_depth_requires_standard(capsys):
    code, _, err = run(capsys, "depth", pat("teleport2.mc"))
    assert code == 1 and "standard" in err


def test_equiv_modes(capsys):
    assert run(capsys, "equiv", pat("rz_5q.mc"), pat("rz_3q.mc"), "--mode", "choi")[0] == 0
    assert run(capsys, "equiv", pat("rz_3q.mc"), pat("rx_3q.mc"), "--mode", "choi")[0] == 1
    assert run(capsys, "equiv", pat("teleport_id.mc"), pat("teleport_id.mc"))[0] == 0


def test_check(capsys):
    assert run(capsys, "check", pat("h.mc"), "--model", "pauli")[0] == 0
    code, _, err = run(capsys, "check", pat("j_quarter.mc"), "--model", "pauli")
    assert code == 1 and "pauli" in err
    assert run(capsys, "check", pat("pauli_j_quarter.mc"))[0] == 0
    assert run(capsys, "check", pat("teleport_tele.mc"))[0] == 0


def test_semantics_and_json(capsys, tmp_path):
    code, out, _ = run(capsys, "semantics", pat("h.mc"), "--json", tmp_path / "h.json")
    assert code == 0 and "determinism: StronglyDeterministic" in out
    obj = json.loads((tmp_path / "h.json").read_text())
    assert obj["determinism"] == "StronglyDeterministic" and sorted(obj["branch_maps"]["maps"]) == ["0", "1"]


def test_run_inputs(capsys, tmp_path):
    code, out, _ = run(capsys, "run", pat("h.mc"), "--input", "basis:1")
    assert code == 0 and out.count("p=0.500000000000") == 2
    vec = tmp_path / "v.json"
    vec.write_text("[[0.6, 0.0], [0.0, 0.8]]")
    code, out, _ = run(capsys, "run", pat("h.mc"), "--input", vec, "--branch", "1")
    assert code == 0 and out.startswith("branch 1: p=0.500000000000")
    assert run(capsys, "run", pat("h.mc"), "--input", "basis:10")[0] == 2


def test_embed_round_trip(capsys, tmp_path):
    tele = tmp_path / "t.mc"
    assert run(capsys, "embed", pat("rz_embed_src.mc"), "--to", "tele", "-o", tele)[0] == 0
    assert "model: tele" in tele.read_text() and "M2(" in tele.read_text()
    code, out, _ = run(capsys, "embed", tele, "--to", "oneway", "--strip-dummies")
    assert code == 0 and "_d" not in out


def test_zoo_emits_parseable_pattern(capsys, tmp_path):
    f = tmp_path / "j.mc"
    assert run(capsys, "zoo", "J", "pi/4", "-o", f)[0] == 0
    assert run(capsys, "semantics", f)[0] == 0
    code, out, _ = run(capsys, "zoo", "GHZ", "3")
    assert code == 0 and out.startswith("pattern GHZ_3 {")


def test_usage_and_resource_errors(capsys, tmp_path):
    assert run(capsys, "zoo", "Toffoli")[0] == 2
    assert run(capsys, "std")[0] == 2
    assert run(capsys, "std", tmp_path / "missing.mc")[0] == 2
    assert run(capsys, "zoo", "GHZ", "x")[0] == 2
    big = tmp_path / "g14.mc"
    run(capsys, "zoo", "GHZ", "14", "-o", big)
    code, _, err = run(capsys, "semantics", big)
    assert code == 3 and "resource guard" in err


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.mc"
    bad.write_text("pattern B { qubits: 1 inputs: 1 outputs: 1 seq: Q(1) }")
    code, _, err = run(capsys, "check", bad)
    assert code == 1 and "line 1, column 49" in err


def test_output_is_deterministic(capsys):
    a = run(capsys, "std", pat("cu.mc"), "--shift")[1]
    b = run(capsys, "std", pat("cu.mc"), "--shift")[1]
    assert a == b
