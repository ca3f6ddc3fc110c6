import json

import numpy as np
import pytest
from hypothesis import given, settings

from mcalc.analysis import dependency_graph
from mcalc.core import Angle, Signal
from mcalc.rewrite import shift_signals, standardize
from mcalc.sim import branch_maps
from mcalc.textio import (
    ParseError, PatternDocument, export_json, format_angle, format_signal, parse, parse_angle, parse_commands,
    parse_pattern, format_pattern, print_document,
)
from mcalc.zoo import GHZ, H
from patterngen import patterns

H_TEXT = "pattern H { qubits: 1 2 inputs: 1 outputs: 2 seq: X(2;s1) M(1;0) E(1,2) }"


def test_parse_h_pattern():
    assert parse_pattern(H_TEXT) == H()


def test_print_h_byte_exact():
    assert format_pattern(H(), "H") == H_TEXT


def test_signal_and_angle_rendering():
    assert format_signal(Signal.of("2", "1", constant=1)) == "s1+s2+1"
    assert format_angle(Angle.pi(-1, 2)) == "-pi/2"
    assert format_angle(Angle.pi(6, 4)) == "-pi/2"
    assert format_angle(Angle.pi(3, 4)) == "3*pi/4"
    assert parse_angle("-pi/2") == Angle.pi(-1, 2)


def test_measurement_angle_exact():
    (m,) = parse_commands("M(1;-pi/2)")
    assert m.angle.base.exact and m.angle.base == Angle.pi(-1, 2)


def test_comments_and_model_round_trip():
    text = "# a comment\n#\npattern T { model: phase qubits: 1 2 inputs: 1 outputs: 2 seq: P(2;pi/4;s1) X(2;s1) M(1;0) E(1,2) N(2;pi/4) }"
    doc = parse(text)
    assert doc.model == "phase" and doc.comments == ("a comment", "")
    assert print_document(doc) == text


def test_m2_fields_round_trip():
    text = ("pattern T { model: tele qubits: 1 2 3 4 inputs: 1 outputs: 4 "
            "seq: X(4;s2) M2(2,3;pi/3,0;s=s1;t=0;u=s1;v=0) E(3,4) E(2,3) M(1;0) E(1,2) }")
    assert print_document(parse(text)) == text


def test_constant_signals_fold_into_the_base_angle():
    doc = parse("pattern T { model: tele qubits: 1 2 inputs: 1 outputs: 2 seq: M2(1,2;pi/3,0;s=0;t=0;u=1;v=0) }")
    canonical = print_document(doc)
    assert "M2(1,2;-2*pi/3,0)" in canonical
    assert print_document(parse(canonical)) == canonical


@pytest.mark.parametrize("text, line, col", [
    ("pattern H { qubits: 1 2 inputs: 1 outputs: 2 seq: X(2;s3) }", 1, 56),
    ("pattern H {\n qubits: 1 1 inputs: 1 outputs: 1 seq: }", 2, 12),
    ("pattern H { qubits: 1 inputs: 1 outputs: 1 seq: Q(1) }", 1, 49),
    ("pattern H { qubits: 1 inputs: 1 outputs: 1 seq: M(1;pi/0) }", 1, 53),
])
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_parse_error_lists_expected_tokens():
    with pytest.raises(ParseError) as info:
        parse("pattern H { qubits: 1 inputs: 1 outputs: 1 seq: Q(1) }")
    assert "E(" in info.value.expected


def test_float_angle_round_trip():
    text = "pattern R { qubits: 1 2 inputs: 1 outputs: 2 seq: X(2;s1) M(1;0.3183098861837907) E(1,2) }"
    assert print_document(parse(text)) == text


@settings(max_examples=80, deadline=None)
@given(patterns(max_qubits=5, max_commands=14, floats=True))
def test_print_parse_round_trip(p):
    text = format_pattern(p, "R")
    doc = parse(text)
    assert doc.pattern == p
    assert print_document(doc) == text


def test_json_h_branch_maps():
    obj = json.loads(export_json(branch_maps(H())))
    assert obj["measured_order"] == ["1"]
    assert sorted(obj["maps"]) == ["0", "1"]
    for key in ("0", "1"):
        m = np.array([[complex(*z) for z in row] for row in obj["maps"][key]])
        assert np.allclose(m, np.array([[1, 1], [1, -1]]) / 2, atol=1e-12)


def test_json_ghz3_graph():
    g = dependency_graph(shift_signals(standardize(GHZ(3))))
    obj = json.loads(export_json(g))
    assert len(obj["nodes"]) == 2 and obj["edges"] == []


def test_json_is_deterministic_and_seventeen_digits():
    s = export_json({"b": 1 / 3, "a": [1j, 2.0]})
    assert s == '{"a":[[0.0,1.0],2.0],"b":0.33333333333333331}'
    assert export_json(branch_maps(H())) == export_json(branch_maps(H()))


def test_document_type_fields():
    doc = PatternDocument("H", H(), ("x",))
    assert doc.model == "oneway"
