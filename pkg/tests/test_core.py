from fractions import Fraction

import pytest
from hypothesis import given, settings

from mcalc.core import (
    E, M, N, X, Z, Angle, DependentAngle, InterfaceError, Pattern, PatternError, Signal, Term,
    compose, identity, qubit_key, relabel, rename, sorted_qubits, tensor, validate,
)
from mcalc.zoo import H, J
from patterngen import patterns


def test_angle_exact_arithmetic_mod_two_pi():
    a = Angle.pi(3, 4)
    assert (a + Angle.pi(5, 4)) == Angle.zero()
    assert -Angle.pi(1, 2) == Angle.pi(3, 2)
    assert Angle.pi(2, 4).turns == Fraction(1, 2)  # multiples of pi
    assert (a - a).is_zero()
    assert Angle.pi(1).is_pi()


def test_angle_floats_compare_within_tolerance():
    import math
    assert Angle.rad(math.pi / 2) == Angle.pi(1, 2)
    assert Angle.rad(2 * math.pi + 1e-12) == Angle.zero()
    assert not Angle.rad(0.1).exact


def test_angle_coerce_rejects_bare_int():
    with pytest.raises(PatternError):
        Angle.coerce(1)
    assert Angle.coerce(0) == Angle.zero()


def test_signal_z2_algebra():
    s = Signal.of("1", "2") + Signal.of("2", constant=1)
    assert s == Signal.of("1", constant=1)
    assert (s + s).is_zero
    assert s.evaluate({"1": 1}) == 0
    assert Signal.of("3").substitute("3", Signal.of("1")) == Signal.of("1", "3")
    assert Signal.of("2").substitute("3", Signal.of("1")) == Signal.of("2")


def test_dependent_angle_evaluation():
    d = DependentAngle.of(Angle.pi(1, 3), Signal.of("1"), Signal.of("2"))
    assert d.evaluate({"1": 0, "2": 0}) == Angle.pi(1, 3)
    assert d.evaluate({"1": 1, "2": 0}) == Angle.pi(-1, 3)
    assert d.evaluate({"1": 1, "2": 1}) == Angle.pi(2, 3)
    signed = DependentAngle(Angle.zero(), Signal(), (Term(Angle.pi(-1, 2), Signal.of("2"), Signal.of("1")),))
    assert signed.evaluate({"1": 1, "2": 1}) == Angle.pi(1, 2)


def test_qubit_sorting_is_natural():
    assert sorted_qubits(["10", "2", "1", "b", "a"]) == ["1", "2", "10", "a", "b"]
    assert qubit_key("2'") > qubit_key("2")


def test_validate_h_pattern_clean():
    assert validate(H()) == []


def test_validate_d0_dependency_before_measurement():
    p = Pattern.build(["1"], ["2"], [X("2", Signal.of("1")), E("1", "2"), M("1", DependentAngle.of(0))])
    v = validate(p)
    assert [(x.condition, x.index) for x in v] == [("D0", 0)]


def test_validate_d1_and_d3():
    p = Pattern.build(["1", "2"], ["1", "2"], [M("1", DependentAngle.of(0)), E("1", "2")])
    conds = {(x.condition, x.index, x.qubit) for x in validate(p)}
    assert ("D1", 1, "1") in conds
    assert ("D3", None, "1") in conds


def test_validate_d2_preparation():
    p = Pattern(frozenset({"1", "2"}), (), ("1",), (N("1"), E("1", "2"), N("2"), M("2", DependentAngle.of(0))))
    assert [(x.condition, x.index, x.qubit) for x in validate(p)] == [("D2", 1, "2")]
    twice = Pattern(frozenset({"1"}), ("1",), ("1",), (N("1"),))
    assert [x.condition for x in validate(twice)] == ["D2"]


def test_compose_teleportation_interface():
    p = compose(relabel(J(Angle.pi(1, 5)), "2", "3"), J(Angle.pi(1, 3)))
    assert p.space == {"1", "2", "3"} and p.inputs == ("1",) and p.outputs == ("3",)
    assert p.seq[:3] == J(Angle.pi(1, 3)).seq
    assert validate(p) == []


def test_compose_identity_and_mismatch():
    h = H()
    assert compose(identity("2"), h) == h
    with pytest.raises(InterfaceError, match="1"):
        compose(H("1", "3"), H("1", "2"))


def test_tensor_cnot_piece_and_overlap():
    t = tensor(identity("1"), H("3", "4"))
    assert t.inputs == ("1", "3") and t.outputs == ("1", "4")
    with pytest.raises(InterfaceError):
        tensor(H(), H())


def test_rename_matches_relabel_and_round_trips():
    j = J(Angle.pi(1, 7))
    assert rename(j, {"1": "2", "2": "3"}) == J(Angle.pi(1, 7), "2", "3")
    with pytest.raises(PatternError):
        rename(j, {"1": "5", "2": "5"})
    with pytest.raises(PatternError):
        rename(j, {"1": "5"})


@settings(max_examples=60, deadline=None)
@given(patterns(max_qubits=5, max_commands=16))
def test_random_patterns_valid_and_rename_commutes(p):
    assert validate(p) == []
    forward = {q: f"q{q}" for q in p.space}
    back = {v: k for k, v in forward.items()}
    r = rename(p, forward)
    assert validate(r) == []
    assert rename(r, back) == p
