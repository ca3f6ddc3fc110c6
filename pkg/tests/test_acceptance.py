"""Acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line with its runtime; ``conftest.py``
prints them at the end of the pytest run. Run this file as a script to get
the same lines without pytest.
"""

from __future__ import annotations

import functools
import math
import random
import sys
import time
import traceback
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

from mcalc.analysis import clifford_member, dependency_graph, is_xy_only  # noqa: E402
from mcalc.core import (  # noqa: E402
    E, M, X, Angle, DependentAngle, Pattern, Signal, compose, rename, tensor,
)
from mcalc.models import embed_backward, embed_forward, model_check, pauli_j_quarter, remove_dummies  # noqa: E402
from mcalc.rewrite import (  # noqa: E402
    applicable, equiv_canonical, measure_of, random_standardize, shift_signals, standardize, step,
)
from mcalc.sim import (  # noqa: E402
    BranchMapSet, Determinism, branch_maps, choi, classify, equal_up_to_phase, extract_unitary, run_branch,
    semantic_equal,
)
from mcalc.textio import format_angle as fa, format_pattern, parse_commands  # noqa: E402
from mcalc import zoo  # noqa: E402
from patterngen import random_composable_pair, random_pattern  # noqa: E402

TOL = 1e-9
RESULTS: dict[int, str] = {}


def criterion(number: int, title: str, budget: float):
    """Record PASS/FAIL and runtime; a run over ``budget`` seconds fails."""

    def wrap(fn):
        @functools.wraps(fn)
        def run():
            t0 = time.perf_counter()
            note = ""
            try:
                detail = fn()
                elapsed = time.perf_counter() - t0
                ok = elapsed < budget
                note = detail or ""
                if not ok:
                    note = f"over budget ({budget:g} s)"
            except AssertionError as exc:
                elapsed = time.perf_counter() - t0
                ok = False
                note = str(exc).splitlines()[0] if str(exc) else "assertion failed"
            status = "PASS" if ok else "FAIL"
            RESULTS[number] = f"{status} [{number:2d}] {title} ({elapsed:.2f} s){': ' + note if note else ''}"
            assert ok, RESULTS[number]

        run.criterion = number
        return run

    return wrap


def golden(like: Pattern, text: str) -> Pattern:
    return Pattern.build(like.inputs, like.outputs, parse_commands(text), space=like.space)


def canonical_text(p: Pattern) -> str:
    return format_pattern(equiv_canonical(p))


def token_exact(p: Pattern, text: str) -> bool:
    return canonical_text(p) == canonical_text(golden(p, text))


A, B, C = Angle.pi(1, 3), Angle.pi(1, 5), Angle.pi(1, 7)


@criterion(1, "golden standardization: teleportation", 1.0)
def test_01_teleportation_golden():
    p = standardize(compose(zoo.J(B, "2", "3"), zoo.J(A, "1", "2")))
    assert token_exact(p, f"X(3;s2) Z(3;s1) M(2;{fa(-B)};s=s1) M(1;{fa(-A)}) E(2,3) E(1,2)"), canonical_text(p)


def cu_golden(al, be, ga, de) -> str:
    hb, hg, hd = be / 2, ga / 2, de / 2
    half_pi = Angle.pi(1, 2)
    ap = al + hb + hg + hd
    return " ".join([
        "Z(k;si+sg+se+sc+sa) X(k;sj+sh+sf+sd+sb) X(C;sB) Z(C;sA+se+sc)",
        f"M(B;0) M(A;{fa(-ap)}) M(j;0) M(i;{fa(-be - Angle.pi(1))};s=sh+sf+sd+sb)",
        f"M(h;{fa(hg)};s=sg+se+sc+sa) M(g;pi/2;s=sf+sd+sb)",
        f"M(f;0) M(e;-pi/2;s=sd+sb) M(d;{fa(-hg)};s=sc+sa) M(c;{fa(half_pi + hd + hb)};s=sb)",
        f"M(b;0) M(a;{fa(hb - hd + half_pi)})",
        "E(B,C) E(A,B) E(j,k) E(i,j) E(h,i) E(g,h) E(f,g) E(A,f) E(e,f) E(d,e) E(c,d) E(b,c) E(a,b) E(A,b)",
    ])


CU_ANGLES = (Angle.pi(1, 5), Angle.pi(1, 3), Angle.pi(1, 7), Angle.pi(2, 9))


@criterion(2, "golden standardization: CNOT, Rz, Rx, Rot, controlled-U", 5.0)
def test_02_goldens():
    cases = {
        "CNOT": (standardize(zoo.CNOT()), "X(4;s3) Z(4;s2) Z(1;s2) M(3;0) M(2;0) E(1,3) E(2,3) E(3,4)"),
        "Rz": (standardize(compose(zoo.H("2", "3"), zoo.J(A, "1", "2"))),
               f"X(3;s2) Z(3;s1) M(2;0) M(1;{fa(-A)}) E(1,2) E(2,3)"),
        "Rz5": (shift_signals(standardize(zoo.Rz5(A))),
                f"X(5;s2+s4) Z(5;s1+s3) M(4;0) M(3;{fa(-A)};s=s2) M(2;0) M(1;0) E(1,2) E(2,3) E(3,4) E(4,5)"),
        "Rx": (standardize(compose(zoo.J(A, "2", "3"), zoo.H("1", "2"))),
               f"X(3;s2) Z(3;s1) M(2;{fa(-A)};s=s1) M(1;0) E(2,3) E(1,2)"),
        "Rot": (shift_signals(standardize(zoo.Rot(A, B, C))),
                f"X(5;s2+s4) Z(5;s1+s3) M(4;0) M(3;{fa(A)};s=s2) M(2;{fa(B)};s=s1) M(1;{fa(C)}) "
                "E(1,2) E(2,3) E(3,4) E(4,5)"),
        "CU": (shift_signals(standardize(zoo.CU(*CU_ANGLES), absorb="x")), cu_golden(*CU_ANGLES)),
    }
    bad = [name for name, (p, text) in cases.items() if not token_exact(p, text)]
    assert not bad, f"mismatch: {bad}"


@criterion(3, "semantics oracle: zoo families realize their reference unitaries", 30.0)
def test_03_semantics_oracle():
    rng = random.Random(3)
    cases = [("J", (A,)), ("CZ", ()), ("H", ()), ("Rx", (A,)), ("Rz", (A,)), ("P", (B,)), ("Rz5", (A,)),
             ("Rot", (A, B, C)), ("CNOT", ()), ("Teleport", (A, B))]
    cases += [("CU", tuple(Angle.rad(rng.uniform(0, 2 * math.pi)) for _ in range(4))) for _ in range(5)]
    bad = []
    for family, params in cases:
        entry = zoo.make(family, *params)
        bms = branch_maps(entry.pattern)
        if classify(bms) is not Determinism.STRONGLY_DETERMINISTIC:
            bad.append(family)
        elif not equal_up_to_phase(extract_unitary(bms), entry.reference):
            bad.append(family)
    assert not bad, f"failing families: {bad}"
    return f"{len(cases)} instances incl. 5 controlled-U"


@criterion(4, "branch probabilities of M(2;alpha) on |+>", 1.0)
def test_04_branch_probabilities():
    p = Pattern.build(["1"], ["1"], [M("2", DependentAngle(Angle.zero()))])
    for alpha in (Angle.zero(), Angle.pi(1, 3), Angle.pi(1, 2)):
        q = p.with_seq([M("2", DependentAngle(alpha))])
        plus = np.array([1, 1]) / math.sqrt(2)
        _, p0 = run_branch(q, plus, "0")
        _, p1 = run_branch(q, plus, "1")
        a = alpha.radians
        assert abs(p0 - (1 + math.cos(a)) / 2) < 1e-12 and abs(p1 - (1 - math.cos(a)) / 2) < 1e-12, alpha


@criterion(5, "termination measure decreases on every applicable step", 30.0)
def test_05_termination_measure():
    one = Signal(constant=1)
    eex = Pattern.build(["1", "2", "3", "4"], ["1", "2", "3", "4"], [X("1", one), E("1", "2"), E("3", "4")])
    exze, _ = step(eex, 0)
    assert (measure_of(eex).dE, measure_of(eex).dC) == ((2, 3), 2)
    assert (measure_of(exze).dE, measure_of(exze).dC) == ((1, 4), 3)
    rng = random.Random(5)
    checked = 0
    for _ in range(1000):
        p = random_pattern(rng, 10, 30)
        p = p.with_seq([c for c in p.seq if c.kind == "N"] + [c for c in p.seq if c.kind != "N"])
        while True:
            spots = applicable(p)
            if not spots:
                break
            m = measure_of(p)
            for k in spots:
                q, _ = step(p, k)
                assert measure_of(q) < m, f"no decrease at {k}"
                checked += 1
            p, _ = step(p, rng.choice(spots))
    return f"{checked} steps checked"


@criterion(6, "confluence: 50 random rule orders reach one canonical form", 60.0)
def test_06_confluence():
    rng = random.Random(6)
    for n in range(200):
        p = random_pattern(rng, 6, 20)
        forms = {equiv_canonical(random_standardize(p, rng)) for _ in range(50)}
        assert len(forms) == 1, f"pattern {n} has {len(forms)} normal forms"
        assert forms == {equiv_canonical(standardize(p))}
    return "200 patterns x 50 orders"


@criterion(7, "semantics preservation under standardize and shift_signals", 60.0)
def test_07_semantics_preservation():
    rng = random.Random(7)
    strict = 0
    for _ in range(200):
        p = random_pattern(rng, 4, 16)
        s = standardize(p)
        # branch maps agree up to a per-branch global phase, i.e. as maps on density matrices
        assert semantic_equal(p, s, "per_branch_phase")
        strict += semantic_equal(p, s, "per_branch")
        assert semantic_equal(p, shift_signals(s), "choi")
    return f"200 patterns; {strict} also entrywise equal"


@criterion(8, "Kraus completeness", 30.0)
def test_08_kraus_completeness():
    rng = random.Random(8)
    pats = [random_pattern(rng, 6, 24) for _ in range(200)]
    pats += [zoo.make(f, *ps).pattern for f, ps in [("J", (A,)), ("CZ", ()), ("H", ()), ("Rx", (A,)), ("Rz", (A,)),
                                                   ("P", (A,)), ("Rz5", (A,)), ("Rot", (A, B, C)), ("CNOT", ()),
                                                   ("Teleport", ()), ("GHZ", (5,)), ("CU", CU_ANGLES)]]
    worst = max(branch_maps(p).kraus_defect() for p in pats)
    assert worst <= TOL, f"defect {worst:.2e}"
    return f"{len(pats)} patterns, worst defect {worst:.1e}"


def _kraus_choi(kraus: dict[str, np.ndarray], like: BranchMapSet) -> np.ndarray:
    return choi(BranchMapSet(tuple(f"q{k}" for k in range(len(next(iter(kraus))))), like.inputs, like.outputs, kraus))


@criterion(9, "compositionality of sequential and parallel composition", 30.0)
def test_09_compositionality():
    rng = random.Random(9)
    for _ in range(50):
        p1, p2 = random_composable_pair(rng, 3)
        b1, b2 = branch_maps(p1), branch_maps(p2)
        seq = branch_maps(compose(p2, p1))
        prod = {s1 + s2: B @ A for s1, A in b1.maps.items() for s2, B in b2.maps.items()}
        assert np.max(np.abs(choi(seq) - _kraus_choi(prod, seq))) <= TOL, "sequential"
        q2 = rename(p2, {q: f"t{q}" for q in p2.space})
        par = branch_maps(tensor(p1, q2))
        b2r = branch_maps(q2)
        kron = {s1 + s2: np.kron(A, B) for s1, A in b1.maps.items() for s2, B in b2r.maps.items()}
        assert np.max(np.abs(choi(par) - _kraus_choi(kron, par))) <= TOL, "tensor"
    return "50 pairs"


@criterion(10, "depth: GHZ(n) total depth 2; shifted controlled-U in 7 measurement rounds", 10.0)
def test_10_depth():
    for n in (3, 5, 8):
        g = dependency_graph(shift_signals(standardize(zoo.GHZ(n))))
        assert g.depth == 2, f"GHZ({n}) depth {g.depth}"
    g = dependency_graph(shift_signals(standardize(zoo.CU(*CU_ANGLES), absorb="x")))
    assert g.measurement_rounds == 7, (
        f"shifted controlled-U has {g.measurement_rounds} measurement rounds "
        f"(total depth {g.depth} with the correction round)")


@criterion(11, "Clifford membership of Pauli-angle patterns", 10.0)
def test_11_clifford():
    half = Angle.pi(1, 2)
    for family, ps in [("H", ()), ("CNOT", ()), ("P", (half,)), ("Teleport", ())]:
        U = extract_unitary(zoo.make(family, *ps).pattern)
        assert clifford_member(U, int(math.log2(U.shape[0]))), family
    assert not clifford_member(extract_unitary(zoo.J(Angle.pi(1, 4))), 1), "J(pi/4)"
    z, pi = Angle.zero(), Angle.pi(1)
    candidates = [("J", (z,)), ("J", (half,)), ("J", (pi,)), ("J", (Angle.pi(1, 4),)), ("CZ", ()), ("H", ()),
                  ("Rx", (half,)), ("Rx", (A,)), ("Rz", (half,)), ("Rz", (-half,)), ("P", (half,)), ("Rz5", (half,)),
                  ("Rot", (half, z, half)), ("Rot", (pi, half, z)), ("Rot", (A, B, C)), ("CNOT", ()),
                  ("Teleport", ()), ("Teleport", (half, pi)), ("CU", (z, z, z, z)), ("CU", (half, pi, z, pi)),
                  ("CU", CU_ANGLES)]
    checked = 0
    for family, ps in candidates:
        p = zoo.make(family, *ps).pattern
        if not is_xy_only(p):
            continue
        U = extract_unitary(p)
        assert clifford_member(U, int(math.log2(U.shape[0]))), f"{family}{ps}"
        checked += 1
    return f"{checked} x/y-only zoo instances pass"


@criterion(12, "embedding theorem: round trip and semantics", 60.0)
def test_12_embedding():
    rng = random.Random(12)
    for _ in range(100):
        p = random_pattern(rng, 4, 12)
        f = embed_forward(p)
        assert model_check(f, "tele") == []
        assert remove_dummies(embed_backward(f)) == p, "round trip"
        assert semantic_equal(p, f, "choi"), "forward semantics"
    src = Pattern.build(["1"], ["3"], parse_commands(f"X(3;s2) Z(3;s1) M(2;0;s=s1) M(1;{fa(-A)}) E(1,2) E(2,3)"))
    emb = standardize(embed_forward(src), absorb="none")
    want = Pattern(emb.space, emb.inputs, emb.outputs, tuple(parse_commands(
        f"X(3;s2) Z(3;s1) M2(2,2_d;0,0;s=s1;t=0;u=0;v=0) M2(1,1_d;{fa(-A)},0) "
        "E(1,1_d) E(2,2_d) E(1,2) E(2,3)")))
    assert canonical_text(emb) == canonical_text(want), "Rz embedding golden"
    return "100 patterns"


@criterion(13, "Pauli model J(pi/4)", 5.0)
def test_13_pauli_model():
    p = pauli_j_quarter()
    assert model_check(p, "pauli") == [], "model check"
    assert classify(p) is Determinism.STRONGLY_DETERMINISTIC, "determinism"
    assert np.allclose(extract_unitary(p), zoo.j_matrix(Angle.pi(1, 4)), atol=TOL), "unitary"


ALL = [v for k, v in sorted(globals().items()) if k.startswith("test_") and hasattr(v, "criterion")]


def summary_lines() -> list[str]:
    return [RESULTS[k] for k in sorted(RESULTS)]


if __name__ == "__main__":
    failed = 0
    for fn in ALL:
        try:
            fn()
        except AssertionError:
            failed += 1
        except Exception:
            traceback.print_exc()
            failed += 1
        print(RESULTS.get(fn.criterion, f"FAIL [{fn.criterion:2d}] {fn.__name__}: error"), flush=True)
    sys.exit(1 if failed else 0)
