"""Regenerate the checked-in .mc files under patterns/."""

from __future__ import annotations

import argparse
from pathlib import Path

from mcalc import models, zoo
from mcalc.core import Angle
from mcalc.textio import PatternDocument, parse_pattern, print_document

A = Angle.pi(1, 3)
B = Angle.pi(1, 5)


def documents() -> list[tuple[str, PatternDocument]]:
    rz_embed_src = parse_pattern(
        "pattern RzEmbedSource { qubits: 1 2 3 inputs: 1 outputs: 3 "
        "seq: X(3;s2) Z(3;s1) M(2;0;s=s1) M(1;-pi/3) E(1,2) E(2,3) }")
    tele_1q = parse_pattern(
        "pattern TeleportOneQubit { qubits: 1 2 3 inputs: 1 outputs: 3 "
        "seq: X(3;s2) Z(3;s1) M(2;0) M(1;0) E(1,2) E(2,3) }")
    entries = [
        ("h", "H", zoo.H(), "oneway", "Hadamard as J(0) from 1 to 2"),
        ("cz", "CZ", zoo.CZ(), "oneway", "controlled-Z, a single entanglement"),
        ("j_quarter", "JQuarter", zoo.J(Angle.pi(1, 4)), "oneway", "J(pi/4) in the one-way model"),
        ("teleport2", "Teleport2", zoo.Teleport(A, B), "oneway", "J(pi/5)(2,3) after J(pi/3)(1,2), wild form"),
        ("teleport_id", "TeleportId", zoo.Teleport(), "oneway", "J(0)(2,3) after J(0)(1,2): teleports qubit 1 to 3"),
        ("rx_3q", "Rx3", zoo.Rx(A), "oneway", "x-rotation by pi/3, standard 3-qubit form"),
        ("rz_3q", "Rz3", zoo.Rz(A), "oneway", "z-rotation by pi/3, standard 3-qubit form"),
        ("rz_5q", "Rz5", zoo.Rz5(A), "oneway", "z-rotation by pi/3 as H Rx H, wild 5-qubit form"),
        ("p_half", "PHalf", zoo.make("P", Angle.pi(1, 2)).pattern, "oneway", "phase gate P(pi/2) as a z-rotation"),
        ("rot", "Rot", zoo.Rot(Angle.pi(1, 3), Angle.pi(1, 5), Angle.pi(1, 7)), "oneway",
         "general rotation J(0) J(-a) J(-b) J(-c), wild form"),
        ("cnot", "CNOT", zoo.CNOT(), "oneway", "CNOT with control 1 and target 2 -> 4"),
        ("ghz3", "GHZ3", zoo.GHZ(3), "oneway", "3-qubit GHZ preparation"),
        ("ghz8", "GHZ8", zoo.GHZ(8), "oneway", "8-qubit GHZ preparation"),
        ("cu", "CU", zoo.CU(Angle.pi(1, 5), Angle.pi(1, 3), Angle.pi(1, 7), Angle.pi(2, 9)), "oneway",
         "controlled-U from the J decomposition, wild 14-qubit form"),
        ("pauli_j_quarter", "PauliJQuarter", models.pauli_j_quarter(), "pauli", "J(pi/4) in the Pauli model"),
        ("rz_embed_src", "RzEmbedSource", rz_embed_src, "oneway", "z-rotation before the forward embedding"),
        ("teleport_tele", "TeleportTele", models.fuse_pairs(tele_1q, [("1", "2")]), "tele",
         "teleportation with one graph-basis measurement"),
    ]
    return [(f, PatternDocument(name, p, (note,), model)) for f, name, p, model, note in entries]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "patterns"))
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for fname, doc in documents():
        (out / f"{fname}.mc").write_text(print_document(doc) + "\n")
        print(out / f"{fname}.mc")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
