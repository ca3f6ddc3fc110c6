"""Command-line front end: ``mcalc SUBCOMMAND ...``.

Exit codes: 0 success, 1 validation failure or inequivalence, 2 usage error,
3 resource guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import analysis, models, rewrite, sim, zoo
from .core import Pattern, PatternError, validate
from .textio import ParseError, PatternDocument, export_json, format_pattern, format_seq, parse, parse_angle

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _load(path: str) -> PatternDocument:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse(text)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _render(doc: PatternDocument, p: Pattern, model: Optional[str] = None) -> str:
    lines = [f"# {c}" if c else "#" for c in doc.comments]
    lines.append(format_pattern(p, doc.name, model or doc.model))
    return "\n".join(lines)


def _input_state(spec: str, n: int) -> np.ndarray:
    if spec == "plus":
        return sim.plus_state(n)
    if spec.startswith("basis:"):
        bits = spec[len("basis:"):]
        if len(bits) != n or set(bits) - {"0", "1"}:
            raise UsageError(f"basis input needs {n} bits, got {bits!r}")
        return sim.basis_state(bits)
    try:
        data = json.loads(Path(spec).read_text())
    except OSError:
        raise UsageError(f"input must be 'plus', 'basis:BITS' or a JSON file; cannot read {spec}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad JSON in {spec}: {exc.msg}") from None
    vec = np.array([complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in data])
    if vec.shape != (2 ** n,):
        raise UsageError(f"input vector must have {2 ** n} amplitudes")
    return vec


def _fmt_vec(v: np.ndarray) -> str:
    def one(z: complex) -> str:
        z = complex(np.round(z.real, 12), np.round(z.imag, 12))
        return f"{z.real:+.12f}{z.imag:+.12f}j"
    return "[" + ", ".join(one(complex(z)) for z in v) + "]"


# --------------------------------------------------------------------------- subcommands


def cmd_check(args) -> int:
    doc = _load(args.file)
    tag = args.model or doc.model
    bad = [str(v) for v in validate(doc.pattern)] + [str(v) for v in models.model_check(doc.pattern, tag)]
    if bad:
        for line in bad:
            print(line, file=sys.stderr)
        return EXIT_FAIL
    print(f"ok: {doc.name} is a valid {models.ModelTag.coerce(tag).value} pattern")
    return EXIT_OK


def cmd_std(args) -> int:
    doc = _load(args.file)
    def trace(rule, before, after) -> None:
        print(f"RULE {rule.tag} @ {rule.applies_at} : {format_seq(before)} \u21d2 {format_seq(after)}")

    tr = trace if args.trace else None
    if doc.model == "tele":
        p = models.teleport_standardize(doc.pattern, trace=tr)
    else:
        p = rewrite.standardize(doc.pattern, absorb=args.absorb, trace=tr)
    if args.shift:
        p = rewrite.shift_signals(p, trace=tr)
    if not args.raw:
        p = rewrite.equiv_canonical(p)
    _emit(_render(doc, p), args.output)
    return EXIT_OK


def cmd_run(args) -> int:
    doc = _load(args.file)
    p = doc.pattern
    state = _input_state(args.input, len(p.inputs))
    if args.branch is not None:
        out, prob = sim.run_branch(p, state, args.branch)
        print(f"branch {args.branch or '-'}: p={prob:.12f} state={_fmt_vec(out.amplitudes)}")
        return EXIT_OK
    for bits, (out, prob) in sim.run_all(p, state).items():
        print(f"branch {bits or '-'}: p={prob:.12f} state={_fmt_vec(out.amplitudes)}")
    return EXIT_OK


def cmd_semantics(args) -> int:
    doc = _load(args.file)
    p = doc.pattern
    bms = sim.branch_maps(p)
    kind = sim.classify(bms)
    print(f"pattern: {doc.name}")
    print(f"branches: {len(bms.maps)}")
    print(f"kraus defect: {bms.kraus_defect():.3e}")
    print(f"determinism: {kind.value}")
    unitary = None
    if kind is sim.Determinism.STRONGLY_DETERMINISTIC:
        unitary = sim.extract_unitary(bms)
        print("unitary:")
        for row in unitary:
            print("  " + _fmt_vec(row))
    if args.json:
        obj = {"pattern": doc.name, "branch_maps": bms, "determinism": kind.value, "unitary": unitary}
        Path(args.json).write_text(export_json(obj) + "\n")
    return EXIT_OK


def cmd_equiv(args) -> int:
    a, b = _load(args.a), _load(args.b)
    same = sim.semantic_equal(a.pattern, b.pattern, mode=args.mode)
    print(f"{'equivalent' if same else 'not equivalent'} ({args.mode})")
    return EXIT_OK if same else EXIT_FAIL


def cmd_depth(args) -> int:
    doc = _load(args.file)
    g = analysis.dependency_graph(doc.pattern)
    print(f"measurement rounds: {g.measurement_rounds}, total depth: {g.depth}")
    for k, layer in enumerate(analysis.schedule(doc.pattern).rounds, 1):
        print(f"round {k}: " + " ".join(f"M_{q}" for q in layer))
    if g.correction_deps is not None:
        print(f"round {g.measurement_rounds + 1}: corrections")
    for j, i in g.edges:
        print(f"edge: {j} -> {i}")
    if args.dot:
        Path(args.dot).write_text(g.to_dot() + "\n")
    if args.json:
        Path(args.json).write_text(export_json(g) + "\n")
    return EXIT_OK


def cmd_embed(args) -> int:
    doc = _load(args.file)
    if args.to == "tele":
        p = models.embed_forward(doc.pattern)
    else:
        p = models.embed_backward(doc.pattern)
        if args.strip_dummies:
            p = models.remove_dummies(p)
    _emit(_render(doc, p, "tele" if args.to == "tele" else "oneway"), args.output)
    return EXIT_OK


def cmd_zoo(args) -> int:
    params = []
    for x in args.params:
        if args.family == "GHZ":
            try:
                params.append(int(x))
            except ValueError:
                raise UsageError(f"GHZ needs an integer size, got {x!r}") from None
        else:
            params.append(parse_angle(x))
    entry = zoo.make(args.family, *params)
    label = args.family + "".join(f"_{x}" for x in args.params)
    name = "".join(ch if ch.isalnum() or ch == "_" else "_" for ch in label)
    _emit(format_pattern(entry.pattern, name), args.output)
    return EXIT_OK


# --------------------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mcalc", description="Measurement-calculus workbench.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="validate a pattern and check its model")
    p.add_argument("file")
    p.add_argument("--model", choices=[t.value for t in models.ModelTag])
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("std", help="standardize (and optionally signal-shift) a pattern")
    p.add_argument("file")
    p.add_argument("--shift", action="store_true", help="apply signal shifting afterwards")
    p.add_argument("--trace", action="store_true", help="print one RULE line per applied rewrite")
    p.add_argument("--absorb", choices=rewrite.ABSORB_MODES, default="xy",
                   help="special-angle absorption after MX/MZ (default xy)")
    p.add_argument("--raw", action="store_true", help="skip the canonical ordering")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_std)

    p = sub.add_parser("run", help="simulate one branch or all branches")
    p.add_argument("file")
    p.add_argument("--input", required=True, help="'plus', 'basis:BITS' or a JSON amplitude file")
    p.add_argument("--branch", help="outcome bits in measurement order")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("semantics", help="branch maps, classification and unitary")
    p.add_argument("file")
    p.add_argument("--json")
    p.set_defaults(func=cmd_semantics)

    p = sub.add_parser("equiv", help="semantic equality of two patterns")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--mode", default="per-branch", choices=["per-branch", "per-branch-phase", "choi"])
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("depth", help="measurement rounds and dependency graph of a standard pattern")
    p.add_argument("file")
    p.add_argument("--dot")
    p.add_argument("--json")
    p.set_defaults(func=cmd_depth)

    p = sub.add_parser("embed", help="translate between the one-way and teleportation models")
    p.add_argument("file")
    p.add_argument("--to", required=True, choices=["tele", "oneway"])
    p.add_argument("--strip-dummies", action="store_true", help="with --to oneway, eliminate dummy qubits")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("zoo", help="emit a pattern from the zoo")
    p.add_argument("family", choices=zoo.FAMILIES)
    p.add_argument("params", nargs="*", help="angles such as pi/4, or the GHZ size")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_zoo)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except sim.ResourceError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except PatternError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
