"""The ``.mc`` text format and deterministic JSON export.

Command sequences are written right to left (the rightmost command runs
first) and stored in execution order after parsing::

    pattern H { qubits: 1 2 inputs: 1 outputs: 2 seq: X(2;s1) M(1;0) E(1,2) }

Besides the base grammar, measurements accept ``;o=ANGLE@TRIGGER[^SIGN]``
offsets for phase-model angles of the form ``(-1)^SIGN * ANGLE * TRIGGER``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .core import (
    E, M, M2, N, P, S, X, Z, Angle, Command, DependentAngle, Pattern, PatternError,
    Signal, Term, ZERO, sorted_qubits,
)

MODEL_TAGS = ("oneway", "phase", "pauli", "tele")


class ParseError(PatternError):
    def __init__(self, message: str, line: int, column: int, expected: tuple[str, ...] = ()):
        self.line, self.column, self.expected = line, column, expected
        hint = f" (expected {' or '.join(expected)})" if expected else ""
        super().__init__(f"line {line}, column {column}: {message}{hint}")


@dataclass(frozen=True)
class PatternDocument:
    name: str
    pattern: Pattern
    comments: tuple[str, ...] = ()
    model: str = "oneway"

    def __post_init__(self):
        object.__setattr__(self, "comments", tuple(self.comments))
        if self.model not in MODEL_TAGS:
            raise PatternError(f"unknown model tag {self.model!r}")


# --------------------------------------------------------------------------- parsing

_IDENT = re.compile(r"[A-Za-z0-9_']+")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")
_DECIMAL = re.compile(r"\d+(\.\d*)?([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?")
_INT = re.compile(r"\d+")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.declared: set[str] = set()

    # -- low level
    def where(self, pos: int | None = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, message: str, *expected: str, pos: int | None = None) -> ParseError:
        line, col = self.where(pos)
        return ParseError(message, line, col, expected)

    def skip_ws(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "#":
                nl = self.text.find("\n", self.pos)
                self.pos = len(self.text) if nl < 0 else nl
            else:
                break

    def peek(self, s: str) -> bool:
        self.skip_ws()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str) -> None:
        if not self.peek(s):
            found = self.text[self.pos:self.pos + 12].split()[0] if self.pos < len(self.text.rstrip()) else "end of input"
            raise self.fail(f"unexpected {found!r}", repr(s))
        self.pos += len(s)

    def match(self, rx: re.Pattern, what: str) -> str:
        self.skip_ws()
        m = rx.match(self.text, self.pos)
        if not m:
            raise self.fail("syntax error", what)
        self.pos = m.end()
        return m.group(0)

    def word_is_keyword(self) -> bool:
        self.skip_ws()
        m = re.compile(r"[A-Za-z]+:").match(self.text, self.pos)
        return m is not None or self.peek("}")

    # -- grammar
    def qubit(self, check: bool = True) -> str:
        start = self.pos
        q = self.match(_IDENT, "qubit identifier")
        if check and q not in self.declared:
            raise self.fail(f"unknown qubit {q!r}", pos=start)
        return q

    def angle(self) -> Angle:
        self.skip_ws()
        start = self.pos
        neg = self.text.startswith("-", self.pos)
        if neg:
            self.pos += 1
        if self.text.startswith("pi", self.pos) or re.match(r"\d+\*pi", self.text[self.pos:]):
            k = 1
            if not self.text.startswith("pi", self.pos):
                k = int(self.match(_INT, "integer"))
                self.expect("*")
            self.expect("pi")
            d = 1
            if self.text.startswith("/", self.pos):
                self.pos += 1
                d = int(self.match(_INT, "integer"))
                if d == 0:
                    raise self.fail("zero denominator", pos=start)
            return Angle.pi(-k if neg else k, d)
        m = _DECIMAL.match(self.text, self.pos)
        if not m:
            raise self.fail("bad angle", "k*pi/d", "decimal", "0", pos=start)
        self.pos = m.end()
        lit = m.group(0)
        if lit == "0":
            return Angle.zero()
        return Angle.rad(-float(lit) if neg else float(lit))

    def signal(self) -> Signal:
        deps: set[str] = set()
        const = 0
        while True:
            self.skip_ws()
            if self.text.startswith("s", self.pos):
                self.pos += 1
                deps ^= {self.qubit()}
            elif self.text.startswith("0", self.pos) or self.text.startswith("1", self.pos):
                const ^= int(self.text[self.pos])
                self.pos += 1
            else:
                raise self.fail("bad signal term", "s<qubit>", "0", "1")
            if not self.peek("+"):
                return Signal(frozenset(deps), const)
            self.pos += 1

    def keyed_signal(self, key: str) -> Signal:
        self.expect(";")
        self.expect(key + "=")
        return self.signal()

    def command(self) -> Command:
        self.skip_ws()
        start = self.pos
        m = re.compile(r"(M2|N|E|M|X|Z|S|P)\(").match(self.text, self.pos)
        if not m:
            raise self.fail("unknown command", "N(", "E(", "M(", "X(", "Z(", "S(", "P(", "M2(")
        self.pos = m.end()
        kind = m.group(1)
        try:
            if kind == "N":
                q = self.qubit()
                a = Angle.zero()
                if self.peek(";"):
                    self.pos += 1
                    a = self.angle()
                cmd: Command = N(q, a)
            elif kind == "E":
                i = self.qubit()
                self.expect(",")
                cmd = E(i, self.qubit())
            elif kind == "M":
                q = self.qubit()
                self.expect(";")
                base = self.angle()
                s = t = ZERO
                extra: list[Term] = []
                while self.peek(";"):
                    self.pos += 1
                    self.skip_ws()
                    key = self.text[self.pos:self.pos + 2]
                    if key == "s=":
                        self.pos += 2
                        s = s + self.signal()
                    elif key == "t=":
                        self.pos += 2
                        t = t + self.signal()
                    elif key == "o=":
                        self.pos += 2
                        coef = self.angle()
                        self.expect("@")
                        trig = self.signal()
                        sign = ZERO
                        if self.peek("^"):
                            self.pos += 1
                            sign = self.signal()
                        extra.append(Term(coef, trig, sign))
                    else:
                        raise self.fail("bad measurement field", "s=", "t=", "o=")
                angle = DependentAngle(base, s, (Term(Angle.pi(1), t),) + tuple(extra))
                cmd = M(q, angle)
            elif kind in ("X", "Z", "S"):
                q = self.qubit()
                self.expect(";")
                cmd = {"X": X, "Z": Z, "S": S}[kind](q, self.signal())
            elif kind == "P":
                q = self.qubit()
                self.expect(";")
                beta = self.angle()
                self.expect(";")
                cmd = P(q, beta, self.signal())
            else:
                i = self.qubit()
                self.expect(",")
                j = self.qubit()
                self.expect(";")
                a = self.angle()
                self.expect(",")
                b = self.angle()
                s = t = u = v = ZERO
                if self.peek(";"):
                    s = self.keyed_signal("s")
                    t = self.keyed_signal("t")
                    u = self.keyed_signal("u")
                    v = self.keyed_signal("v")
                cmd = M2(i, j, DependentAngle.of(a, s, u), DependentAngle.of(b, t, v))
            self.expect(")")
        except ParseError:
            raise
        except PatternError as exc:
            raise self.fail(str(exc), pos=start) from exc
        return cmd

    def qubit_list(self, declare: bool) -> list[str]:
        out: list[str] = []
        while not self.word_is_keyword():
            start = self.pos
            q = self.qubit(check=not declare)
            if declare:
                if q in self.declared:
                    raise self.fail(f"duplicate qubit declaration {q!r}", pos=start)
                self.declared.add(q)
            out.append(q)
        return out

    def document(self) -> PatternDocument:
        comments = []
        for line in self.text.splitlines():
            stripped = line.strip()
            if stripped.startswith("#"):
                comments.append(stripped[1:].strip())
        self.expect("pattern")
        name = self.match(_NAME, "pattern name")
        self.expect("{")
        model = "oneway"
        if self.peek("model:"):
            self.pos += len("model:")
            start = self.pos
            model = self.match(_IDENT, "model tag")
            if model not in MODEL_TAGS:
                raise self.fail(f"unknown model tag {model!r}", *MODEL_TAGS, pos=start)
        self.expect("qubits:")
        qubits = self.qubit_list(declare=True)
        if not qubits:
            raise self.fail("empty qubit list", "qubit identifier")
        self.expect("inputs:")
        inputs = self.qubit_list(declare=False)
        self.expect("outputs:")
        outputs = self.qubit_list(declare=False)
        self.expect("seq:")
        cmds: list[Command] = []
        while not self.peek("}"):
            if self.pos >= len(self.text):
                raise self.fail("unexpected end of input", "command", "'}'")
            cmds.append(self.command())
        self.expect("}")
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.fail("trailing input after pattern", "end of input")
        try:
            pattern = Pattern(frozenset(qubits), tuple(inputs), tuple(outputs), tuple(reversed(cmds)))
        except PatternError as exc:
            raise self.fail(str(exc), pos=0) from exc
        return PatternDocument(name, pattern, tuple(comments), model)


def parse(text: str) -> PatternDocument:
    """Parse a ``.mc`` document; raises :class:`ParseError` with a position."""
    return _Parser(text).document()


def parse_pattern(text: str) -> Pattern:
    return parse(text).pattern


def parse_angle(text: str) -> Angle:
    """Parse a single angle literal such as ``pi/4``, ``-3*pi/2`` or ``0.25``."""
    p = _Parser(text)
    a = p.angle()
    p.skip_ws()
    if p.pos != len(text):
        raise p.fail("trailing input after angle", "end of input")
    return a


def parse_commands(text: str, qubits: set[str] | None = None) -> list[Command]:
    """Parse a bare command list written right to left; returns execution order."""
    p = _Parser(text)
    if qubits is None:
        qubits = set(re.findall(r"[A-Za-z0-9_']+", text))
    p.declared = set(qubits)
    cmds = []
    while True:
        p.skip_ws()
        if p.pos >= len(text):
            break
        cmds.append(p.command())
    return list(reversed(cmds))


# --------------------------------------------------------------------------- printing


def format_angle(a: Angle) -> str:
    if a.exact:
        t = a.turns
        if t == 0:
            return "0"
        sign = "-" if t < 0 else ""
        n, d = abs(t.numerator), t.denominator
        core = "pi" if n == 1 else f"{n}*pi"
        return sign + core + (f"/{d}" if d != 1 else "")
    out = repr(a.radians)
    if out in ("0.0", "-0.0"):
        out = "0.0"
    return out


def format_signal(s: Signal) -> str:
    parts = [f"s{q}" for q in sorted_qubits(s.deps)]
    if s.constant or not parts:
        parts.append(str(s.constant))
    return "+".join(parts)


def _format_measurement_angle(a: DependentAngle) -> str:
    out = format_angle(a.base)
    if not a.sign.is_zero:
        out += ";s=" + format_signal(a.sign)
    t = a.t_signal
    if not t.is_zero:
        out += ";t=" + format_signal(t)
    for term in a.extra_terms:
        out += f";o={format_angle(term.coefficient)}@{format_signal(term.trigger)}"
        if not term.sign.is_zero:
            out += "^" + format_signal(term.sign)
    return out


def format_command(c: Command) -> str:
    if isinstance(c, N):
        return f"N({c.qubit})" if c.angle.is_zero() else f"N({c.qubit};{format_angle(c.angle)})"
    if isinstance(c, E):
        return f"E({c.i},{c.j})"
    if isinstance(c, M):
        return f"M({c.qubit};{_format_measurement_angle(c.angle)})"
    if isinstance(c, (X, Z, S)):
        return f"{c.kind}({c.qubit};{format_signal(c.signal)})"
    if isinstance(c, P):
        return f"P({c.qubit};{format_angle(c.beta)};{format_signal(c.signal)})"
    if isinstance(c, M2):
        if c.alpha.extra_terms or c.beta.extra_terms:
            raise PatternError("M2 angles with phase offsets have no text form")
        out = f"M2({c.i},{c.j};{format_angle(c.alpha.base)},{format_angle(c.beta.base)}"
        sigs = (c.alpha.sign, c.beta.sign, c.alpha.t_signal, c.beta.t_signal)
        if any(not s.is_zero for s in sigs):
            out += "".join(f";{k}={format_signal(s)}" for k, s in zip("stuv", sigs))
        return out + ")"
    raise PatternError(f"cannot print command {c!r}")


def format_seq(seq) -> str:
    """Commands in right-to-left notation."""
    return " ".join(format_command(c) for c in reversed(tuple(seq)))


def format_pattern(p: Pattern, name: str = "P", model: str = "oneway") -> str:
    head = f"pattern {name} {{ "
    if model != "oneway":
        head += f"model: {model} "
    parts = [
        "qubits: " + " ".join(sorted_qubits(p.space)),
        "inputs:" + "".join(" " + q for q in p.inputs),
        "outputs:" + "".join(" " + q for q in p.outputs),
        "seq:" + "".join(" " + format_command(c) for c in reversed(p.seq)),
    ]
    return head + " ".join(parts) + " }"


def print_document(doc: PatternDocument) -> str:
    """Canonical rendering; comments come first as ``#`` lines."""
    lines = [f"# {c}" if c else "#" for c in doc.comments]
    lines.append(format_pattern(doc.pattern, doc.name, doc.model))
    return "\n".join(lines)


# --------------------------------------------------------------------------- JSON


def _fmt_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise PatternError("non-finite number in JSON export")
    if x == 0.0:
        return "0.0"
    s = f"{x:.17g}"
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _dump(obj: Any) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_fmt_float(obj.real)},{_fmt_float(obj.imag)}]"
    if isinstance(obj, str):
        import json
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: kv[0])
        return "{" + ",".join(f"{_dump(str(k))}:{_dump(v)}" for k, v in items) + "}"
    if isinstance(obj, np.ndarray):
        return _dump(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_dump(v) for v in obj) + "]"
    raise PatternError(f"cannot export {type(obj).__name__} to JSON")


def complex_matrix(m: np.ndarray) -> list:
    """Row-major nested lists of complex numbers (rendered as [re, im])."""
    return [[complex(v) for v in row] for row in np.asarray(m, dtype=complex)]


def to_json_obj(value: Any) -> Any:
    from .analysis import DependencyGraph, Schedule
    from .sim import BranchMapSet, DensityOperator

    if isinstance(value, BranchMapSet):
        return {
            "measured_order": list(value.measured_order),
            "inputs": list(value.inputs),
            "outputs": list(value.outputs),
            "maps": {k: complex_matrix(v) for k, v in value.maps.items()},
        }
    if isinstance(value, DependencyGraph):
        return value.to_obj()
    if isinstance(value, Schedule):
        return value.to_obj()
    if isinstance(value, DensityOperator):
        return {"dim": value.dim, "matrix": complex_matrix(value.matrix)}
    if isinstance(value, np.ndarray):
        return complex_matrix(value) if value.ndim == 2 else [complex(v) for v in value]
    if isinstance(value, dict):
        return {k: to_json_obj(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json_obj(v) for v in value]
    return value


def export_json(value: Any) -> str:
    """Deterministic JSON: sorted keys, complex numbers as [re, im], 17 significant digits."""
    return _dump(to_json_obj(value))
