"""Patterns, commands and signals of the measurement calculus.

Command sequences are stored in *execution* order: ``seq[0]`` runs first.
The printed operator notation reads right to left, so printers reverse it.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

QubitId = str

ANGLE_TOL = 1e-9
_TWO_PI = 2.0 * math.pi
_ID_RE = re.compile(r"^[A-Za-z0-9_']+$")


class PatternError(ValueError):
    """Malformed pattern or a violated operation precondition."""


class InterfaceError(PatternError):
    """Patterns cannot be composed or tensored as requested."""


def qubit_key(q: QubitId) -> tuple:
    """Natural sort key: ``"2" < "10"``, ``"1" < "1_d" < "2"``."""
    parts = re.findall(r"\d+|\D+", q)
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts)


def sorted_qubits(qs: Iterable[QubitId]) -> list[QubitId]:
    return sorted(qs, key=qubit_key)


def check_qubit_id(q: str) -> QubitId:
    if not isinstance(q, str) or not _ID_RE.match(q):
        raise PatternError(f"invalid qubit identifier {q!r}")
    return q


def _wrap(x: float) -> float:
    """Reduce radians into (-pi, pi]."""
    y = math.fmod(x, _TWO_PI)
    if y <= -math.pi:
        y += _TWO_PI
    elif y > math.pi:
        y -= _TWO_PI
    return y


def _reduce_turns(f: Fraction) -> Fraction:
    """Reduce a multiple of pi into (-1, 1]."""
    f = f % 2
    if f > 1:
        f -= 2
    return f


class Angle:
    """An angle modulo 2*pi, either an exact rational multiple of pi or a float.

    Exact angles stay exact under negation, addition and rational scaling;
    mixing with a float angle yields a float angle.
    """

    __slots__ = ("_turns", "_value")

    def __init__(self, turns: Fraction | None = None, radians: float | None = None):
        if turns is not None:
            t = _reduce_turns(Fraction(turns))
            self._turns: Fraction | None = t
            self._value = float(t) * math.pi
        elif radians is not None:
            if not math.isfinite(radians):
                raise PatternError(f"angle must be finite, got {radians!r}")
            self._turns = None
            self._value = _wrap(float(radians))
        else:
            raise PatternError("Angle needs turns or radians")

    @classmethod
    def pi(cls, num: int | Fraction = 1, den: int = 1) -> Angle:
        return cls(turns=Fraction(num) / den)

    @classmethod
    def rad(cls, x: float) -> Angle:
        return cls(radians=x)

    @classmethod
    def zero(cls) -> Angle:
        return cls(turns=Fraction(0))

    @classmethod
    def coerce(cls, value: AngleLike) -> Angle:
        if isinstance(value, Angle):
            return value
        if isinstance(value, Fraction):
            return cls(turns=value)
        if isinstance(value, int):
            if value == 0:
                return cls.zero()
            raise PatternError("bare integers are ambiguous as angles; use Angle.pi or a float")
        return cls(radians=float(value))

    @property
    def exact(self) -> bool:
        return self._turns is not None

    @property
    def turns(self) -> Fraction | None:
        """Exact multiple of pi in (-1, 1], or None for float angles."""
        return self._turns

    @property
    def radians(self) -> float:
        return self._value

    def is_zero(self) -> bool:
        return self == _ZERO

    def is_pi(self) -> bool:
        return self == _PI

    def is_multiple_of(self, step: Fraction) -> bool:
        """True when the angle is an exact multiple of ``step * pi``."""
        if self._turns is None:
            return False
        return (self._turns / step).denominator == 1

    def __neg__(self) -> Angle:
        if self._turns is not None:
            return Angle(turns=-self._turns)
        return Angle(radians=-self._value)

    def __add__(self, other: Angle) -> Angle:
        other = Angle.coerce(other)
        if self._turns is not None and other._turns is not None:
            return Angle(turns=self._turns + other._turns)
        return Angle(radians=self._value + other._value)

    def __sub__(self, other: Angle) -> Angle:
        return self + (-Angle.coerce(other))

    def __mul__(self, k: int | Fraction) -> Angle:
        if not isinstance(k, (int, Fraction)):
            return NotImplemented
        if self._turns is not None:
            return Angle(turns=self._turns * k)
        return Angle(radians=self._value * float(k))

    __rmul__ = __mul__

    def __truediv__(self, k: int) -> Angle:
        if self._turns is not None:
            return Angle(turns=self._turns / k)
        return Angle(radians=self._value / k)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Angle):
            return NotImplemented
        if self._turns is not None and other._turns is not None:
            return self._turns == other._turns
        return abs(_wrap(self._value - other._value)) < ANGLE_TOL

    def __hash__(self) -> int:
        # equality is tolerance based for floats, so only a constant hash is consistent
        return 0

    def sort_key(self) -> tuple:
        return (0, self._turns, 0.0) if self._turns is not None else (1, Fraction(0), self._value)

    def __repr__(self) -> str:
        if self._turns is not None:
            return f"Angle.pi({self._turns.numerator}, {self._turns.denominator})"
        return f"Angle.rad({self._value!r})"


AngleLike = Union[Angle, Fraction, float, int]

_ZERO = Angle.zero()
_PI = Angle.pi(1)


@dataclass(frozen=True)
class Signal:
    """A Z2 sum of measurement outcomes plus a constant bit."""

    deps: frozenset[QubitId] = frozenset()
    constant: int = 0

    def __post_init__(self):
        if self.constant not in (0, 1):
            object.__setattr__(self, "constant", self.constant % 2)
        if not isinstance(self.deps, frozenset):
            object.__setattr__(self, "deps", frozenset(self.deps))

    @classmethod
    def of(cls, *qubits: QubitId, constant: int = 0) -> Signal:
        """Signal ``s_q1 + ... + constant``; repeated qubits cancel."""
        deps: set[QubitId] = set()
        for q in qubits:
            deps ^= {q}
        return cls(frozenset(deps), constant)

    @property
    def is_zero(self) -> bool:
        return not self.deps and self.constant == 0

    def __add__(self, other: Signal) -> Signal:
        return Signal(self.deps ^ other.deps, self.constant ^ other.constant)

    def evaluate(self, outcomes: Mapping[QubitId, int]) -> int:
        v = self.constant
        for q in self.deps:
            v ^= outcomes[q]
        return v

    def substitute(self, i: QubitId, t: Signal) -> Signal:
        """``s[t + s_i / s_i]``: when s_i occurs, add t (s_i itself stays)."""
        if i in self.deps:
            return self + t
        return self

    def rename(self, f: Mapping[QubitId, QubitId]) -> Signal:
        return Signal(frozenset(f.get(q, q) for q in self.deps), self.constant)

    def without_constant(self) -> Signal:
        return Signal(self.deps, 0)

    def sort_key(self) -> tuple:
        return (tuple(qubit_key(q) for q in sorted_qubits(self.deps)), self.constant)

    def __repr__(self) -> str:
        parts = [f"s{q}" for q in sorted_qubits(self.deps)]
        if self.constant or not parts:
            parts.append(str(self.constant))
        return "+".join(parts)


ZERO = Signal()
ONE = Signal(constant=1)


@dataclass(frozen=True)
class Term:
    """One conditional angle offset ``(-1)^sign * coefficient * trigger``."""

    coefficient: Angle
    trigger: Signal
    sign: Signal = ZERO

    def sort_key(self) -> tuple:
        return (self.coefficient.sort_key(), self.trigger.sort_key(), self.sign.sort_key())


def _normalize_angle(base: Angle, sign: Signal, terms: Iterable[Term]) -> tuple[Angle, Signal, tuple[Term, ...]]:
    if sign.constant:
        base, sign = -base, sign.without_constant()
    pending = list(terms)
    while True:
        changed = False
        pi_trigger = ZERO
        others: dict[tuple, Term] = {}
        for term in pending:
            c, trig, sg = term.coefficient, term.trigger, term.sign
            if trig.is_zero or c.is_zero():
                continue
            if sg.constant:
                c, sg = -c, sg.without_constant()
            if c.is_pi():
                pi_trigger = pi_trigger + trig
                continue
            if trig.constant and sg == sign:
                # c*(1 + t') contributes c always and -c*t' conditionally
                base = base + c
                c, trig = -c, trig.without_constant()
                changed = True
                if trig.is_zero:
                    continue
            key = (trig, sg)
            if key in others:
                changed = True
                merged = others[key].coefficient + c
                others[key] = Term(merged, trig, sg)
            else:
                others[key] = Term(c, trig, sg)
        if pi_trigger.constant:
            base = base + _PI
            pi_trigger = pi_trigger.without_constant()
        out = [t for t in others.values() if not t.coefficient.is_zero()]
        if any(t.coefficient.is_pi() for t in out):
            changed = True
        if not pi_trigger.is_zero:
            out.append(Term(_PI, pi_trigger, ZERO))
        pending = out
        if not changed:
            break
    pending.sort(key=Term.sort_key)
    return base, sign, tuple(pending)


@dataclass(frozen=True)
class DependentAngle:
    """Measurement angle depending on earlier outcomes.

    Evaluates to ``(-1)^sign * base + sum_k (-1)^sign_k * coefficient_k * trigger_k``.
    The one-way-model form ``t[M^a]^s`` has ``sign = s`` and a single pi-term
    triggered by ``t``. Construction normalizes to a canonical representative.
    """

    base: Angle
    sign: Signal = ZERO
    offsets: tuple[Term, ...] = ()

    def __post_init__(self):
        base, sign, offsets = _normalize_angle(Angle.coerce(self.base), self.sign, self.offsets)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "sign", sign)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def of(cls, base: AngleLike, s: Signal = ZERO, t: Signal = ZERO) -> DependentAngle:
        """The one-way-model angle ``t[M^base]^s``."""
        return cls(Angle.coerce(base), s, (Term(_PI, t),))

    @property
    def t_signal(self) -> Signal:
        """The Z-action signal (trigger of the pi-term)."""
        for term in self.offsets:
            if term.coefficient.is_pi():
                return term.trigger
        return ZERO

    @property
    def extra_terms(self) -> tuple[Term, ...]:
        """Offsets other than the pi-term (phase-model residue)."""
        return tuple(t for t in self.offsets if not t.coefficient.is_pi())

    @property
    def is_independent(self) -> bool:
        return self.sign.is_zero and not self.offsets

    def signals(self) -> Iterator[Signal]:
        yield self.sign
        for term in self.offsets:
            yield term.trigger
            yield term.sign

    def deps(self) -> frozenset[QubitId]:
        out: frozenset[QubitId] = frozenset()
        for s in self.signals():
            out |= s.deps
        return out

    def evaluate(self, outcomes: Mapping[QubitId, int]) -> Angle:
        value = -self.base if self.sign.evaluate(outcomes) else self.base
        for term in self.offsets:
            if term.trigger.evaluate(outcomes):
                value = value + (-term.coefficient if term.sign.evaluate(outcomes) else term.coefficient)
        return value

    def x_action(self, r: Signal) -> DependentAngle:
        """Absorb ``X^r``: the whole angle is negated when r = 1."""
        terms = tuple(Term(t.coefficient, t.trigger, t.sign + r) for t in self.offsets)
        return DependentAngle(self.base, self.sign + r, terms)

    def z_action(self, r: Signal) -> DependentAngle:
        """Absorb ``Z^r``: add pi when r = 1."""
        return DependentAngle(self.base, self.sign, self.offsets + (Term(_PI, r),))

    def phase_action(self, beta: Angle, r: Signal) -> DependentAngle:
        """Absorb ``P(beta)^r``: subtract beta when r = 1."""
        return DependentAngle(self.base, self.sign, self.offsets + (Term(-beta, r),))

    def without_t(self) -> DependentAngle:
        return DependentAngle(self.base, self.sign, self.extra_terms)

    def absorb_pauli(self) -> DependentAngle:
        """Drop the X-action for x-like bases, fold it into the Z-action for y-like ones."""
        if self.sign.is_zero:
            return self
        if self.base.is_multiple_of(Fraction(1)):
            return DependentAngle(self.base, ZERO, self.offsets)
        if self.base.is_multiple_of(Fraction(1, 2)):
            return DependentAngle(self.base, ZERO, self.offsets + (Term(_PI, self.sign),))
        return self

    def substitute(self, i: QubitId, t: Signal) -> DependentAngle:
        terms = tuple(Term(x.coefficient, x.trigger.substitute(i, t), x.sign.substitute(i, t)) for x in self.offsets)
        return DependentAngle(self.base, self.sign.substitute(i, t), terms)

    def rename(self, f: Mapping[QubitId, QubitId]) -> DependentAngle:
        terms = tuple(Term(x.coefficient, x.trigger.rename(f), x.sign.rename(f)) for x in self.offsets)
        return DependentAngle(self.base, self.sign.rename(f), terms)


def _dep(angle: DependentAngle | AngleLike) -> DependentAngle:
    return angle if isinstance(angle, DependentAngle) else DependentAngle(Angle.coerce(angle))


# --------------------------------------------------------------------------- commands


class Command:
    """Base class of all pattern commands."""

    kind: str = "?"

    @property
    def qubits(self) -> tuple[QubitId, ...]:
        raise NotImplementedError

    def signals(self) -> Iterator[Signal]:
        return iter(())

    def deps(self) -> frozenset[QubitId]:
        out: frozenset[QubitId] = frozenset()
        for s in self.signals():
            out |= s.deps
        return out

    def rename(self, f: Mapping[QubitId, QubitId]) -> Command:
        raise NotImplementedError

    def substitute(self, i: QubitId, t: Signal) -> Command:
        """Apply ``s[t + s_i / s_i]`` to every signal the command reads."""
        return self


@dataclass(frozen=True)
class N(Command):
    """Prepare ``qubit`` in ``|+_angle>``."""

    qubit: QubitId
    angle: Angle = field(default_factory=Angle.zero)
    kind = "N"

    def __post_init__(self):
        check_qubit_id(self.qubit)
        object.__setattr__(self, "angle", Angle.coerce(self.angle))

    @property
    def qubits(self):
        return (self.qubit,)

    def rename(self, f):
        return N(f.get(self.qubit, self.qubit), self.angle)


@dataclass(frozen=True)
class E(Command):
    """Controlled-Z between ``i`` and ``j``; ``E(i, j)`` and ``E(j, i)`` differ as syntax."""

    i: QubitId
    j: QubitId
    kind = "E"

    def __post_init__(self):
        check_qubit_id(self.i)
        check_qubit_id(self.j)
        if self.i == self.j:
            raise PatternError(f"E needs two distinct qubits, got {self.i!r} twice")

    @property
    def qubits(self):
        return (self.i, self.j)

    def other(self, q: QubitId) -> QubitId:
        return self.j if q == self.i else self.i

    def rename(self, f):
        return E(f.get(self.i, self.i), f.get(self.j, self.j))


@dataclass(frozen=True)
class M(Command):
    """Destructive measurement of ``qubit`` in the ``|+-_angle>`` basis."""

    qubit: QubitId
    angle: DependentAngle = field(default_factory=lambda: DependentAngle(Angle.zero()))
    kind = "M"

    def __post_init__(self):
        check_qubit_id(self.qubit)
        object.__setattr__(self, "angle", _dep(self.angle))

    @property
    def qubits(self):
        return (self.qubit,)

    def signals(self):
        return self.angle.signals()

    def rename(self, f):
        return M(f.get(self.qubit, self.qubit), self.angle.rename(f))

    def substitute(self, i, t):
        return M(self.qubit, self.angle.substitute(i, t))


class Correction(Command):
    qubit: QubitId
    signal: Signal

    @property
    def qubits(self):
        return (self.qubit,)

    def signals(self):
        yield self.signal


@dataclass(frozen=True)
class X(Correction):
    qubit: QubitId
    signal: Signal = ONE
    kind = "X"

    def __post_init__(self):
        check_qubit_id(self.qubit)

    def rename(self, f):
        return X(f.get(self.qubit, self.qubit), self.signal.rename(f))

    def substitute(self, i, t):
        return X(self.qubit, self.signal.substitute(i, t))


@dataclass(frozen=True)
class Z(Correction):
    qubit: QubitId
    signal: Signal = ONE
    kind = "Z"

    def __post_init__(self):
        check_qubit_id(self.qubit)

    def rename(self, f):
        return Z(f.get(self.qubit, self.qubit), self.signal.rename(f))

    def substitute(self, i, t):
        return Z(self.qubit, self.signal.substitute(i, t))


@dataclass(frozen=True)
class P(Correction):
    """Phase correction ``diag(1, e^{i beta})`` applied when the signal is 1."""

    qubit: QubitId
    beta: Angle
    signal: Signal = ONE
    kind = "P"

    def __post_init__(self):
        check_qubit_id(self.qubit)
        object.__setattr__(self, "beta", Angle.coerce(self.beta))

    def rename(self, f):
        return P(f.get(self.qubit, self.qubit), self.beta, self.signal.rename(f))

    def substitute(self, i, t):
        return P(self.qubit, self.beta, self.signal.substitute(i, t))


@dataclass(frozen=True)
class S(Command):
    """Signal shift: add the signal's value to the recorded outcome of ``qubit``."""

    qubit: QubitId
    signal: Signal
    kind = "S"

    def __post_init__(self):
        check_qubit_id(self.qubit)

    @property
    def qubits(self):
        # acts on a classical outcome only
        return ()

    def signals(self):
        yield self.signal
        yield Signal.of(self.qubit)

    def rename(self, f):
        return S(f.get(self.qubit, self.qubit), self.signal.rename(f))

    def substitute(self, i, t):
        return S(self.qubit, self.signal.substitute(i, t))


@dataclass(frozen=True)
class M2(Command):
    """Two-qubit graph-basis measurement ``E_ij (M_i^alpha x M_j^beta) E_ij``."""

    i: QubitId
    j: QubitId
    alpha: DependentAngle = field(default_factory=lambda: DependentAngle(Angle.zero()))
    beta: DependentAngle = field(default_factory=lambda: DependentAngle(Angle.zero()))
    kind = "M2"

    def __post_init__(self):
        check_qubit_id(self.i)
        check_qubit_id(self.j)
        if self.i == self.j:
            raise PatternError(f"M2 needs two distinct qubits, got {self.i!r} twice")
        object.__setattr__(self, "alpha", _dep(self.alpha))
        object.__setattr__(self, "beta", _dep(self.beta))

    @property
    def qubits(self):
        return (self.i, self.j)

    def signals(self):
        yield from self.alpha.signals()
        yield from self.beta.signals()

    def rename(self, f):
        return M2(f.get(self.i, self.i), f.get(self.j, self.j), self.alpha.rename(f), self.beta.rename(f))

    def substitute(self, i, t):
        return M2(self.i, self.j, self.alpha.substitute(i, t), self.beta.substitute(i, t))


def is_correction(c: Command) -> bool:
    return isinstance(c, Correction)


def is_measurement(c: Command) -> bool:
    return isinstance(c, (M, M2))


def measured_qubits(c: Command) -> tuple[QubitId, ...]:
    if isinstance(c, M):
        return (c.qubit,)
    if isinstance(c, M2):
        return (c.i, c.j)
    return ()


# --------------------------------------------------------------------------- patterns


@dataclass(frozen=True)
class Pattern:
    """A measurement pattern ``(V, I, O, seq)``.

    ``inputs`` and ``outputs`` are ordered; their order fixes the tensor
    factor order of branch maps. Non-input qubits without an explicit ``N``
    command are implicitly prepared in ``|+>``.
    """

    space: frozenset[QubitId]
    inputs: tuple[QubitId, ...]
    outputs: tuple[QubitId, ...]
    seq: tuple[Command, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "space", frozenset(self.space))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "seq", tuple(self.seq))
        for q in self.space:
            check_qubit_id(q)
        for name, qs in (("inputs", self.inputs), ("outputs", self.outputs)):
            if len(set(qs)) != len(qs):
                raise PatternError(f"duplicate qubit in {name}: {list(qs)}")
            missing = set(qs) - self.space
            if missing:
                raise PatternError(f"{name} not in computation space: {sorted_qubits(missing)}")

    @classmethod
    def build(cls, inputs: Sequence[QubitId], outputs: Sequence[QubitId], seq: Sequence[Command],
              space: Iterable[QubitId] | None = None) -> Pattern:
        """Convenience constructor; the space defaults to every qubit mentioned."""
        if space is None:
            qs: set[QubitId] = set(inputs) | set(outputs)
            for c in seq:
                qs.update(c.qubits)
                qs.update(measured_qubits(c))
                if isinstance(c, S):
                    qs.add(c.qubit)
            space = qs
        return cls(frozenset(space), tuple(inputs), tuple(outputs), tuple(seq))

    @property
    def measurements(self) -> list[Command]:
        return [c for c in self.seq if is_measurement(c)]

    @property
    def measured_order(self) -> list[QubitId]:
        """Measured qubits in execution order (M2 contributes i then j)."""
        out: list[QubitId] = []
        for c in self.seq:
            out.extend(measured_qubits(c))
        return out

    def with_seq(self, seq: Iterable[Command]) -> Pattern:
        # space and I/O are unchanged, so skip revalidating them
        out = object.__new__(Pattern)
        for name in ("space", "inputs", "outputs"):
            object.__setattr__(out, name, getattr(self, name))
        object.__setattr__(out, "seq", tuple(seq))
        return out

    def explicitly_prepared(self) -> frozenset[QubitId]:
        return frozenset(c.qubit for c in self.seq if isinstance(c, N))

    def implicit_preparations(self) -> list[QubitId]:
        """Non-input qubits prepared in |+> without an N command."""
        explicit = self.explicitly_prepared()
        inputs = set(self.inputs)
        return sorted_qubits(q for q in self.space if q not in inputs and q not in explicit)


@dataclass(frozen=True)
class Violation:
    condition: str            # "D0".."D3", "V" (unknown qubit) or a model tag
    index: int | None         # offending command index (execution order) or None
    qubit: QubitId | None
    message: str = ""

    def __str__(self) -> str:
        where = f" at command {self.index}" if self.index is not None else ""
        q = f" (qubit {self.qubit})" if self.qubit is not None else ""
        return f"{self.condition}{where}{q}: {self.message}"


def validate(p: Pattern) -> list[Violation]:
    """Check the definiteness conditions D0-D3; an empty list means valid."""
    out: list[Violation] = []
    explicit = p.explicitly_prepared()
    live = set(p.inputs) | {q for q in p.space if q not in explicit}
    measured: set[QubitId] = set()
    for k, c in enumerate(p.seq):
        for s in c.signals():
            for q in sorted_qubits(s.deps - measured):
                out.append(Violation("D0", k, q, f"depends on s{q} before it is measured"))
        touched = list(c.qubits)
        if isinstance(c, S) and c.qubit not in p.space:
            touched = [c.qubit]
        for q in touched:
            if q not in p.space:
                out.append(Violation("V", k, q, "qubit outside the computation space"))
            elif q in measured:
                out.append(Violation("D1", k, q, "acts on an already measured qubit"))
            elif isinstance(c, N):
                if q in live:
                    out.append(Violation("D2", k, q, "prepares a qubit that already exists"))
                live.add(q)
            elif q not in live:
                out.append(Violation("D2", k, q, "acts on a qubit not yet prepared"))
        for q in measured_qubits(c):
            measured.add(q)
    outputs = set(p.outputs)
    for q in sorted_qubits(p.space):
        if q in measured and q in outputs:
            out.append(Violation("D3", None, q, "output qubit is measured"))
        elif q not in measured and q not in outputs:
            out.append(Violation("D3", None, q, "non-output qubit is never measured"))
    return out


def require_valid(p: Pattern) -> None:
    bad = validate(p)
    if bad:
        raise PatternError("invalid pattern: " + "; ".join(str(v) for v in bad))


def identity(q: QubitId = "1") -> Pattern:
    """The trivial pattern on one qubit with an empty command sequence."""
    return Pattern(frozenset({q}), (q,), (q,), ())


def compose(p2: Pattern, p1: Pattern) -> Pattern:
    """``p2 . p1``: run p1, then p2 on p1's outputs."""
    shared = p1.space & p2.space
    if list(p1.outputs) != list(p2.inputs) or shared != set(p1.outputs):
        extra = sorted_qubits(shared - set(p1.outputs)) or sorted_qubits(shared ^ set(p2.inputs))
        raise InterfaceError(
            f"cannot compose: outputs {list(p1.outputs)} of the first pattern must equal inputs "
            f"{list(p2.inputs)} of the second and be their only shared qubits; offending: {extra}")
    return Pattern(p1.space | p2.space, p1.inputs, p2.outputs, p1.seq + p2.seq)


def tensor(p1: Pattern, p2: Pattern) -> Pattern:
    shared = p1.space & p2.space
    if shared:
        raise InterfaceError(f"cannot tensor patterns sharing qubits {sorted_qubits(shared)}")
    return Pattern(p1.space | p2.space, p1.inputs + p2.inputs, p1.outputs + p2.outputs, p1.seq + p2.seq)


def rename(p: Pattern, f: Mapping[QubitId, QubitId] | Callable[[QubitId], QubitId]) -> Pattern:
    """Rename every qubit occurrence through the injective map ``f``."""
    if callable(f) and not isinstance(f, Mapping):
        mapping = {q: f(q) for q in p.space}
    else:
        missing = p.space - set(f)
        if missing:
            raise PatternError(f"renaming undefined on {sorted_qubits(missing)}")
        mapping = {q: f[q] for q in p.space}
    if len(set(mapping.values())) != len(mapping):
        raise PatternError("renaming is not injective on the computation space")
    for v in mapping.values():
        check_qubit_id(v)
    return Pattern(frozenset(mapping.values()), tuple(mapping[q] for q in p.inputs),
                   tuple(mapping[q] for q in p.outputs), tuple(c.rename(mapping) for c in p.seq))


def relabel(p: Pattern, *names: QubitId) -> Pattern:
    """``P(f(1), ..., f(n))`` for a pattern over qubits named "1".."n"."""
    return rename(p, {str(k + 1): q for k, q in enumerate(names)})
