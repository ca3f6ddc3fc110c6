"""Phase, Pauli and teleportation models, their rewrite steps and the embeddings."""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import (
    E, M, M2, N, P, X, Z, Angle, Command, DependentAngle, Pattern, PatternError, Signal, Term,
    Violation, ZERO, measured_qubits, require_valid,
)
from .rewrite import RewriteRule, Trace, rewrite_pair, standardize, step


class ModelTag(enum.Enum):
    ONEWAY = "oneway"
    PHASE = "phase"
    PAULI = "pauli"
    TELE = "tele"

    @classmethod
    def coerce(cls, tag: "ModelTag | str") -> "ModelTag":
        if isinstance(tag, cls):
            return tag
        try:
            return cls(str(tag).strip().lower())
        except ValueError:
            raise PatternError(f"unknown model {tag!r}; known: {', '.join(t.value for t in cls)}") from None


HALF = Fraction(1, 2)
PAULI_PREPARATIONS = (Angle.zero(), Angle.pi(1, 4))


def _pauli_angle(a: Angle) -> bool:
    return a.exact and a.is_multiple_of(HALF)


def _pauli_measurement(angle: DependentAngle) -> bool:
    return _pauli_angle(angle.base) and all(_pauli_angle(t.coefficient) for t in angle.offsets)


def model_check(p: Pattern, tag: ModelTag | str) -> list[Violation]:
    """Commands and angles that are not admissible in the model; empty means admissible."""
    tag = ModelTag.coerce(tag)
    name = tag.value
    out: list[Violation] = []

    def bad(k: int, c: Command, msg: str) -> None:
        q = c.qubits[0] if c.qubits else getattr(c, "qubit", None)
        out.append(Violation(name, k, q, msg))

    for k, c in enumerate(p.seq):
        if isinstance(c, M2) and tag is not ModelTag.TELE:
            bad(k, c, "two-qubit measurements belong to the teleportation model")
        elif isinstance(c, M) and tag is ModelTag.TELE:
            bad(k, c, "one-qubit measurements are outside the teleportation model")
        elif isinstance(c, P) and tag in (ModelTag.ONEWAY, ModelTag.TELE):
            bad(k, c, "phase corrections need the phase model")
        elif isinstance(c, N) and not c.angle.is_zero() and tag in (ModelTag.ONEWAY, ModelTag.TELE):
            bad(k, c, "non-zero preparation angles need the phase model")
        if tag is not ModelTag.PAULI:
            continue
        if isinstance(c, M) and not _pauli_measurement(c.angle):
            bad(k, c, "measurement angle outside {0, pi/2, pi, -pi/2}")
        elif isinstance(c, N) and not (c.angle.exact and c.angle in PAULI_PREPARATIONS):
            bad(k, c, "preparation angle outside {0, pi/4}")
        elif isinstance(c, P) and not _pauli_angle(c.beta):
            bad(k, c, "phase correction angle is not a multiple of pi/2")
    return out


# --------------------------------------------------------------------------- rewrite steps


def phase_rewrite_step(p: Pattern, at: int) -> Optional[tuple[Pattern, RewriteRule]]:
    """One rewrite step of the phase model (EX, EZ, EP, MX, MZ, MP and free commutation)."""
    if any(isinstance(c, M2) for c in p.seq):
        raise PatternError("phase_rewrite_step needs a pattern without two-qubit measurements")
    return step(p, at, absorb="none")


_TELE_TAGS = {"EX": "T_EX", "EX2": "T_EX", "EZ": "T_EZ", "EZ2": "T_EZ"}


def teleport_rewrite_step(p: Pattern, at: int) -> Optional[tuple[Pattern, RewriteRule]]:
    """One rewrite step of the teleportation model; tags carry the ``T_`` prefix."""
    if any(isinstance(c, P) for c in p.seq):
        raise PatternError("teleport_rewrite_step needs a pattern without phase corrections")
    hit = step(p, at, absorb="none")
    if hit is None:
        return None
    q, rule = hit
    return q, RewriteRule(_TELE_TAGS.get(rule.tag, rule.tag), rule.applies_at)


def teleport_standardize(p: Pattern, trace: Optional[Trace] = None) -> Pattern:
    """Standardize a teleportation-model pattern; the trace reports teleportation tags."""

    def relabel(rule: RewriteRule, before, after) -> None:
        trace(RewriteRule(_TELE_TAGS.get(rule.tag, rule.tag), rule.applies_at), before, after)

    return standardize(p, absorb="none", trace=relabel if trace else None)


# --------------------------------------------------------------------------- Pauli model


def pauli_j_quarter() -> Pattern:
    """``J(pi/4)`` in the Pauli model.

    Teleport the input through ``J(0) J(0)``, apply ``P(pi/4)`` and ``J(0)``, then
    commute the phase to the front with ``P(b) X = e^{ib} X P(-b)``:
    ``X_4^{s3} Z_4^{s2} M_3^{s2 pi/2 + s1 pi} M_2^0 M_1^0 E_12 E_23 E_34 N_3^{pi/4}``.
    """
    s1, s2, s3 = Signal.of("1"), Signal.of("2"), Signal.of("3")
    m3 = DependentAngle(Angle.zero(), ZERO, (Term(Angle.pi(1), s1), Term(Angle.pi(1, 2), s2)))
    seq = [
        N("3", Angle.pi(1, 4)), E("3", "4"), E("2", "3"), E("1", "2"),
        M("1", DependentAngle(Angle.zero())), M("2", DependentAngle(Angle.zero())), M("3", m3),
        Z("4", s2), X("4", s3),
    ]
    return Pattern.build(["1"], ["4"], seq)


def pauli_j_quarter_wild() -> Pattern:
    """The phase-model composite ``J(0)(3,4) P_3(pi/4) J(0)(2,3) J(0)(1,2)`` before standardization."""
    seq = []
    for i, j in (("1", "2"), ("2", "3")):
        seq += [E(i, j), M(i, DependentAngle(Angle.zero())), X(j, Signal.of(i))]
    seq.append(P("3", Angle.pi(1, 4), Signal(constant=1)))
    seq += [E("3", "4"), M("3", DependentAngle(Angle.zero())), X("4", Signal.of("3"))]
    return Pattern.build(["1"], ["4"], seq)


# --------------------------------------------------------------------------- embeddings


def dummy_name(q: str) -> str:
    return f"{q}_d"


def _hoist_entanglement(seq: list[Command], k: int) -> None:
    """Move the E at index k earlier past disjoint non-E commands (the FREE_E rule)."""
    while k > 0:
        hit = rewrite_pair(seq[k - 1], seq[k])
        if hit is None or hit[1] != "FREE_E":
            return
        seq[k - 1], seq[k] = seq[k], seq[k - 1]
        k -= 1


def embed_forward(p: Pattern) -> Pattern:
    """One-way to teleportation model: each ``M_i`` becomes ``M2(i, i_d; alpha, 0) E(i, i_d)``.

    Dummy qubits are implicitly prepared in |+>; their outcomes are never read.
    The dummy entanglement is moved as early as free commutation allows.
    """
    require_valid(p)
    bad = [c for c in p.seq if isinstance(c, M2)]
    if bad:
        raise PatternError("embed_forward needs a one-way pattern without two-qubit measurements")
    dummies = [dummy_name(c.qubit) for c in p.seq if isinstance(c, M)]
    clash = sorted(set(dummies) & p.space)
    if clash:
        raise PatternError(f"dummy qubit names already in use: {clash}")
    seq: list[Command] = []
    for c in p.seq:
        if isinstance(c, M):
            d = dummy_name(c.qubit)
            seq.append(E(c.qubit, d))
            _hoist_entanglement(seq, len(seq) - 1)
            seq.append(M2(c.qubit, d, c.angle, DependentAngle(Angle.zero())))
        else:
            seq.append(c)
    return Pattern(p.space | set(dummies), p.inputs, p.outputs, tuple(seq))


def embed_backward(p: Pattern) -> Pattern:
    """Teleportation to one-way model: ``M2(i, j; a, b)`` becomes ``M_j^b M_i^a E_ij``."""
    require_valid(p)
    seq: list[Command] = []
    for c in p.seq:
        if isinstance(c, M2):
            seq += [E(c.i, c.j), M(c.i, c.alpha), M(c.j, c.beta)]
        else:
            seq.append(c)
    return p.with_seq(seq)


def _touches(c: Command, qs: set[str]) -> bool:
    return bool(set(c.qubits) & qs) or bool(set(measured_qubits(c)) & qs) or bool(c.deps() & qs)


def remove_dummies(p: Pattern, dummies: Optional[Iterable[str]] = None) -> Pattern:
    """Eliminate dummy qubits: cancel their paired ``E(i, i_d)`` and drop the ``M_{i_d}^x``."""
    if dummies is None:
        dummies = [q for q in p.space if q.endswith("_d") and q[:-2] in p.space]
    seq = list(p.seq)
    removed = set()
    for d in sorted(dummies):
        if d in p.inputs or d in p.outputs:
            raise PatternError(f"{d} is not a dummy qubit")
        host = d[:-2]
        idx = [k for k, c in enumerate(seq) if _touches(c, {d})]
        ents = [k for k in idx if isinstance(seq[k], E)]
        meas = [k for k in idx if not isinstance(seq[k], E)]
        if (len(ents) != 2 or any(set(seq[k].qubits) != {host, d} for k in ents) or len(meas) != 1
                or not isinstance(seq[meas[0]], M) or seq[meas[0]].angle != DependentAngle(Angle.zero())
                or meas[0] < ents[1]):
            raise PatternError(f"{d} is not an eliminable dummy qubit")
        between = seq[ents[0] + 1:ents[1]]
        if any(_touches(c, {host}) and not isinstance(c, E) for c in between):
            raise PatternError(f"entanglement of dummy {d} does not cancel")
        for k in sorted((ents[0], ents[1], meas[0]), reverse=True):
            del seq[k]
        removed.add(d)
    return Pattern(p.space - removed, p.inputs, p.outputs, tuple(seq))


def fuse_pairs(p: Pattern, pairs: Sequence[tuple[str, str]]) -> Pattern:
    """Fuse ``M_j M_i E_ij`` into the graph-basis measurement ``M2(i, j)``.

    The E must be the last command on i and j before their measurements, and
    neither measurement may depend on the other's outcome.
    """
    seq = list(p.seq)
    for i, j in pairs:
        try:
            ki = next(k for k, c in enumerate(seq) if isinstance(c, M) and c.qubit == i)
            kj = next(k for k, c in enumerate(seq) if isinstance(c, M) and c.qubit == j)
        except StopIteration:
            raise PatternError(f"no one-qubit measurements of both {i} and {j}") from None
        first, last = min(ki, kj), max(ki, kj)
        ke = max((k for k in range(first) if isinstance(seq[k], E) and set(seq[k].qubits) == {i, j}),
                 default=None)
        if ke is None:
            raise PatternError(f"no E({i},{j}) before the measurements of {i} and {j}")
        if any(_touches(seq[k], {i, j}) for k in range(ke + 1, last) if k != first):
            raise PatternError(f"commands between E({i},{j}) and the measurements act on {i} or {j}")
        if seq[ki].deps() & {j} or seq[kj].deps() & {i}:
            raise PatternError(f"measurements of {i} and {j} depend on each other")
        m2 = M2(i, j, seq[ki].angle, seq[kj].angle)
        seq[last] = m2
        del seq[first]
        del seq[ke]
    return p.with_seq(seq)


__all__ = [
    "ModelTag", "model_check", "phase_rewrite_step", "teleport_rewrite_step", "teleport_standardize",
    "pauli_j_quarter", "pauli_j_quarter_wild", "dummy_name", "embed_forward", "embed_backward", "remove_dummies", "fuse_pairs",
]
