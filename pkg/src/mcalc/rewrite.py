"""Rewrite rules, standardization, signal shifting and the canonical form.

Rules act on execution-adjacent pairs ``(seq[k], seq[k+1])``; ``seq[k]``
runs first. In the right-to-left notation the pair reads ``seq[k+1] seq[k]``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .core import (
    E, M, M2, N, P, S, X, Z, Command, Correction, Pattern, PatternError, Signal,
    is_correction, is_measurement, qubit_key, require_valid,
)

RULE_TAGS = (
    "EX", "EX2", "EZ", "EZ2", "MX", "MZ", "FREE_E", "FREE_X", "FREE_Z", "FREE_P",
    "SPLIT", "SHIFT_X", "SHIFT_Z", "SHIFT_P", "SHIFT_M", "SHIFT_S", "DROP_S",
    "EP", "MP", "T_EX", "T_EZ", "T_MX", "T_MZ",
)

ABSORB_MODES = ("xy", "x", "none")


class NotStandardError(PatternError):
    """The operation needs a pattern in NEMC form."""


@dataclass(frozen=True)
class RewriteRule:
    tag: str
    applies_at: int


@dataclass(frozen=True, order=True)
class Measure:
    """Termination measure; compared lexicographically on ``(dE, dC)``."""

    dE: tuple[int, ...]
    dC: int


Trace = Callable[[RewriteRule, Sequence[Command], Sequence[Command]], None]


def _absorb(m: M, mode: str) -> M:
    """Special-angle absorption: x-like bases drop the X-action, y-like fold it into the Z-action."""
    a = m.angle
    if mode == "none" or a.sign.is_zero:
        return m
    from fractions import Fraction

    if a.base.is_multiple_of(Fraction(1)):
        return M(m.qubit, a.absorb_pauli())
    if mode == "xy" and a.base.is_multiple_of(Fraction(1, 2)):
        return M(m.qubit, a.absorb_pauli())
    return m


def rewrite_pair(a: Command, b: Command, absorb: str = "xy") -> Optional[tuple[list[Command], str]]:
    """Rewrite the execution-adjacent pair ``[a, b]``; None when no rule matches."""
    if absorb not in ABSORB_MODES:
        raise PatternError(f"absorb mode must be one of {ABSORB_MODES}")
    # every rule has a correction on the left or an E on the right
    a_corr = isinstance(a, Correction)
    if not a_corr and (type(b) is not E or type(a) is E):
        return None
    aq, bq = set(a.qubits), set(b.qubits)
    if a_corr and aq & bq:
        q = a.qubit
        if isinstance(b, E):
            if isinstance(a, X):
                return [b, Z(b.other(q), a.signal), a], ("EX" if q == b.i else "EX2")
            if isinstance(a, Z):
                return [b, a], ("EZ" if q == b.i else "EZ2")
            return [b, a], "EP"
        if isinstance(b, M):
            if isinstance(a, X):
                return [_absorb(M(q, b.angle.x_action(a.signal)), absorb)], "MX"
            if isinstance(a, Z):
                return [_absorb(M(q, b.angle.z_action(a.signal)), absorb)], "MZ"
            return [_absorb(M(q, b.angle.phase_action(a.beta, a.signal)), absorb)], "MP"
        if isinstance(b, M2) and isinstance(a, (X, Z)):
            r = a.signal
            if isinstance(a, X):
                if q == b.i:
                    return [M2(b.i, b.j, b.alpha.x_action(r), b.beta.z_action(r))], "T_MX"
                return [M2(b.i, b.j, b.alpha.z_action(r), b.beta.x_action(r))], "T_MX"
            if q == b.i:
                return [M2(b.i, b.j, b.alpha.z_action(r), b.beta)], "T_MZ"
            return [M2(b.i, b.j, b.alpha, b.beta.z_action(r))], "T_MZ"
        return None
    if aq & bq:
        return None
    # free commutation on disjoint qubits; N and S never move this way
    if isinstance(a, (N, S)) or isinstance(b, (N, S)):
        return None
    if isinstance(a, Correction):
        if isinstance(b, Correction):
            return None
        return [b, a], "FREE_" + a.kind
    if isinstance(b, E) and not isinstance(a, E):
        return [b, a], "FREE_E"
    return None


def step(p: Pattern, at: int, absorb: str = "xy") -> Optional[tuple[Pattern, RewriteRule]]:
    """Apply the rule matching the pair at ``(at, at+1)`` if there is one."""
    if at < 0 or at + 1 >= len(p.seq):
        return None
    hit = rewrite_pair(p.seq[at], p.seq[at + 1], absorb)
    if hit is None:
        return None
    repl, tag = hit
    return p.with_seq(p.seq[:at] + tuple(repl) + p.seq[at + 2:]), RewriteRule(tag, at)


def applicable(p: Pattern, absorb: str = "xy") -> list[int]:
    return [k for k in range(len(p.seq) - 1) if rewrite_pair(p.seq[k], p.seq[k + 1], absorb) is not None]


_CORRECTION_TYPES = frozenset({X, Z, P})


def measure_of(p: Pattern) -> Measure:
    """``d(E) = i`` and ``d(C) = n - i`` with positions i counted from the first executed command (1-based)."""
    n = len(p.seq)
    dE: list[int] = []
    dC = 0
    for i, c in enumerate(p.seq, 1):
        t = type(c)
        if t is E:
            dE.append(i)
        elif t in _CORRECTION_TYPES:
            dC += n - i
    return Measure(tuple(dE), dC)


def _kind_rank(c: Command) -> int:
    if isinstance(c, N):
        return 0
    if isinstance(c, E):
        return 1
    if is_measurement(c):
        return 2
    if is_correction(c):
        return 3
    return 4


def is_standard(p: Pattern) -> bool:
    """NEMC form: preparations, then entanglement, then measurements, then corrections."""
    ranks = [_kind_rank(c) for c in p.seq]
    return 4 not in ranks and ranks == sorted(ranks)


def _emit(trace: Optional[Trace], rule: RewriteRule, before, after) -> None:
    if trace is not None:
        trace(rule, before, after)


def _apply(seq: list[Command], k: int, absorb: str, trace: Optional[Trace], count: list[int]) -> bool:
    hit = rewrite_pair(seq[k], seq[k + 1], absorb)
    if hit is None:
        return False
    repl, tag = hit
    before = seq[k:k + 2]
    seq[k:k + 2] = repl
    count[0] += 1
    _emit(trace, RewriteRule(tag, k), before, repl)
    return True


def standardize(p: Pattern, absorb: str = "xy", trace: Optional[Trace] = None,
                max_steps: int = 1_000_000) -> Pattern:
    """Rewrite to the NEMC standard form.

    Stage one moves explicit preparations to the front, stage two pushes
    corrections to the end (rightmost first) and stage three pulls
    entanglement to the front. ``absorb`` selects which special-angle
    absorptions fire after MX/MZ/MP: ``"xy"`` (both), ``"x"`` or ``"none"``.
    """
    require_valid(p)
    if any(isinstance(c, S) for c in p.seq):
        raise PatternError("standardize does not accept signal shifts; shift_signals removes them")
    seq = [c for c in p.seq if isinstance(c, N)] + [c for c in p.seq if not isinstance(c, N)]
    count = [0]
    while True:
        moved = False
        for k in range(len(seq) - 2, -1, -1):
            if is_correction(seq[k]) and _apply(seq, k, absorb, trace, count):
                moved = True
                break
        if not moved:
            break
        if count[0] > max_steps:
            raise PatternError("standardization exceeded the step budget")
    while True:
        moved = False
        for k in range(len(seq) - 1):
            if isinstance(seq[k + 1], E) and not isinstance(seq[k], (E, N)) and _apply(seq, k, absorb, trace, count):
                moved = True
                break
        if not moved:
            break
    out = p.with_seq(seq)
    if not is_standard(out):
        raise PatternError("standardization got stuck before reaching NEMC form")
    return out


def random_standardize(p: Pattern, rng: random.Random, absorb: str = "xy",
                       max_steps: int = 1_000_000) -> Pattern:
    """Hoist preparations, then apply randomly chosen applicable rules until none is left."""
    require_valid(p)
    cur = p.with_seq([c for c in p.seq if isinstance(c, N)] + [c for c in p.seq if not isinstance(c, N)])
    for _ in range(max_steps):
        spots = applicable(cur, absorb)
        if not spots:
            return cur
        cur, _rule = step(cur, rng.choice(spots), absorb)
    raise PatternError("random rewriting exceeded the step budget")


# --------------------------------------------------------------------------- signal shifting


def _shift_past(s: S, b: Command) -> tuple[list[Command], str]:
    i, t = s.qubit, s.signal
    if isinstance(b, S):
        return [S(b.qubit, b.signal.substitute(i, t)), s], "SHIFT_S"
    if isinstance(b, (M, M2)):
        return [b.substitute(i, t), s], "SHIFT_M"
    if isinstance(b, (X, Z, P)):
        return [b.substitute(i, t), s], "SHIFT_" + b.kind
    raise PatternError(f"no shift rule past {b.kind}")


def shift_signals(p: Pattern, trace: Optional[Trace] = None) -> Pattern:
    """Remove every Z-action dependency from measurements by shifting it into later signals."""
    if not is_standard(p):
        raise NotStandardError("shift_signals needs a standard (NEMC) pattern")
    seq = list(p.seq)
    while True:
        k = next((k for k, c in enumerate(seq) if isinstance(c, M) and not c.angle.t_signal.is_zero), None)
        if k is None:
            break
        m = seq[k]
        shift = S(m.qubit, m.angle.t_signal)
        seq[k:k + 1] = [M(m.qubit, m.angle.without_t()), shift]
        _emit(trace, RewriteRule("SPLIT", k), [m], seq[k:k + 2])
        k += 1
        while k + 1 < len(seq):
            repl, tag = _shift_past(seq[k], seq[k + 1])
            before = seq[k:k + 2]
            seq[k:k + 2] = repl
            _emit(trace, RewriteRule(tag, k), before, repl)
            k += 1
        _emit(trace, RewriteRule("DROP_S", k), [seq[k]], [])
        del seq[k]
    return p.with_seq(seq)


def shift_rules_random(p: Pattern, rng: random.Random) -> Pattern:
    """Signal shifting under a random rule order (used to test confluence of the extended system)."""
    if not is_standard(p):
        raise NotStandardError("signal shifting needs a standard (NEMC) pattern")
    seq = list(p.seq)
    while True:
        moves: list[tuple[str, int]] = []
        for k, c in enumerate(seq):
            if isinstance(c, M) and not c.angle.t_signal.is_zero:
                moves.append(("split", k))
            if isinstance(c, S):
                moves.append(("drop", k) if k + 1 == len(seq) else ("push", k))
        if not moves:
            return p.with_seq(seq)
        kind, k = rng.choice(moves)
        if kind == "split":
            m = seq[k]
            seq[k:k + 1] = [M(m.qubit, m.angle.without_t()), S(m.qubit, m.angle.t_signal)]
        elif kind == "push":
            seq[k:k + 2] = _shift_past(seq[k], seq[k + 1])[0]
        else:
            del seq[k]


# --------------------------------------------------------------------------- canonical form


def _canonical_corrections(block: list[Command]) -> list[Command]:
    by_qubit: dict[str, list[Command]] = {}
    for c in block:
        by_qubit.setdefault(c.qubit, []).append(c)
    out: list[Command] = []
    for q in sorted(by_qubit, key=qubit_key):
        cs = by_qubit[q]
        if any(isinstance(c, P) for c in cs):
            out.extend(c for c in cs if not c.signal.is_zero)
            continue
        z = sum((c.signal for c in cs if isinstance(c, Z)), Signal())
        x = sum((c.signal for c in cs if isinstance(c, X)), Signal())
        if not z.is_zero:
            out.append(Z(q, z))
        if not x.is_zero:
            out.append(X(q, x))
    return out


def equiv_canonical(p: Pattern) -> Pattern:
    """Canonical representative of the equivalence class of a standard pattern.

    Preparations are sorted by qubit, entanglement commands are oriented as
    ``E(min, max)`` and sorted, measurement order is kept (with the X-action
    dropped on x-like bases) and output corrections are merged per qubit,
    sorted, and ordered Z then X in execution order.
    """
    if not is_standard(p):
        raise NotStandardError("equiv_canonical needs a standard (NEMC) pattern")
    ns = sorted((c for c in p.seq if isinstance(c, N)), key=lambda c: qubit_key(c.qubit))
    es = []
    for c in p.seq:
        if isinstance(c, E):
            i, j = sorted(c.qubits, key=qubit_key)
            es.append(E(i, j))
    es.sort(key=lambda e: (qubit_key(e.i), qubit_key(e.j)))
    ms = [(_absorb(c, "x") if isinstance(c, M) else c) for c in p.seq if is_measurement(c)]
    cs = _canonical_corrections([c for c in p.seq if is_correction(c)])
    return p.with_seq(ns + es + ms + cs)


def normalize(p: Pattern) -> Pattern:
    """Drop identity corrections (zero signal) anywhere in the sequence."""
    return p.with_seq(c for c in p.seq if not (is_correction(c) and c.signal.is_zero))
