"""Dependency structure, depth, and Pauli/Clifford membership."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import (
    M, M2, Pattern, PatternError, QubitId, is_correction, measured_qubits, qubit_key, sorted_qubits,
)
from .rewrite import NotStandardError, is_standard, shift_signals, standardize

TOL = 1e-9
MAX_PAULI_QUBITS = 3

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PHASES = (1, 1j, -1, -1j)


@dataclass(frozen=True)
class DependencyGraph:
    """Measurement nodes, dependency edges ``(j, i)`` (i reads s_j), and the correction node."""

    nodes: tuple[tuple[QubitId, str], ...]
    edges: tuple[tuple[QubitId, QubitId], ...]
    correction_deps: Optional[tuple[QubitId, ...]]
    rounds: tuple[tuple[QubitId, int], ...]

    @property
    def measurement_rounds(self) -> int:
        return max((r for _, r in self.rounds), default=0)

    @property
    def depth(self) -> int:
        return self.measurement_rounds + (1 if self.correction_deps is not None else 0)

    def round_of(self, q: QubitId) -> int:
        return dict(self.rounds)[q]

    def to_obj(self) -> dict:
        return {
            "nodes": [{"qubit": q, "angle": a, "round": self.round_of(q)}
                      for q, a in sorted(self.nodes, key=lambda n: qubit_key(n[0]))],
            "edges": [list(e) for e in self.edges],
            "correction": None if self.correction_deps is None else {"deps": list(self.correction_deps)},
            "measurement_rounds": self.measurement_rounds,
            "depth": self.depth,
        }

    def to_dot(self, name: str = "deps") -> str:
        lines = [f"digraph {name} {{"]
        for q, a in sorted(self.nodes, key=lambda n: qubit_key(n[0])):
            lines.append(f'  "{q}" [label="M_{q} {a} (round {self.round_of(q)})"];')
        for j, i in self.edges:
            lines.append(f'  "{j}" -> "{i}";')
        if self.correction_deps is not None:
            lines.append('  "corrections" [shape=box];')
            for q in self.correction_deps:
                lines.append(f'  "{q}" -> "corrections";')
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Schedule:
    """Measurement rounds in order, followed by the optional correction round."""

    rounds: tuple[tuple[QubitId, ...], ...]
    correction_round: bool

    @property
    def depth(self) -> int:
        return len(self.rounds) + (1 if self.correction_round else 0)

    def to_obj(self) -> dict:
        return {"rounds": [list(r) for r in self.rounds], "correction_round": self.correction_round,
                "depth": self.depth}


def _require_standard(p: Pattern) -> None:
    if not is_standard(p):
        raise NotStandardError("dependency analysis needs a standard (NEMC) pattern")


def dependency_graph(p: Pattern) -> DependencyGraph:
    from .textio import format_angle

    _require_standard(p)
    nodes: list[tuple[QubitId, str]] = []
    deps: dict[QubitId, frozenset[QubitId]] = {}
    for c in p.seq:
        if isinstance(c, M):
            nodes.append((c.qubit, format_angle(c.angle.base)))
            deps[c.qubit] = c.deps()
        elif isinstance(c, M2):
            d = c.deps()
            nodes.append((c.i, format_angle(c.alpha.base)))
            nodes.append((c.j, format_angle(c.beta.base)))
            deps[c.i] = deps[c.j] = d
    edges = sorted({(j, i) for i, ds in deps.items() for j in ds},
                   key=lambda e: (qubit_key(e[0]), qubit_key(e[1])))
    rounds: dict[QubitId, int] = {}
    for q, _ in nodes:  # execution order is a topological order by D0
        rounds[q] = 1 + max((rounds[j] for j in deps[q]), default=0)
    corr = [c for c in p.seq if is_correction(c) and not c.signal.is_zero]
    corr_deps = None
    if corr:
        ds: set[QubitId] = set()
        for c in corr:
            ds |= c.signal.deps
        corr_deps = tuple(sorted_qubits(ds))
    return DependencyGraph(tuple(nodes), tuple(edges), corr_deps, tuple(rounds.items()))


def schedule(p: Pattern) -> Schedule:
    g = dependency_graph(p)
    layers: dict[int, list[QubitId]] = {}
    for q, r in g.rounds:
        layers.setdefault(r, []).append(q)
    return Schedule(tuple(tuple(sorted_qubits(layers[r])) for r in sorted(layers)), g.correction_deps is not None)


def depth(p: Pattern) -> int:
    """Measurement rounds (longest dependency path) plus one if any output correction remains."""
    return dependency_graph(p).depth


def measurement_rounds(p: Pattern) -> int:
    return dependency_graph(p).measurement_rounds


# --------------------------------------------------------------------------- Pauli / Clifford


@lru_cache(maxsize=None)
def _pauli_words(n: int) -> tuple[tuple[str, np.ndarray], ...]:
    out = []
    for word in itertools.product("IXYZ", repeat=n):
        m = np.eye(1, dtype=complex)
        for ch in word:
            m = np.kron(m, _PAULI[ch])
        out.append(("".join(word), m))
    return tuple(out)


def _check_size(U: np.ndarray, n: int) -> np.ndarray:
    if n > MAX_PAULI_QUBITS:
        raise PatternError(f"Pauli enumeration limited to {MAX_PAULI_QUBITS} qubits")
    U = np.asarray(U, dtype=complex)
    if U.shape != (2 ** n, 2 ** n):
        raise PatternError(f"expected a {2 ** n}x{2 ** n} matrix")
    return U


def pauli_member(U: np.ndarray, n: int) -> Optional[tuple[complex, str]]:
    """Return ``(phase, word)`` with ``U = phase * word`` or None."""
    U = _check_size(U, n)
    for word, m in _pauli_words(n):
        for ph in PHASES:
            if np.max(np.abs(U - ph * m)) <= TOL:
                return ph, word
    return None


def _generators(n: int) -> list[np.ndarray]:
    gens = []
    for k in range(n):
        for ch in "XZ":
            word = ["I"] * n
            word[k] = ch
            gens.append(dict(_pauli_words(n))["".join(word)])
    return gens


def clifford_member(U: np.ndarray, n: int) -> bool:
    """True iff ``U g U^dagger`` is a Pauli element for every generator ``X_k``, ``Z_k``."""
    U = _check_size(U, n)
    if np.max(np.abs(U.conj().T @ U - np.eye(2 ** n))) > TOL:
        raise PatternError("clifford_member needs a unitary matrix")
    return all(pauli_member(U @ g @ U.conj().T, n) is not None for g in _generators(n))


# --------------------------------------------------------------------------- reductions


def _pauli_angle(a) -> bool:
    return a.exact and a.is_multiple_of(Fraction(1, 2))


def is_xy_only(p: Pattern) -> bool:
    """Every measurement uses an exact base angle that is a multiple of pi/2, without phase offsets."""
    for c in p.seq:
        if isinstance(c, M):
            if not _pauli_angle(c.angle.base) or c.angle.extra_terms:
                return False
        elif isinstance(c, M2):
            return False
    return True


def xy_only_reduce(p: Pattern) -> Pattern:
    """Standardize, absorb every X-action on x/y measurements and shift all signals away."""
    if not is_xy_only(p):
        raise PatternError("xy_only_reduce needs measurements with base angles in {0, pi/2, pi, -pi/2}")
    out = shift_signals(standardize(p, absorb="xy"))
    assert all(not c.deps() for c in out.seq if isinstance(c, M))
    return out
