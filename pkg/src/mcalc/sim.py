"""Dense reference semantics: branches, branch maps, cptp maps and classification.

States are tensors of shape ``(columns, 2, ..., 2)``: axis 0 carries a batch
of inputs so that all computational basis inputs run in one pass, and the
remaining axes follow the ``active`` qubit list (first qubit = most
significant bit). States are never renormalized.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, MutableMapping, Optional, Sequence

import numpy as np

from .core import (
    E, M, M2, N, P, S, X, Z, Command, Pattern, PatternError, QubitId, measured_qubits, require_valid,
)

TOL = 1e-9
MAX_QUBITS = 16
MAX_MEASUREMENTS = 12


class ResourceError(PatternError):
    """Pattern exceeds the dense simulator's size guard."""


class DimensionError(PatternError):
    pass


class NotStronglyDeterministicError(PatternError):
    pass


class Determinism(enum.Enum):
    NOT_DETERMINISTIC = "NotDeterministic"
    DETERMINISTIC = "Deterministic"
    STRONGLY_DETERMINISTIC = "StronglyDeterministic"


@dataclass(frozen=True)
class QuantumState:
    active: tuple[QubitId, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if v.shape[0] != 2 ** len(self.active):
            raise DimensionError(f"state over {len(self.active)} qubits needs {2 ** len(self.active)} amplitudes")
        object.__setattr__(self, "active", tuple(self.active))
        object.__setattr__(self, "amplitudes", v)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True)
class BranchMapSet:
    measured_order: tuple[QubitId, ...]
    inputs: tuple[QubitId, ...]
    outputs: tuple[QubitId, ...]
    maps: Mapping[str, np.ndarray] = field(default_factory=dict)

    def stack(self) -> np.ndarray:
        """All branch maps as an array of shape (2^m, 2^|O|, 2^|I|), in outcome-string order."""
        return np.stack([self.maps[k] for k in sorted(self.maps)])

    def kraus_defect(self) -> float:
        A = self.stack()
        total = np.einsum("sji,sjk->ik", A.conj(), A)
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
            raise DimensionError("density operator must be square with power-of-two dimension")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, psi: np.ndarray) -> DensityOperator:
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        return cls(np.outer(psi, psi.conj()))

    def check(self, tol: float = TOL) -> None:
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise PatternError("density operator is not Hermitian")
        if np.min(np.linalg.eigvalsh((m + m.conj().T) / 2)) < -tol:
            raise PatternError("density operator is not positive semidefinite")
        tr = np.trace(m).real
        if tr < -tol or tr > 1 + tol:
            raise PatternError("density operator trace outside [0, 1]")


# --------------------------------------------------------------------------- engine


def _plus(alpha: float) -> np.ndarray:
    return np.array([1.0, np.exp(1j * alpha)], dtype=complex) / np.sqrt(2)


class _Run:
    """Executes a pattern over every outcome branch by depth-first search."""

    def __init__(self, p: Pattern):
        self.p = p
        self.prepared_lazily = set(p.implicit_preparations())

    def ensure(self, psi: np.ndarray, active: list[QubitId], qubits: Iterable[QubitId]):
        for q in qubits:
            if q not in active:
                if q not in self.prepared_lazily:
                    raise PatternError(f"qubit {q} used before preparation")
                psi = psi[..., None] * _plus(0.0)
                active = active + [q]
        return psi, active

    @staticmethod
    def axis(active: list[QubitId], q: QubitId) -> int:
        return active.index(q) + 1

    def apply(self, c: Command, psi: np.ndarray, active: list[QubitId], gamma: MutableMapping[QubitId, int]):
        if isinstance(c, N):
            if c.qubit in active:
                raise PatternError(f"qubit {c.qubit} prepared twice")
            return psi[..., None] * _plus(c.angle.radians), active + [c.qubit]
        if isinstance(c, S):
            gamma[c.qubit] = gamma[c.qubit] ^ c.signal.evaluate(gamma)
            return psi, active
        psi, active = self.ensure(psi, active, c.qubits)
        if isinstance(c, E):
            psi = psi.copy()
            idx = [slice(None)] * psi.ndim
            idx[self.axis(active, c.i)] = 1
            idx[self.axis(active, c.j)] = 1
            psi[tuple(idx)] *= -1
            return psi, active
        if isinstance(c, (X, Z, P)):
            if not c.signal.evaluate(gamma):
                return psi, active
            ax = self.axis(active, c.qubit)
            if isinstance(c, X):
                return np.flip(psi, axis=ax), active
            psi = psi.copy()
            idx = [slice(None)] * psi.ndim
            idx[ax] = 1
            psi[tuple(idx)] *= -1 if isinstance(c, Z) else np.exp(1j * c.beta.radians)
            return psi, active
        raise PatternError(f"cannot apply {c!r}")

    def measure(self, psi: np.ndarray, active: list[QubitId], q: QubitId, alpha: float, bit: int):
        ax = self.axis(active, q)
        psi = np.moveaxis(psi, ax, -1)
        phase = np.exp(-1j * alpha) * (-1 if bit else 1)
        out = (psi[..., 0] + phase * psi[..., 1]) / np.sqrt(2)
        return out, [a for a in active if a != q]

    def branches(self, psi: np.ndarray, active: list[QubitId],
                 visit: Callable[[str, np.ndarray, list[QubitId]], None],
                 fixed: Optional[str] = None) -> None:
        seq = self.p.seq

        def go(k: int, psi, active, gamma: dict, bits: str):
            while k < len(seq) and not isinstance(seq[k], (M, M2)):
                psi, active = self.apply(seq[k], psi, active, gamma)
                k += 1
            if k == len(seq):
                visit(bits, psi, active)
                return
            c = seq[k]
            if isinstance(c, M):
                psi1, active1 = self.ensure(psi, active, (c.qubit,))
                alpha = c.angle.evaluate(gamma).radians
                choices = [int(fixed[len(bits)])] if fixed is not None else [0, 1]
                for b in choices:
                    nxt, act = self.measure(psi1, active1, c.qubit, alpha, b)
                    g = dict(gamma)
                    g[c.qubit] = b
                    go(k + 1, nxt, act, g, bits + str(b))
                return
            psi1, active1 = self.ensure(psi, active, c.qubits)
            psi1, _ = self.apply(E(c.i, c.j), psi1, active1, gamma)
            a = c.alpha.evaluate(gamma).radians
            b_ = c.beta.evaluate(gamma).radians
            if fixed is not None:
                choices2 = [(int(fixed[len(bits)]), int(fixed[len(bits) + 1]))]
            else:
                choices2 = list(itertools.product((0, 1), repeat=2))
            for bi, bj in choices2:
                nxt, act = self.measure(psi1, active1, c.i, a, bi)
                nxt, act = self.measure(nxt, act, c.j, b_, bj)
                g = dict(gamma)
                g[c.i], g[c.j] = bi, bj
                go(k + 1, nxt, act, g, bits + f"{bi}{bj}")

        go(0, psi, list(active), {}, "")


def guard(p: Pattern) -> None:
    m = sum(len(measured_qubits(c)) for c in p.seq)
    if len(p.space) > MAX_QUBITS or m > MAX_MEASUREMENTS:
        raise ResourceError(f"pattern too large for the dense simulator: |V|={len(p.space)} "
                            f"(max {MAX_QUBITS}), measurements={m} (max {MAX_MEASUREMENTS})")


def _finish(run: _Run, psi: np.ndarray, active: list[QubitId], outputs: Sequence[QubitId]) -> np.ndarray:
    psi, active = run.ensure(psi, active, [q for q in outputs if q not in active])
    if set(active) != set(outputs):
        raise PatternError(f"unmeasured non-output qubits remain: {sorted(set(active) - set(outputs))}")
    perm = [0] + [active.index(q) + 1 for q in outputs]
    psi = np.transpose(psi, perm)
    return psi.reshape(psi.shape[0], -1)


def branch_maps(p: Pattern) -> BranchMapSet:
    """``A_s`` for every outcome string s; rows follow ``outputs``, columns ``inputs``."""
    require_valid(p)
    guard(p)
    run = _Run(p)
    d_in = 2 ** len(p.inputs)
    psi0 = np.eye(d_in, dtype=complex).reshape((d_in,) + (2,) * len(p.inputs))
    maps: dict[str, np.ndarray] = {}

    def visit(bits, psi, active):
        maps[bits] = _finish(run, psi, active, p.outputs).T.copy()

    run.branches(psi0, list(p.inputs), visit)
    return BranchMapSet(tuple(p.measured_order), p.inputs, p.outputs, maps)


def _as_input(p: Pattern, state) -> np.ndarray:
    v = state.amplitudes if isinstance(state, QuantumState) else np.asarray(state, dtype=complex).reshape(-1)
    if isinstance(state, QuantumState) and tuple(state.active) != tuple(p.inputs):
        raise DimensionError(f"input state is over {list(state.active)}, pattern inputs are {list(p.inputs)}")
    if v.shape[0] != 2 ** len(p.inputs):
        raise DimensionError(f"input needs {2 ** len(p.inputs)} amplitudes, got {v.shape[0]}")
    return v


def run_branch(p: Pattern, state, outcomes: str | Sequence[int]) -> tuple[QuantumState, float]:
    """Run a single branch; returns the unnormalized output state and its probability."""
    require_valid(p)
    guard(p)
    bits = "".join(str(int(b)) for b in outcomes)
    m = len(p.measured_order)
    if len(bits) != m or set(bits) - {"0", "1"}:
        raise DimensionError(f"outcome string must have {m} bits")
    v = _as_input(p, state)
    run = _Run(p)
    psi0 = v.reshape((1,) + (2,) * len(p.inputs))
    out: list[np.ndarray] = []
    run.branches(psi0, list(p.inputs), lambda b, psi, act: out.append(_finish(run, psi, act, p.outputs)[0]),
                 fixed=bits)
    vec = out[0]
    return QuantumState(p.outputs, vec), float(np.vdot(vec, vec).real)


def run_all(p: Pattern, state) -> dict[str, tuple[QuantumState, float]]:
    bms = branch_maps(p)
    v = _as_input(p, state)
    out = {}
    for k in sorted(bms.maps):
        w = bms.maps[k] @ v
        out[k] = (QuantumState(p.outputs, w), float(np.vdot(w, w).real))
    return out


def _maps_of(x) -> BranchMapSet:
    return x if isinstance(x, BranchMapSet) else branch_maps(x)


def apply_cptp(p, rho) -> DensityOperator:
    """``sum_s A_s rho A_s^dagger``."""
    bms = _maps_of(p)
    r = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)
    A = bms.stack()
    if r.shape != (A.shape[2], A.shape[2]):
        raise DimensionError(f"density operator must be {A.shape[2]}x{A.shape[2]}")
    return DensityOperator(np.einsum("sij,jk,slk->il", A, r, A.conj()))


def choi(p) -> np.ndarray:
    """``sum_ab |a><b| (x) T(|a><b|)`` over the matrix units of the input space."""
    A = _maps_of(p).stack()
    d_in = A.shape[2]
    # T(|a><b|) = sum_s A_s[:, a] A_s[:, b]^*
    J = np.einsum("soa,spb->aobp", A, A.conj())
    d_out = A.shape[1]
    return J.reshape(d_in * d_out, d_in * d_out)


def _sym_projector(d: int) -> np.ndarray:
    swap = np.zeros((d * d, d * d))
    for a in range(d):
        for b in range(d):
            swap[a * d + b, b * d + a] = 1.0
    return (np.eye(d * d) + swap) / 2


def _same_up_to_phase(A: np.ndarray) -> bool:
    ref = A[0]
    return all(equal_up_to_phase(ref, a) for a in A[1:]) and np.allclose(
        np.linalg.norm(A.reshape(A.shape[0], -1), axis=1), np.linalg.norm(ref), atol=TOL, rtol=0)


def classify(p, strict: bool = False) -> Determinism:
    """Strongly deterministic when all branch maps coincide; deterministic when pure inputs stay pure.

    By default branch maps are compared up to a per-branch global phase,
    the equality that the rewrite rules preserve; ``strict`` compares entrywise.
    """
    bms = _maps_of(p)
    A = bms.stack()
    if np.max(np.abs(A - A[0])) <= TOL or (not strict and _same_up_to_phase(A)):
        return Determinism.STRONGLY_DETERMINISTIC
    # Pure states stay pure iff A_s q and A_t q are parallel for every q and every pair.
    # That holds for the maps iff it holds for an orthonormal basis of their span.
    S_, d_out, d_in = A.shape
    flat = A.reshape(S_, -1)
    _, sv, vh = np.linalg.svd(flat, full_matrices=False)
    rank = int(np.sum(sv > TOL * max(1.0, sv[0])))
    basis = vh[:rank].reshape(rank, d_out, d_in)
    sym = _sym_projector(d_in)
    for a in range(rank):
        for b in range(a + 1, rank):
            K = np.kron(basis[a], basis[b]) - np.kron(basis[b], basis[a])
            if np.max(np.abs(K @ sym)) > 1e-8:
                return Determinism.NOT_DETERMINISTIC
    return Determinism.DETERMINISTIC


def extract_unitary(p, strict: bool = False) -> np.ndarray:
    """``2^{m/2} A_{0...0}`` for a strongly deterministic pattern."""
    bms = _maps_of(p)
    if classify(bms, strict) is not Determinism.STRONGLY_DETERMINISTIC:
        raise NotStronglyDeterministicError("pattern is not strongly deterministic")
    m = len(bms.measured_order)
    U = (2 ** (m / 2)) * bms.maps["0" * m]
    if np.max(np.abs(U.conj().T @ U - np.eye(U.shape[1]))) > TOL:
        raise PatternError("extracted map is not a unitary embedding")
    return U


def equal_up_to_phase(U: np.ndarray, V: np.ndarray, tol: float = TOL) -> bool:
    """True when ``V = e^{i phi} U``; uses ``|<U, V>| = |U| |V|``."""
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if U.shape != V.shape:
        return False
    nu, nv = np.linalg.norm(U), np.linalg.norm(V)
    if nu < tol or nv < tol:
        return nu < tol and nv < tol
    return abs(abs(np.vdot(U, V)) / (nu * nv) - 1.0) <= tol


def semantic_equal(p1, p2, mode: str = "per_branch", tol: float = TOL) -> bool:
    """Compare semantics.

    ``per_branch``: every ``A_s`` entrywise. ``per_branch_phase``: every
    ``A_s`` up to its own global phase, i.e. equal branch maps on density
    matrices; this is what the MX rule preserves, since
    ``<+-_a| X = +-e^{-ia} <+-_{-a}|``. ``choi``: equal cptp maps.
    """
    b1, b2 = _maps_of(p1), _maps_of(p2)
    if (len(b1.inputs), len(b1.outputs)) != (len(b2.inputs), len(b2.outputs)):
        raise DimensionError("patterns have different input/output sizes")
    mode = mode.replace("-", "_")
    if mode in ("per_branch", "per_branch_phase"):
        if len(b1.measured_order) != len(b2.measured_order):
            raise DimensionError("per-branch comparison needs equal measurement counts")
        if mode == "per_branch":
            return all(np.max(np.abs(b1.maps[k] - b2.maps[k])) <= tol for k in b1.maps)
        return all(equal_up_to_phase(b1.maps[k], b2.maps[k], tol) for k in b1.maps)
    if mode == "choi":
        return bool(np.max(np.abs(choi(b1) - choi(b2))) <= tol)
    raise PatternError(f"unknown comparison mode {mode!r}")


def basis_state(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2) if bits else 0] = 1.0
    return v


def plus_state(n: int) -> np.ndarray:
    return np.full(2 ** n, 2 ** (-n / 2), dtype=complex)
