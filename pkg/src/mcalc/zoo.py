"""Pattern families with reference unitaries, built from the generators J(a) and CZ."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .core import (
    E, M, X, Z, Angle, AngleLike, DependentAngle, Pattern, PatternError, Signal, ZERO,
    compose, identity, relabel, tensor,
)

FAMILIES = ("J", "CZ", "H", "Rx", "Rz", "P", "Rz5", "Rot", "CNOT", "Teleport", "GHZ", "CU")

# ---------------------------------------------------------------------- matrices

I2 = np.eye(2, dtype=complex)
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PX = np.array([[0, 1], [1, 0]], dtype=complex)
PZ = np.diag([1, -1]).astype(complex)
CZ_MAT = np.diag([1, 1, 1, -1]).astype(complex)
CNOT_MAT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def _rad(a: AngleLike) -> float:
    return Angle.coerce(a).radians


def j_matrix(alpha: AngleLike) -> np.ndarray:
    e = np.exp(1j * _rad(alpha))
    return np.array([[1, e], [1, -e]], dtype=complex) / np.sqrt(2)


def phase_matrix(alpha: AngleLike) -> np.ndarray:
    return np.diag([1, np.exp(1j * _rad(alpha))]).astype(complex)


def rx_matrix(alpha: AngleLike) -> np.ndarray:
    a = _rad(alpha)
    return np.cos(a / 2) * I2 - 1j * np.sin(a / 2) * PX


def rz_matrix(alpha: AngleLike) -> np.ndarray:
    a = _rad(alpha)
    return np.diag([np.exp(-1j * a / 2), np.exp(1j * a / 2)])


def ghz_state(n: int) -> np.ndarray:
    v = np.zeros(2 ** n, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return v


# ---------------------------------------------------------------------- generators


def _neg(a: AngleLike) -> Angle:
    return -Angle.coerce(a)


def J(alpha: AngleLike, i: str = "1", j: str = "2") -> Pattern:
    """``X_j^{s_i} M_i^{-alpha} E_ij``: implements J(alpha) from i to j."""
    return Pattern.build([i], [j], [E(i, j), M(i, DependentAngle(_neg(alpha))), X(j, Signal.of(i))])


def H(i: str = "1", j: str = "2") -> Pattern:
    return J(Angle.zero(), i, j)


def CZ(i: str = "1", j: str = "2") -> Pattern:
    return Pattern.build([i, j], [i, j], [E(i, j)])


def Rx(alpha: AngleLike, a: str = "1", b: str = "2", c: str = "3") -> Pattern:
    """Standard 3-qubit x-rotation ``X_3^{s2} Z_3^{s1} [M_2^{-alpha}]^{s1} M_1^0 E_23 E_12``."""
    s1, s2 = Signal.of(a), Signal.of(b)
    seq = [E(a, b), E(b, c), M(a, DependentAngle(Angle.zero())),
           M(b, DependentAngle(_neg(alpha), s1)), Z(c, s1), X(c, s2)]
    return Pattern.build([a], [c], seq)


def Rz(alpha: AngleLike, a: str = "1", b: str = "2", c: str = "3") -> Pattern:
    """Standard 3-qubit z-rotation ``X_3^{s2} Z_3^{s1} M_2^0 M_1^{-alpha} E_12 E_23``."""
    s1, s2 = Signal.of(a), Signal.of(b)
    seq = [E(b, c), E(a, b), M(a, DependentAngle(_neg(alpha))), M(b, DependentAngle(Angle.zero())),
           Z(c, s1), X(c, s2)]
    return Pattern.build([a], [c], seq)


def Rz5(alpha: AngleLike) -> Pattern:
    """Wild 5-qubit z-rotation ``H(4,5) o Rx(alpha)(2,3,4) o H(1,2)``."""
    return compose(H("4", "5"), compose(Rx(alpha, "2", "3", "4"), H("1", "2")))


def Rot(alpha: AngleLike, beta: AngleLike, gamma: AngleLike) -> Pattern:
    """Wild ``J(0)(4,5) J(-alpha)(3,4) J(-beta)(2,3) J(-gamma)(1,2)``."""
    p = J(_neg(gamma), "1", "2")
    p = compose(J(_neg(beta), "2", "3"), p)
    p = compose(J(_neg(alpha), "3", "4"), p)
    return compose(J(Angle.zero(), "4", "5"), p)


def CNOT() -> Pattern:
    """``(I(1) x H(3,4)) CZ(1,3) (I(1) x H(2,3))`` with inputs (1, 2), outputs (1, 4)."""
    first = tensor(identity("1"), H("2", "3"))
    mid = CZ("1", "3")
    last = tensor(identity("1"), H("3", "4"))
    return compose(last, compose(mid, first))


def Teleport(alpha: AngleLike = Angle.zero(), beta: AngleLike = Angle.zero()) -> Pattern:
    """Wild ``J(beta)(2,3) o J(alpha)(1,2)``."""
    return compose(J(beta, "2", "3"), J(alpha, "1", "2"))


def GHZ(n: int) -> Pattern:
    """Preparation of the n-qubit GHZ state on outputs ``1, 2', ..., n'``."""
    if n < 2:
        raise PatternError("GHZ needs n >= 2")
    seq = [E("1", "2")]
    for k in range(2, n + 1):
        q, qp = str(k), f"{k}'"
        if k > 2:
            seq.append(E(f"{k - 1}'", q))
        seq += [E(q, qp), M(q, DependentAngle(Angle.zero())), X(qp, Signal.of(q))]
    outputs = ["1"] + [f"{k}'" for k in range(2, n + 1)]
    return Pattern.build([], outputs, seq)


_CU_CHAIN = "abcdefghijk"


def _cu_angles(alpha, beta, gamma, delta):
    """The J parameters along the target chain a..j and the control chain A, B."""
    a, b, g, d = (Angle.coerce(x) for x in (alpha, beta, gamma, delta))
    # halving is only defined on a representative, so halve each parameter once
    # and build every expression from the same halves
    hb, hg, hd = b / 2, g / 2, d / 2
    half_pi = Angle.pi(1, 2)
    alpha_p = a + hb + hg + hd
    target = [
        -hb + hd - half_pi, Angle.zero(), -half_pi - hd - hb, hg, half_pi,
        Angle.zero(), -half_pi, -hg, b + Angle.pi(1), Angle.zero(),
    ]
    control = [alpha_p, Angle.zero()]
    return target, control


def CU(alpha: AngleLike, beta: AngleLike, gamma: AngleLike, delta: AngleLike) -> Pattern:
    """Wild 14-qubit controlled-U; inputs (A, a) = (control, target), outputs (C, k).

    The target runs J's along a..k with CZ(A, b) and CZ(A, f) interleaved; the
    control runs J(alpha') then J(0) along A, B, C.
    """
    target, control = _cu_angles(alpha, beta, gamma, delta)
    seq = []
    for n, theta in enumerate(target):
        i, j = _CU_CHAIN[n], _CU_CHAIN[n + 1]
        seq += [E(i, j), M(i, DependentAngle(_neg(theta))), X(j, Signal.of(i))]
        if j in "bf":
            seq.append(E("A", j))
    for i, j, theta in (("A", "B", control[0]), ("B", "C", control[1])):
        seq += [E(i, j), M(i, DependentAngle(_neg(theta))), X(j, Signal.of(i))]
    return Pattern.build(["A", "a"], ["C", "k"], seq)


def cu_reference(alpha, beta, gamma, delta) -> np.ndarray:
    """The J-decomposition multiplied out; equals diag(I, U) up to phase with the control as first factor."""
    target, control = _cu_angles(alpha, beta, gamma, delta)
    U = np.eye(4, dtype=complex)
    for n, theta in enumerate(target):
        U = np.kron(I2, j_matrix(theta)) @ U
        if _CU_CHAIN[n + 1] in "bf":
            U = CZ_MAT @ U
    for theta in control:
        U = np.kron(j_matrix(theta), I2) @ U
    return U


# ---------------------------------------------------------------------- registry


@dataclass(frozen=True)
class ZooEntry:
    pattern: Pattern
    reference: Optional[np.ndarray]


def make(family: str, *params) -> ZooEntry:
    """Build a family instance together with its reference unitary (or target state for GHZ)."""
    f = family.strip()
    try:
        if f == "J":
            (a,) = params
            return ZooEntry(J(a), j_matrix(a))
        if f == "CZ":
            return ZooEntry(CZ(), CZ_MAT)
        if f == "H":
            return ZooEntry(H(), HAD)
        if f == "Rx":
            (a,) = params
            return ZooEntry(Rx(a), rx_matrix(a))
        if f == "Rz":
            (a,) = params
            return ZooEntry(Rz(a), rz_matrix(a))
        if f == "P":
            (a,) = params
            return ZooEntry(Rz(a), phase_matrix(a))
        if f == "Rz5":
            (a,) = params
            return ZooEntry(Rz5(a), rz_matrix(a))
        if f == "Rot":
            a, b, g = params
            ref = j_matrix(0.0) @ j_matrix(_neg(a)) @ j_matrix(_neg(b)) @ j_matrix(_neg(g))
            return ZooEntry(Rot(a, b, g), ref)
        if f == "CNOT":
            return ZooEntry(CNOT(), CNOT_MAT)
        if f == "Teleport":
            a, b = params if params else (Angle.zero(), Angle.zero())
            return ZooEntry(Teleport(a, b), j_matrix(b) @ j_matrix(a))
        if f == "GHZ":
            (n,) = params
            return ZooEntry(GHZ(int(n)), ghz_state(int(n)).reshape(-1, 1))
        if f == "CU":
            a, b, g, d = params
            return ZooEntry(CU(a, b, g, d), cu_reference(a, b, g, d))
    except ValueError as exc:
        raise PatternError(f"wrong number of parameters for {f}: {exc}") from exc
    raise PatternError(f"unknown family {family!r}; known: {', '.join(FAMILIES)}")
