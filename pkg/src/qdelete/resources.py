"""Entangled resources and the tilted qubit basis shared by Alice and Bob."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import RegisterError, StateVector, tensor

TWO_PI = 2 * np.pi


class Member(enum.Enum):
    """Which element of the basis pair a qubit is found in."""

    PSI = "psi"
    PSI_BAR = "psibar"

    @property
    def other(self) -> "Member":
        return Member.PSI_BAR if self is Member.PSI else Member.PSI


@dataclass(frozen=True)
class QubitBasis:
    """Orthonormal pair ``cos(t/2)|0> + e^{i p} sin(t/2)|1>`` and its complement.

    ``phi`` defaults to 0, which gives the real family used throughout the
    deleting scenario; non-zero ``phi`` only widens the control sweeps.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        for name in ("theta", "phi"):
            v = float(getattr(self, name))
            if not (0.0 <= v < TWO_PI):
                raise ValueError(f"{name}={v!r} outside [0, 2pi)")
            object.__setattr__(self, name, v)

    def state(self, member: Member, label: int) -> StateVector:
        psi, psibar = basis_states(self, label)
        return psi if member is Member.PSI else psibar


def basis_states(b: QubitBasis, label: int = 1) -> tuple[StateVector, StateVector]:
    c, s = np.cos(b.theta / 2), np.sin(b.theta / 2)
    if b.phi == 0.0:
        # keep the amplitudes exactly real
        psi = np.array([c, s], dtype=complex)
        psibar = np.array([s, -c], dtype=complex)
    else:
        e = np.exp(1j * b.phi)
        psi = np.array([c, e * s])
        psibar = np.array([s, -e * c])
    return StateVector((label,), psi), StateVector((label,), psibar)


def singlet(q1: int, q2: int) -> StateVector:
    """``(|01> - |10>)/sqrt(2)`` on the ordered register ``(q1, q2)``."""
    if q1 == q2:
        raise RegisterError(f"singlet needs two distinct labels, got {q1} twice")
    return StateVector((q1, q2), np.array([0, 1, -1, 0]) / np.sqrt(2))


def two_singlets() -> StateVector:
    """``|Psi-_12> |Psi-_34>`` on register (1, 2, 3, 4)."""
    return tensor(singlet(1, 2), singlet(3, 4))


# Sign and Alice/Bob member pattern of the four terms of the basis expansion.
# Each entry: (sign, alice member on 1, alice member on 3, bob member on 2, bob member on 4)
EXPANSION_TERMS = (
    (+1, Member.PSI, Member.PSI, Member.PSI_BAR, Member.PSI_BAR),
    (+1, Member.PSI_BAR, Member.PSI_BAR, Member.PSI, Member.PSI),
    (-1, Member.PSI_BAR, Member.PSI, Member.PSI, Member.PSI_BAR),
    (-1, Member.PSI, Member.PSI_BAR, Member.PSI_BAR, Member.PSI),
)


def expansion_terms(b: QubitBasis) -> list[tuple[float, StateVector]]:
    """The four weighted product kets of the expansion, each on register (1, 2, 3, 4)."""
    out = []
    for sign, a1, a3, b2, b4 in EXPANSION_TERMS:
        term = tensor(b.state(a1, 1), b.state(a3, 3), b.state(b2, 2), b.state(b4, 4))
        out.append((0.5 * sign, term.reorder((1, 2, 3, 4))))
    return out


def expand_two_singlets(b: QubitBasis) -> StateVector:
    """Rebuild both singlets from their expansion in the basis ``b``.

    Equal to :func:`two_singlets` up to a global phase for every basis.
    """
    amps = sum(coef * term.amplitudes for coef, term in expansion_terms(b))
    return StateVector((1, 2, 3, 4), amps)
