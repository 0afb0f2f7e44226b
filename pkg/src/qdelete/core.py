"""Dense state vectors and density matrices over labelled qubits.

Registers are explicit tuples of integer labels (1..5). The first label is the
most significant bit of the computational-basis index, matching ``np.kron``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

ATOL = 1e-12
PSD_FLOOR = -1e-10
MAX_QUBITS = 5
LABELS = range(1, MAX_QUBITS + 1)

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


class RegisterError(ValueError):
    """Invalid, colliding or mismatched qubit labels."""


class StateError(ValueError):
    """Amplitudes or matrix entries violate the state invariants."""


def _check_register(register: Iterable[int]) -> tuple[int, ...]:
    reg = tuple(int(q) for q in register)
    if len(set(reg)) != len(reg):
        raise RegisterError(f"duplicate labels in register {reg}")
    bad = [q for q in reg if q not in LABELS]
    if bad:
        raise RegisterError(f"labels {bad} outside 1..{MAX_QUBITS}")
    return reg


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateVector:
    register: tuple[int, ...]
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        reg = _check_register(self.register)
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.size != 2 ** len(reg):
            raise StateError(f"{amps.size} amplitudes for {len(reg)} qubits")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > ATOL:
            raise StateError(f"state not normalised: |psi|^2 = {norm!r}")
        object.__setattr__(self, "register", reg)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return len(self.register)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.register, np.outer(self.amplitudes, self.amplitudes.conj()))

    def relabel(self, register: Sequence[int]) -> "StateVector":
        """Same amplitudes, new labels (positionally)."""
        return StateVector(tuple(register), self.amplitudes)

    def reorder(self, register: Sequence[int]) -> "StateVector":
        perm = _permutation(self.register, register)
        psi = self.amplitudes.reshape((2,) * self.num_qubits).transpose(perm)
        return StateVector(tuple(register), psi.reshape(-1))


@dataclass(frozen=True)
class DensityMatrix:
    register: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        reg = _check_register(self.register)
        rho = _frozen(self.matrix)
        d = 2 ** len(reg)
        if rho.shape != (d, d):
            raise StateError(f"matrix shape {rho.shape} does not fit {len(reg)} qubits")
        herm = np.max(np.abs(rho - rho.conj().T)) if d else 0.0
        if herm > ATOL:
            raise StateError(f"matrix not Hermitian (residual {herm:.3e})")
        tr = np.trace(rho)
        if abs(tr - 1.0) > ATOL:
            raise StateError(f"trace {tr.real!r} != 1")
        low = np.linalg.eigvalsh(rho).min()
        if low < PSD_FLOOR:
            raise StateError(f"negative eigenvalue {low:.3e}")
        object.__setattr__(self, "register", reg)
        object.__setattr__(self, "matrix", rho)

    @property
    def num_qubits(self) -> int:
        return len(self.register)

    def reorder(self, register: Sequence[int]) -> "DensityMatrix":
        perm = _permutation(self.register, register)
        n = self.num_qubits
        t = self.matrix.reshape((2,) * (2 * n))
        t = t.transpose(perm + [n + p for p in perm])
        return DensityMatrix(tuple(register), t.reshape(2**n, 2**n))


def _permutation(old: Sequence[int], new: Sequence[int]) -> list[int]:
    if sorted(old) != sorted(new):
        raise RegisterError(f"cannot reorder {tuple(old)} into {tuple(new)}")
    return [list(old).index(q) for q in new]


def ket(bits: str, register: Sequence[int]) -> StateVector:
    """Computational basis state, e.g. ``ket("01", (1, 2))``."""
    if len(bits) != len(register):
        raise RegisterError(f"{len(bits)} bits for register {tuple(register)}")
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[int(bits, 2) if bits else 0] = 1.0
    return StateVector(tuple(register), amps)


def maximally_mixed(register: Sequence[int]) -> DensityMatrix:
    d = 2 ** len(register)
    return DensityMatrix(tuple(register), np.eye(d) / d)


def tensor_product(a, b):
    """Kronecker product of two states of the same kind on disjoint registers."""
    overlap = set(a.register) & set(b.register)
    if overlap:
        raise RegisterError(f"label collision: {sorted(overlap)}")
    register = a.register + b.register
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(register, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(register, np.kron(a.matrix, b.matrix))
    raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")


def tensor(*states):
    out = states[0]
    for s in states[1:]:
        out = tensor_product(out, s)
    return out


def partial_trace(rho: DensityMatrix, discard: Iterable[int]) -> DensityMatrix:
    """Trace out the qubits in ``discard``; kept labels stay in their original order.

    Discarding every qubit yields the 1x1 matrix ``[[1]]`` on the empty register.
    """
    discard = set(discard)
    unknown = discard - set(rho.register)
    if unknown:
        raise RegisterError(f"labels {sorted(unknown)} not in register {rho.register}")
    if not discard:
        return rho
    n = rho.num_qubits
    keep = [i for i, q in enumerate(rho.register) if q not in discard]
    gone = [i for i, q in enumerate(rho.register) if q in discard]
    t = rho.matrix.reshape((2,) * (2 * n))
    t = t.transpose(keep + gone + [n + i for i in keep] + [n + i for i in gone])
    dk, dg = 2 ** len(keep), 2 ** len(gone)
    reduced = np.einsum("igjg->ij", t.reshape(dk, dg, dk, dg))
    return DensityMatrix(tuple(rho.register[i] for i in keep), reduced)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Half the sum of absolute eigenvalues of ``rho - sigma``."""
    if rho.register != sigma.register:
        raise RegisterError(f"register mismatch: {rho.register} vs {sigma.register}")
    eig = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(min(1.0, 0.5 * np.abs(eig).sum()))


def helstrom_probability(distance: float) -> float:
    """Optimal single-shot success probability for two equiprobable states."""
    return 0.5 * (1.0 + distance)


@dataclass(frozen=True)
class PauliDecomposition:
    """Two-qubit state as local Bloch vectors plus a correlation matrix.

    ``rho = (I + m.sigma x I + I x n.sigma + sum_ij C_ij sigma_i x sigma_j) / 4``
    """

    m: np.ndarray
    n: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float).reshape(3)
        n = np.array(self.n, dtype=float).reshape(3)
        C = np.array(self.C, dtype=float).reshape(3, 3)
        for name, v in (("m", m), ("n", n)):
            if np.linalg.norm(v) > 1 + 1e-10:
                raise StateError(f"|{name}| = {np.linalg.norm(v):.6g} exceeds 1")
        for name, v in (("m", m), ("n", n), ("C", C)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)


def pauli_decompose(rho: DensityMatrix) -> PauliDecomposition:
    if rho.num_qubits != 2:
        raise RegisterError(f"need a 2-qubit state, got register {rho.register}")
    M = rho.matrix

    def expect(op):
        val = np.trace(M @ op)
        if abs(val.imag) > ATOL:
            raise StateError(f"complex Pauli expectation {val}")
        return val.real

    m = [expect(np.kron(s, PAULI_I)) for s in PAULIS]
    n = [expect(np.kron(PAULI_I, s)) for s in PAULIS]
    C = [[expect(np.kron(si, sj)) for sj in PAULIS] for si in PAULIS]
    return PauliDecomposition(np.array(m), np.array(n), np.array(C))


def pauli_reconstruct(d: PauliDecomposition, register: Sequence[int] = (2, 4)) -> DensityMatrix:
    M = np.kron(PAULI_I, PAULI_I).copy()
    for i, s in enumerate(PAULIS):
        M += d.m[i] * np.kron(s, PAULI_I) + d.n[i] * np.kron(PAULI_I, s)
        for j, t in enumerate(PAULIS):
            M += d.C[i, j] * np.kron(s, t)
    return DensityMatrix(tuple(register), M / 4)


def align_phase(psi: np.ndarray, index: int | None = None) -> np.ndarray:
    """Rotate the global phase so one amplitude is real positive.

    By default the largest-magnitude amplitude is used; pass ``index`` to pin it
    when comparing two vectors whose largest entries tie.
    """
    psi = np.asarray(psi, dtype=complex)
    k = int(np.argmax(np.abs(psi))) if index is None else index
    if abs(psi[k]) == 0:
        return psi
    return psi * (abs(psi[k]) / psi[k])


def phase_residual(a: StateVector, b: StateVector) -> float:
    """Max amplitude difference after global-phase alignment."""
    if a.register != b.register:
        b = b.reorder(a.register)
    k = int(np.argmax(np.abs(a.amplitudes)))
    return float(np.max(np.abs(align_phase(a.amplitudes, k) - align_phase(b.amplitudes, k))))
