"""The Alice/Bob scenario: measure, collapse, run Bob's machine, compare mixtures."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .core import (
    DensityMatrix,
    PauliDecomposition,
    StateVector,
    helstrom_probability,
    partial_trace,
    pauli_decompose,
    tensor,
    trace_distance,
)
from .machines import (
    PAIR_BRANCHES,
    SINGLE_BRANCHES,
    Branch,
    BranchMachine,
    LinearChannel,
    apply_branch,
    apply_channel,
)
from .resources import QubitBasis, singlet, two_singlets

SIGNAL_TOL = 1e-10


class ConsistencyError(RuntimeError):
    """A linear channel produced basis dependence: an implementation bug, not physics."""


@dataclass(frozen=True)
class MeasurementBranch:
    probability: float
    alice_outcome: Branch
    bob_branch: Branch
    bob_state: StateVector


def _collapse(state: StateVector, alice: Sequence[int], outcome: Branch, basis: QubitBasis):
    """Project Alice's qubits onto ``outcome``; return (probability, Bob's normalised state)."""
    n = state.num_qubits
    t = state.amplitudes.reshape((2,) * n)
    # contract Alice's qubits from the highest axis down so lower indices stay valid
    axes = sorted(((state.register.index(q), m) for q, m in zip(alice, outcome)), reverse=True)
    for axis, member in axes:
        bra = basis.state(member, 1).amplitudes.conj()
        t = np.tensordot(t, bra, axes=([axis], [0]))
    v = t.reshape(-1)
    p = float(np.vdot(v, v).real)
    bob = tuple(q for q in state.register if q not in alice)
    return p, StateVector(bob, v / np.sqrt(p))


def alice_branches(basis: QubitBasis) -> list[MeasurementBranch]:
    """Alice measures qubits 1 and 3 of the two singlets in ``basis``.

    Outcome ``(x, y)`` leaves Bob's qubits (2, 4) in the complementary pair.
    Order: (psi, psi), (psibar, psibar), (psibar, psi), (psi, psibar).
    """
    state = two_singlets()
    out = []
    for x, y in (PAIR_BRANCHES[0], PAIR_BRANCHES[1], PAIR_BRANCHES[3], PAIR_BRANCHES[2]):
        p, bob = _collapse(state, (1, 3), (x, y), basis)
        out.append(MeasurementBranch(p, (x, y), (x.other, y.other), bob))
    return out


def single_pair_branches(basis: QubitBasis) -> list[MeasurementBranch]:
    """Alice measures qubit 1 of one singlet; Bob holds qubit 2."""
    state = singlet(1, 2)
    out = []
    for (x,) in SINGLE_BRANCHES:
        p, bob = _collapse(state, (1,), (x,), basis)
        out.append(MeasurementBranch(p, (x,), (x.other,), bob))
    return out


def measurement_branches(machine: BranchMachine, basis: QubitBasis) -> list[MeasurementBranch]:
    if machine.kind == "clone":
        return single_pair_branches(basis)
    return alice_branches(basis)


def bob_reduced_state(machine: BranchMachine, basis: QubitBasis) -> DensityMatrix:
    """Bob's (2, 4) state with Alice's outcome unknown: branch average, ancilla traced out.

    Cloners use the one-singlet scenario; every other machine uses two singlets.
    """
    rho = np.zeros((4, 4), dtype=complex)
    for br in measurement_branches(machine, basis):
        out = apply_branch(machine, basis, br.bob_branch)
        rho += br.probability * partial_trace(out.density(), {5}).matrix
    return DensityMatrix((2, 4), rho)


def offdiag_states(machine: BranchMachine, basis: QubitBasis) -> tuple[np.ndarray, np.ndarray]:
    """Ancilla-traced images of the two non-identical branches of a deleting machine."""
    if machine.kind != "delete":
        raise ValueError(f"off-diagonal states only exist for delete machines, not {machine.kind}")
    first, second = machine.offdiag_rule(basis, machine.ancilla_init)
    return (partial_trace(first.density(), {5}).matrix,
            partial_trace(second.density(), {5}).matrix)


def alice_marginal(machine: BranchMachine, basis: QubitBasis) -> DensityMatrix:
    """Alice's reduced state after her measurement and Bob's machine, no communication."""
    rho = None
    for br in measurement_branches(machine, basis):
        alice = tensor(*(basis.state(m, q) for m, q in zip(br.alice_outcome, (1, 3))))
        joint = tensor(alice, apply_branch(machine, basis, br.bob_branch)).density()
        term = br.probability * partial_trace(joint, {2, 4, 5}).matrix
        rho = term if rho is None else rho + term
    return DensityMatrix(alice.register, rho)


def encoded_bit(basis: QubitBasis) -> str:
    """Pre-agreed encoding: the computational basis means '0', any other basis '1'."""
    return "0" if abs(np.sin(basis.theta)) < 1e-12 else "1"


@dataclass(frozen=True)
class SignallingReport:
    basis_a: QubitBasis
    basis_b: QubitBasis
    rho_a: DensityMatrix
    rho_b: DensityMatrix
    distance: float
    discrimination_probability: float
    pauli_a: PauliDecomposition
    pauli_b: PauliDecomposition
    verdict: str
    tolerance: float = SIGNAL_TOL

    @property
    def bits(self) -> tuple[str, str]:
        return encoded_bit(self.basis_a), encoded_bit(self.basis_b)


def compare(basis_a, basis_b, rho_a, rho_b, tolerance=SIGNAL_TOL) -> SignallingReport:
    d = trace_distance(rho_a, rho_b)
    return SignallingReport(
        basis_a=basis_a,
        basis_b=basis_b,
        rho_a=rho_a,
        rho_b=rho_b,
        distance=d,
        discrimination_probability=helstrom_probability(d),
        pauli_a=pauli_decompose(rho_a),
        pauli_b=pauli_decompose(rho_b),
        verdict="signalling" if d > tolerance else "no-signalling",
        tolerance=tolerance,
    )


def signalling_report(machine: BranchMachine, basis_a: QubitBasis, basis_b: QubitBasis,
                      tolerance: float = SIGNAL_TOL) -> SignallingReport:
    return compare(basis_a, basis_b,
                   bob_reduced_state(machine, basis_a),
                   bob_reduced_state(machine, basis_b), tolerance)


def channel_reduced_state(channel: LinearChannel, basis: QubitBasis) -> DensityMatrix:
    """Branch average of the channel applied to each of Bob's conditional states."""
    rho = np.zeros((4, 4), dtype=complex)
    for br in alice_branches(basis):
        rho += br.probability * apply_channel(channel, br.bob_state.density()).matrix
    return DensityMatrix((2, 4), rho)


def cptp_control(channel: LinearChannel, basis_a: QubitBasis, basis_b: QubitBasis,
                 tolerance: float = SIGNAL_TOL) -> SignallingReport:
    """No-signalling control; a linear channel that signals raises :class:`ConsistencyError`."""
    report = compare(basis_a, basis_b,
                     channel_reduced_state(channel, basis_a),
                     channel_reduced_state(channel, basis_b), tolerance)
    if report.distance >= tolerance:
        raise ConsistencyError(
            f"linear channel gave trace distance {report.distance:.3e} between "
            f"theta={basis_a.theta!r} and theta={basis_b.theta!r}")
    return report


def cloning_protocol(machine: BranchMachine, basis_a: QubitBasis, basis_b: QubitBasis,
                     tolerance: float = SIGNAL_TOL) -> SignallingReport:
    if machine.kind != "clone":
        raise ValueError(f"cloning protocol needs a clone machine, got {machine.kind!r}")
    return signalling_report(machine, basis_a, basis_b, tolerance)


Device = Union[BranchMachine, LinearChannel]


def report_for(device: Device, basis_a, basis_b, tolerance=SIGNAL_TOL) -> SignallingReport:
    if isinstance(device, LinearChannel):
        return cptp_control(device, basis_a, basis_b, tolerance)
    return signalling_report(device, basis_a, basis_b, tolerance)


@dataclass(frozen=True)
class Sweep:
    reports: tuple[SignallingReport, ...]
    argmax: int
    max_distance: float


def sweep(device: Device, grid: Sequence[QubitBasis], reference: QubitBasis,
          tolerance: float = SIGNAL_TOL, max_workers: int | None = None) -> Sweep:
    """One report per grid point against ``reference``; ties in the argmax go to the lowest index."""
    if not grid:
        raise ValueError("sweep grid is empty")

    def one(basis):
        return report_for(device, reference, basis, tolerance)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            reports = tuple(pool.map(one, grid))
    else:
        reports = tuple(map(one, grid))
    best = argmax_distance([r.distance for r in reports])
    return Sweep(reports, best, reports[best].distance)


def argmax_distance(distances: Sequence[float], tie: float = 1e-12) -> int:
    """Lowest index whose distance is within ``tie`` of the maximum."""
    top = max(distances)
    return next(i for i, d in enumerate(distances) if d >= top - tie)


def uniform_grid(points: int = 64) -> list[QubitBasis]:
    return [QubitBasis(2 * np.pi * k / points) for k in range(points)]
