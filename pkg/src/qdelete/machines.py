"""Bob-side machines.

Two families live here. Branch machines are the hypothetical nonlinear devices
(deleting, cloning) plus erasure; they are defined only on product inputs built
from a given basis, and are never extended linearly to superpositions. Linear
channels are ordinary Kraus maps used as no-signalling controls.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy.stats import unitary_group

from .core import ATOL, PAULI_I, PAULIS, DensityMatrix, StateError, StateVector, tensor
from .resources import Member, QubitBasis

Branch = tuple[Member, ...]

PSI, BAR = Member.PSI, Member.PSI_BAR
PAIR_BRANCHES: tuple[Branch, ...] = ((PSI, PSI), (BAR, BAR), (PSI, BAR), (BAR, PSI))
SINGLE_BRANCHES: tuple[Branch, ...] = ((PSI,), (BAR,))
BOB = (2, 4, 5)

KINDS = ("delete", "erase", "clone", "custom")


def as_state(value, label: int) -> StateVector:
    """Coerce a StateVector or raw amplitudes into a state on ``(label,)``."""
    if isinstance(value, StateVector):
        if value.num_qubits != 1:
            raise StateError(f"expected a 1-qubit state, got register {value.register}")
        return value.relabel((label,))
    return StateVector((label,), np.asarray(value, dtype=complex))


def _as_bob_state(value) -> StateVector:
    if isinstance(value, StateVector):
        if value.num_qubits != 3:
            raise StateError(f"expected a 3-qubit state, got register {value.register}")
        return value.relabel(BOB)
    return StateVector(BOB, np.asarray(value, dtype=complex))


# ---------------------------------------------------------------------------
# configurable rules

@dataclass(frozen=True)
class CopyAncilla:
    """Final ancilla carries the basis member itself: A_psi = psi, A_psibar = psibar."""

    name: str = "copy"

    def __call__(self, basis: QubitBasis, member: Member) -> StateVector:
        return basis.state(member, 5)

    def describe(self) -> dict:
        return {"name": self.name}


@dataclass(frozen=True)
class ConstantAncilla:
    """Fixed final ancilla states, independent of the basis."""

    psi: StateVector
    psibar: StateVector
    name: str = "constant"

    def __post_init__(self):
        object.__setattr__(self, "psi", as_state(self.psi, 5))
        object.__setattr__(self, "psibar", as_state(self.psibar, 5))

    def __call__(self, basis, member):
        return self.psi if member is PSI else self.psibar

    def describe(self) -> dict:
        return {"name": self.name, "psi": self.psi.amplitudes, "psibar": self.psibar.amplitudes}


@dataclass(frozen=True)
class PassthroughRule:
    """Non-identical inputs leave the machine untouched."""

    name: str = "passthrough"

    def __call__(self, basis: QubitBasis, ancilla: StateVector) -> tuple[StateVector, StateVector]:
        a = ancilla.relabel((5,))
        one = tensor(basis.state(PSI, 2), basis.state(BAR, 4), a)
        two = tensor(basis.state(BAR, 2), basis.state(PSI, 4), a)
        return one, two

    def describe(self) -> dict:
        return {"name": self.name}


@dataclass(frozen=True)
class EntanglingRule:
    """Non-identical inputs go to the symmetric / antisymmetric combinations."""

    name: str = "entangling"

    def __call__(self, basis, ancilla):
        one, two = PassthroughRule()(basis, ancilla)
        plus = (one.amplitudes + two.amplitudes) / np.sqrt(2)
        minus = (one.amplitudes - two.amplitudes) / np.sqrt(2)
        return StateVector(BOB, plus), StateVector(BOB, minus)

    def describe(self) -> dict:
        return {"name": self.name}


@dataclass(frozen=True)
class FixedOffdiag:
    """Basis-independent outputs for the two non-identical branches."""

    first: StateVector
    second: StateVector
    name: str = "inline"

    def __post_init__(self):
        object.__setattr__(self, "first", _as_bob_state(self.first))
        object.__setattr__(self, "second", _as_bob_state(self.second))

    def __call__(self, basis, ancilla):
        return self.first, self.second

    def describe(self) -> dict:
        return {"name": self.name, "first": self.first.amplitudes, "second": self.second.amplitudes}


OFFDIAG_RULES = {"passthrough": PassthroughRule, "entangling": EntanglingRule}


# ---------------------------------------------------------------------------
# branch machines

@dataclass(frozen=True)
class BranchMachine:
    kind: str
    sigma: StateVector
    ancilla_init: StateVector
    ancilla_rule: Any = field(default_factory=CopyAncilla)
    offdiag_rule: Any = None
    rule: Callable[[QubitBasis, Branch], Any] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown machine kind {self.kind!r}")
        object.__setattr__(self, "sigma", as_state(self.sigma, 4))
        object.__setattr__(self, "ancilla_init", as_state(self.ancilla_init, 5))
        if self.kind == "custom" and self.rule is None:
            raise ValueError("custom machine needs a branch rule")

    @property
    def branches(self) -> tuple[Branch, ...]:
        return SINGLE_BRANCHES if self.kind == "clone" else PAIR_BRANCHES

    def describe(self) -> dict:
        out = {
            "kind": self.kind,
            "sigma": self.sigma.amplitudes,
            "ancilla_init": self.ancilla_init.amplitudes,
        }
        if self.kind in ("delete", "clone"):
            out["ancilla_rule"] = self.ancilla_rule.describe()
        if self.kind == "delete":
            out["offdiag_rule"] = self.offdiag_rule.describe()
        if self.kind == "custom":
            out["rule"] = getattr(self.rule, "__name__", repr(self.rule))
        return out


def deleting_machine(sigma=None, ancilla_init=None, offdiag_rule=None, ancilla_rule=None) -> BranchMachine:
    """Deleting machine: two identical copies become one copy plus the blank state.

    Defaults: blank ``|0>``, ancilla ``|0>``, passthrough on non-identical
    inputs and :class:`CopyAncilla`. ``offdiag_rule`` may also be a rule name.
    """
    if offdiag_rule is None:
        offdiag_rule = PassthroughRule()
    elif isinstance(offdiag_rule, str):
        try:
            offdiag_rule = OFFDIAG_RULES[offdiag_rule]()
        except KeyError:
            raise ValueError(f"unknown off-diagonal rule {offdiag_rule!r}") from None
    return BranchMachine(
        kind="delete",
        sigma=[1, 0] if sigma is None else sigma,
        ancilla_init=[1, 0] if ancilla_init is None else ancilla_init,
        ancilla_rule=ancilla_rule or CopyAncilla(),
        offdiag_rule=offdiag_rule,
    )


def erasure_machine(sigma=None) -> BranchMachine:
    """Erasure by swapping the blank state into slot 4; the ancilla starts as the blank."""
    sigma = as_state([1, 0] if sigma is None else sigma, 4)
    return BranchMachine(kind="erase", sigma=sigma, ancilla_init=sigma.relabel((5,)))


def cloning_machine(ancilla_rule=None, sigma=None, ancilla_init=None) -> BranchMachine:
    """Cloner acting on one input qubit (2), a blank slot (4) and an ancilla (5)."""
    return BranchMachine(
        kind="clone",
        sigma=[1, 0] if sigma is None else sigma,
        ancilla_init=[1, 0] if ancilla_init is None else ancilla_init,
        ancilla_rule=ancilla_rule or CopyAncilla(),
    )


def custom_machine(rule, sigma=None, ancilla_init=None) -> BranchMachine:
    """Arbitrary per-branch image; ``rule(basis, branch)`` returns a state on (2, 4, 5)."""
    return BranchMachine(
        kind="custom",
        sigma=[1, 0] if sigma is None else sigma,
        ancilla_init=[1, 0] if ancilla_init is None else ancilla_init,
        rule=rule,
    )


def identity_machine(ancilla_init=None) -> BranchMachine:
    """Does nothing: every branch input comes out unchanged."""

    def untouched(basis, branch):
        return tensor(basis.state(branch[0], 2), basis.state(branch[1], 4), machine.ancilla_init)

    machine = custom_machine(untouched, ancilla_init=ancilla_init)
    return machine


SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
SWAP_45 = np.kron(np.eye(2), SWAP)


def branch_input(machine: BranchMachine, basis: QubitBasis, branch: Branch) -> StateVector:
    """The product state on (2, 4, 5) that enters the machine for ``branch``."""
    _check_branch(machine, branch)
    if machine.kind == "clone":
        return tensor(basis.state(branch[0], 2), machine.sigma, machine.ancilla_init)
    return tensor(basis.state(branch[0], 2), basis.state(branch[1], 4), machine.ancilla_init)


def _check_branch(machine, branch):
    if branch not in machine.branches:
        raise ValueError(f"branch {branch} not defined for a {machine.kind} machine")


def apply_branch(machine: BranchMachine, basis: QubitBasis, branch: Branch) -> StateVector:
    """Image of the product input labelled ``branch`` under ``machine``; register (2, 4, 5)."""
    _check_branch(machine, branch)
    kind = machine.kind
    if kind == "delete":
        x, y = branch
        if x is y:
            out = tensor(basis.state(x, 2), machine.sigma, machine.ancilla_rule(basis, x))
        else:
            first, second = machine.offdiag_rule(basis, machine.ancilla_init)
            out = first if x is PSI else second
    elif kind == "erase":
        psi_in = branch_input(machine, basis, branch)
        out = StateVector(BOB, SWAP_45 @ psi_in.amplitudes)
    elif kind == "clone":
        (x,) = branch
        out = tensor(basis.state(x, 2), basis.state(x, 4), machine.ancilla_rule(basis, x))
    else:
        out = machine.rule(basis, branch)
    if isinstance(out, StateVector) and out.register != BOB:
        return out.reorder(BOB)
    return _as_bob_state(out)


def linear_extension(machine: BranchMachine, rule_basis: QubitBasis, basis: QubitBasis,
                     branch: Branch) -> np.ndarray:
    """Apply the branch rules learned at ``rule_basis`` as one linear map to an input at ``basis``.

    The rule-basis inputs span the subspace with the ancilla in its initial
    state, so the map is fixed there by ``sum_b |out_b><in_b|``.
    """
    L = np.zeros((8, 8), dtype=complex)
    for b in machine.branches:
        inp = branch_input(machine, rule_basis, b).amplitudes
        out = apply_branch(machine, rule_basis, b).amplitudes
        L += np.outer(out, inp.conj())
    return L @ branch_input(machine, basis, branch).amplitudes


# ---------------------------------------------------------------------------
# linear channels

@dataclass(frozen=True)
class LinearChannel:
    """Trace-preserving Kraus map on Bob's qubits (2, 4)."""

    kraus: tuple[np.ndarray, ...]
    register: tuple[int, ...] = (2, 4)

    def __post_init__(self):
        ks = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise ValueError("a channel needs at least one Kraus operator")
        d = 2 ** len(self.register)
        for k in ks:
            if k.shape != (d, d):
                raise ValueError(f"Kraus operator of shape {k.shape}, expected {(d, d)}")
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ks)
        check_completeness(self)

    def completeness_residual(self) -> float:
        total = sum(k.conj().T @ k for k in self.kraus)
        return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def check_completeness(ch: LinearChannel) -> None:
    res = ch.completeness_residual()
    if res > ATOL:
        raise ValueError(f"Kraus operators not trace preserving (residual {res:.3e})")


def random_cptp_channel(num_kraus: int, seed: int) -> LinearChannel:
    """Kraus operators sliced from the first four columns of a seeded Haar unitary."""
    if num_kraus < 1:
        raise ValueError("num_kraus must be >= 1")
    U = unitary_group.rvs(4 * num_kraus, random_state=np.random.default_rng(seed))
    U = np.atleast_2d(U)
    V = U[:, :4]
    return LinearChannel(tuple(V[4 * i:4 * (i + 1)] for i in range(num_kraus)))


def identity_channel() -> LinearChannel:
    return LinearChannel((np.eye(4),))


def depolarizing_channel(p: float = 1.0) -> LinearChannel:
    """Two-qubit depolarizing channel; ``p = 1`` maps every state to I/4."""
    ops = [PAULI_I, *PAULIS]
    kraus = [np.sqrt(1 - p + p / 16) * np.eye(4)]
    kraus += [np.sqrt(p / 16) * np.kron(a, b) for i, a in enumerate(ops) for j, b in enumerate(ops) if i or j]
    return LinearChannel(tuple(kraus))


def apply_channel(ch: LinearChannel, rho: DensityMatrix) -> DensityMatrix:
    if rho.register != ch.register:
        raise ValueError(f"channel acts on {ch.register}, state lives on {rho.register}")
    check_completeness(ch)
    out = sum(k @ rho.matrix @ k.conj().T for k in ch.kraus)
    return DensityMatrix(rho.register, out)
