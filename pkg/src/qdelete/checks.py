"""Named invariant checks run by ``qdelete verify``.

Functions are looked up through their modules at call time, so a patched
implementation is what gets checked.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import core, machines, oracles, protocol, resources
from .resources import QubitBasis

TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    limit: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{status}  {self.name:<28} residual={self.residual:.3e} limit={self.limit:.0e}{extra}"


def random_density(rng: np.random.Generator, n: int, register=None) -> core.DensityMatrix:
    d = 2 ** n
    V = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = V @ V.conj().T
    rho = (rho + rho.conj().T) / 2
    return core.DensityMatrix(register or tuple(range(1, n + 1)), rho / np.trace(rho).real)


def random_basis(rng: np.random.Generator, with_phi: bool = False) -> QubitBasis:
    theta = rng.uniform(0, 2 * np.pi)
    phi = rng.uniform(0, 2 * np.pi) if with_phi else 0.0
    return QubitBasis(theta, phi)


def sampled_bases(rng, n_theta=100, n_both=20) -> list[QubitBasis]:
    return [random_basis(rng) for _ in range(n_theta)] + [random_basis(rng, True) for _ in range(n_both)]


def random_unitary(rng, d=2) -> np.ndarray:
    Z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def check_expansion_identity(rng):
    target = resources.two_singlets()
    return max(core.phase_residual(target, resources.expand_two_singlets(b))
               for b in sampled_bases(rng))


def check_basis_completeness(rng):
    worst = 0.0
    for b in sampled_bases(rng, 50, 50):
        psi, bar = resources.basis_states(b)
        P = np.outer(psi.amplitudes, psi.amplitudes.conj()) + np.outer(bar.amplitudes, bar.amplitudes.conj())
        worst = max(worst, np.max(np.abs(P - np.eye(2))))
    return worst


def check_singlet_invariance(rng):
    s = resources.singlet(1, 2)
    worst = 0.0
    for _ in range(50):
        U = random_unitary(rng)
        rotated = core.StateVector((1, 2), np.kron(U, U) @ s.amplitudes)
        worst = max(worst, core.phase_residual(s, rotated))
    return worst


def check_partial_trace_oracle(rng):
    worst = 0.0
    for _ in range(100):
        rho = random_density(rng, 3)
        discard = {int(q) for q in rng.choice([1, 2, 3], size=rng.integers(1, 3), replace=False)}
        fast = core.partial_trace(rho, discard).matrix
        slow = oracles.index_sum_partial_trace(rho.matrix, rho.register, discard)
        worst = max(worst, np.max(np.abs(fast - slow)))
    return worst


def check_tensor_associativity(rng):
    worst = 0.0
    for _ in range(20):
        a, b, c = random_density(rng, 1, (1,)), random_density(rng, 2, (2, 3)), random_density(rng, 1, (4,))
        left = core.tensor_product(core.tensor_product(a, b), c)
        right = core.tensor_product(a, core.tensor_product(b, c))
        worst = max(worst, np.max(np.abs(left.matrix - right.matrix)))
    return worst


def check_triangle(rng):
    worst = 0.0
    for _ in range(50):
        r, s, t = (random_density(rng, 2) for _ in range(3))
        slack = core.trace_distance(r, s) + core.trace_distance(s, t) - core.trace_distance(r, t)
        worst = max(worst, -slack)
    return max(worst, 0.0)


def check_pauli_round_trip(rng):
    worst = 0.0
    for _ in range(100):
        rho = random_density(rng, 2, (2, 4))
        back = core.pauli_reconstruct(core.pauli_decompose(rho))
        worst = max(worst, np.max(np.abs(back.matrix - rho.matrix)))
    return worst


def check_singlet_pauli(rng):
    d = core.pauli_decompose(resources.singlet(2, 4).density())
    return max(np.max(np.abs(d.m)), np.max(np.abs(d.n)), np.max(np.abs(d.C + np.eye(3))))


def check_pre_machine_marginal(rng):
    full = resources.two_singlets().density()
    worst = np.max(np.abs(core.partial_trace(full, {1, 3}).matrix - np.eye(4) / 4))
    for b in sampled_bases(rng, 20, 20):
        mix = sum(br.probability * br.bob_state.density().matrix for br in protocol.alice_branches(b))
        worst = max(worst, np.max(np.abs(mix - np.eye(4) / 4)))
    return worst


def check_branch_decomposition(rng):
    m = machines.deleting_machine()
    blank = np.kron(np.eye(2), m.sigma.density().matrix)
    worst = 0.0
    for _ in range(50):
        b = random_basis(rng)
        rho = protocol.bob_reduced_state(m, b).matrix
        r1, r2 = protocol.offdiag_states(m, b)
        worst = max(worst, np.max(np.abs(rho - blank / 4 - (r1 + r2) / 4)))
    return worst


def check_erasure_universality(rng):
    m = machines.erasure_machine()
    target = np.kron(np.eye(2) / 2, m.sigma.density().matrix)
    return max(np.max(np.abs(protocol.bob_reduced_state(m, b).matrix - target))
               for b in sampled_bases(rng, 80, 20))


def check_erasure_swap_oracle(rng):
    m = machines.erasure_machine()
    swap = np.zeros((8, 8))
    for i2, i4, i5 in np.ndindex(2, 2, 2):
        swap[4 * i2 + 2 * i5 + i4, 4 * i2 + 2 * i4 + i5] = 1
    worst = 0.0
    for b in sampled_bases(rng, 20, 10):
        for br in machines.PAIR_BRANCHES:
            x, y = (b.state(mem, q) for mem, q in zip(br, (2, 4)))
            expected = swap @ core.tensor(x, y, m.sigma.relabel((5,))).amplitudes
            got = machines.apply_branch(m, b, br).amplitudes
            worst = max(worst, np.max(np.abs(expected - got)))
    return worst


def check_cptp_controls(rng):
    worst = 0.0
    for k in range(50):
        ch = machines.random_cptp_channel(int(rng.integers(1, 5)), seed=int(rng.integers(2**31)))
        for _ in range(2):
            a, b = random_basis(rng, True), random_basis(rng, True)
            worst = max(worst, protocol.cptp_control(ch, a, b).distance)
    return worst


def _random_delete_machine(rng):
    def state(n):
        v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        return v / np.linalg.norm(v)

    rule = rng.choice(["passthrough", "entangling", "inline"])
    offdiag = machines.FixedOffdiag(state(3), state(3)) if rule == "inline" else str(rule)
    return machines.deleting_machine(sigma=state(1), ancilla_init=state(1), offdiag_rule=offdiag)


def check_oracle_equivalence(rng):
    worst = 0.0
    for k in range(20):
        m = _random_delete_machine(rng) if k % 4 else machines.cloning_machine()
        b = random_basis(rng, with_phi=k % 2 == 1)
        fast = protocol.bob_reduced_state(m, b).matrix
        slow = oracles.brute_force_bob_state(m, b)
        worst = max(worst, np.max(np.abs(fast - slow)))
    return worst


def check_alice_marginal(rng):
    worst = 0.0
    for k in range(10):
        m = (machines.deleting_machine(), machines.erasure_machine(), _random_delete_machine(rng))[k % 3]
        rho = protocol.alice_marginal(m, random_basis(rng, True)).matrix
        worst = max(worst, np.max(np.abs(rho - np.eye(4) / 4)))
    return worst


def check_deletion_signalling(rng):
    """Residual is the shortfall below the 0.1 trace-distance floor (0 when it clears)."""
    r = protocol.signalling_report(machines.deleting_machine(), QubitBasis(0.0), QubitBasis(np.pi / 2))
    return max(0.0, 0.1 - r.distance)


def check_cloning_signalling(rng):
    r = protocol.cloning_protocol(machines.cloning_machine(), QubitBasis(0.0), QubitBasis(np.pi / 2))
    return max(0.0, 0.1 - r.distance)


def check_nonlinearity_witness(rng):
    m = machines.deleting_machine()
    b = QubitBasis(np.pi / 2)
    br = (machines.PSI, machines.PSI)
    lin = machines.linear_extension(m, QubitBasis(0.0), b, br)
    gap = np.max(np.abs(core.align_phase(lin) - core.align_phase(machines.apply_branch(m, b, br).amplitudes)))
    return max(0.0, 0.1 - gap)


CHECKS: list[tuple[str, Callable, float]] = [
    ("expansion-identity", check_expansion_identity, TOL),
    ("basis-completeness", check_basis_completeness, TOL),
    ("singlet-invariance", check_singlet_invariance, TOL),
    ("partial-trace-oracle", check_partial_trace_oracle, TOL),
    ("tensor-associativity", check_tensor_associativity, TOL),
    ("trace-distance-triangle", check_triangle, TOL),
    ("pauli-round-trip", check_pauli_round_trip, TOL),
    ("singlet-pauli", check_singlet_pauli, TOL),
    ("pre-machine-marginal", check_pre_machine_marginal, TOL),
    ("branch-decomposition", check_branch_decomposition, TOL),
    ("erasure-universality", check_erasure_universality, TOL),
    ("erasure-swap-oracle", check_erasure_swap_oracle, TOL),
    ("cptp-controls", check_cptp_controls, TOL),
    ("oracle-equivalence", check_oracle_equivalence, TOL),
    ("alice-marginal", check_alice_marginal, TOL),
    ("deletion-signalling", check_deletion_signalling, TOL),
    ("cloning-signalling", check_cloning_signalling, TOL),
    ("nonlinearity-witness", check_nonlinearity_witness, TOL),
]


def run_checks(seed: int = 0) -> list[CheckResult]:
    results = []
    for name, fn, limit in CHECKS:
        rng = np.random.default_rng([seed, len(results)])
        try:
            residual = float(fn(rng))
            results.append(CheckResult(name, residual < limit, residual, limit))
        except Exception as exc:  # a crash is a failed invariant, reported by name
            results.append(CheckResult(name, False, float("inf"), limit, f"{type(exc).__name__}: {exc}"))
    return results
