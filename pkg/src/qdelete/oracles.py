"""Brute-force reference computations.

These deliberately avoid the reshaping tricks used in :mod:`qdelete.core` and
the branch averaging in :mod:`qdelete.protocol`: indices are walked bit by bit
and the full output state is assembled explicitly.
"""
from __future__ import annotations

import itertools

import numpy as np

from .machines import BranchMachine, apply_branch
from .resources import EXPANSION_TERMS, Member, QubitBasis


def _bits(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> (n - 1 - k)) & 1 for k in range(n))


def _index(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | b
    return out


def index_sum_partial_trace(matrix, register, discard) -> np.ndarray:
    """Explicit sum over the discarded indices, one matrix element at a time."""
    register = tuple(register)
    n = len(register)
    keep_pos = [k for k, q in enumerate(register) if q not in discard]
    gone_pos = [k for k, q in enumerate(register) if q in discard]
    dk = 2 ** len(keep_pos)
    out = np.zeros((dk, dk), dtype=complex)
    for i in range(dk):
        for j in range(dk):
            bi, bj = _bits(i, len(keep_pos)), _bits(j, len(keep_pos))
            for g in itertools.product((0, 1), repeat=len(gone_pos)):
                row, col = [0] * n, [0] * n
                for k, p in enumerate(keep_pos):
                    row[p], col[p] = bi[k], bj[k]
                for k, p in enumerate(gone_pos):
                    row[p] = col[p] = g[k]
                out[i, j] += matrix[_index(row), _index(col)]
    return out


def full_output_state(machine: BranchMachine, basis: QubitBasis) -> np.ndarray:
    """The 32-amplitude post-machine state on qubits (1, 2, 3, 4, 5).

    Sum of the four expansion terms, Alice's pair on (1, 3) and the machine
    image of Bob's pair on (2, 4, 5), each placed amplitude by amplitude.
    """
    psi = np.zeros(32, dtype=complex)
    for sign, a1, a3, b2, b4 in EXPANSION_TERMS:
        v1 = basis.state(a1, 1).amplitudes
        v3 = basis.state(a3, 3).amplitudes
        out = apply_branch(machine, basis, (b2, b4)).amplitudes
        for i1, i2, i3, i4, i5 in itertools.product((0, 1), repeat=5):
            psi[_index((i1, i2, i3, i4, i5))] += 0.5 * sign * v1[i1] * v3[i3] * out[_index((i2, i4, i5))]
    return psi


def single_pair_output_state(machine: BranchMachine, basis: QubitBasis) -> np.ndarray:
    """16-amplitude state on (1, 2, 4, 5) for a cloner fed one half of a singlet."""
    psi = np.zeros(16, dtype=complex)
    terms = ((+1, Member.PSI, Member.PSI_BAR), (-1, Member.PSI_BAR, Member.PSI))
    for sign, a1, b2 in terms:
        v1 = basis.state(a1, 1).amplitudes
        out = apply_branch(machine, basis, (b2,)).amplitudes
        for i1, i2, i4, i5 in itertools.product((0, 1), repeat=4):
            psi[_index((i1, i2, i4, i5))] += sign * v1[i1] * out[_index((i2, i4, i5))] / np.sqrt(2)
    return psi


def brute_force_bob_state(machine: BranchMachine, basis: QubitBasis) -> np.ndarray:
    """Bob's (2, 4) matrix from the full pure output state and an index-sum trace."""
    if machine.kind == "clone":
        psi = single_pair_output_state(machine, basis)
        register, discard = (1, 2, 4, 5), {1, 5}
    else:
        psi = full_output_state(machine, basis)
        register, discard = (1, 2, 3, 4, 5), {1, 3, 5}
    return index_sum_partial_trace(np.outer(psi, psi.conj()), register, discard)


def trace_distance_matrix(a: np.ndarray, b: np.ndarray) -> float:
    """Trace norm via singular values, independent of the Hermitian eigensolver path."""
    return 0.5 * float(np.linalg.svd(a - b, compute_uv=False).sum())
