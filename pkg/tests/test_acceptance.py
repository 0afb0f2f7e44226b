"""Exit criteria. Each criterion prints one PASS/FAIL line (shown in the pytest summary).

Run standalone with ``python tests/test_acceptance.py``.
"""
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qdelete import cli, report
from qdelete.checks import random_basis, random_density, sampled_bases
from qdelete.core import DensityMatrix, partial_trace, pauli_decompose, pauli_reconstruct, phase_residual, trace_distance
from qdelete.machines import (
    PSI,
    apply_branch,
    cloning_machine,
    deleting_machine,
    erasure_machine,
    linear_extension,
    random_cptp_channel,
)
from qdelete.oracles import brute_force_bob_state, trace_distance_matrix
from qdelete.protocol import (
    alice_branches,
    bob_reduced_state,
    cloning_protocol,
    cptp_control,
    offdiag_states,
    signalling_report,
)
from qdelete.resources import QubitBasis, expand_two_singlets, singlet, two_singlets

RESULTS = []
ZERO, HALF_PI = QubitBasis(0.0), QubitBasis(np.pi / 2)


def record(number, title, passed, detail):
    line = f"[criterion {number:>2}] {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert passed, line


def rng_for(number):
    return np.random.default_rng([2024, number])


def test_01_basis_expansion_identity():
    rng = rng_for(1)
    target = two_singlets()
    worst = max(phase_residual(target, expand_two_singlets(b)) for b in sampled_bases(rng, 100, 20))
    record(1, "singlet basis expansion identity over 100 theta + 20 (theta, phi)", worst < 1e-12, f"max residual {worst:.2e}")


def test_02_pre_machine_marginal():
    rng = rng_for(2)
    worst = np.max(np.abs(partial_trace(two_singlets().density(), {1, 3}).matrix - np.eye(4) / 4))
    for b in sampled_bases(rng, 100, 20):
        mix = sum(br.probability * br.bob_state.density().matrix for br in alice_branches(b))
        worst = max(worst, np.max(np.abs(mix - np.eye(4) / 4)))
    record(2, "Bob's (2,4) state is I/4 before any machine", worst < 1e-12, f"max entry error {worst:.2e}")


def test_03_erasure_no_signalling():
    rng = rng_for(3)
    m = erasure_machine()
    target = np.kron(np.eye(2) / 2, np.diag([1, 0]))
    bs = sampled_bases(rng, 80, 20)
    rhos = [bob_reduced_state(m, b) for b in bs]
    entry = max(np.max(np.abs(r.matrix - target)) for r in rhos)
    pair = max(trace_distance(rhos[i], rhos[i + 1]) for i in range(len(rhos) - 1))
    pair = max(pair, max(trace_distance(rhos[0], r) for r in rhos))
    ok = entry < 1e-12 and pair < 1e-12
    record(3, "erasure gives I/2 x |S><S| for 100 bases", ok, f"entry {entry:.2e}, pairwise D {pair:.2e}")


def test_04_deletion_signalling():
    m = deleting_machine()
    r = signalling_report(m, ZERO, HALF_PI)
    oracle = trace_distance_matrix(brute_force_bob_state(m, ZERO), brute_force_bob_state(m, HALF_PI))
    diag = np.max(np.abs(r.rho_a.matrix - np.diag([0.25, 0.25, 0.5, 0.0])))
    ok = r.distance > 0.1 and abs(r.distance - oracle) < 1e-12 and diag < 1e-12
    record(4, "default deleting machine signals", ok,
           f"D = {r.distance:.15f}, oracle {oracle:.15f}, rho(0) error {diag:.2e}")


def test_05_offdiag_decomposition():
    rng = rng_for(5)
    m = deleting_machine()
    blank = np.kron(np.eye(2), m.sigma.density().matrix) / 4
    worst = 0.0
    for _ in range(50):
        b = random_basis(rng)
        r1, r2 = offdiag_states(m, b)
        worst = max(worst, np.max(np.abs(bob_reduced_state(m, b).matrix - blank - (r1 + r2) / 4)))
    record(5, "rho_24 - I x |S><S|/4 = (rho' + rho'')/4 over 50 theta", worst < 1e-12, f"max {worst:.2e}")


def test_06_pauli_round_trip():
    rng = rng_for(6)
    worst = 0.0
    for _ in range(100):
        rho = random_density(rng, 2, (2, 4))
        d = pauli_decompose(rho)
        back = pauli_reconstruct(d)
        d2 = pauli_decompose(back)
        worst = max(worst, np.max(np.abs(back.matrix - rho.matrix)),
                    np.max(np.abs(d.m - d2.m)), np.max(np.abs(d.n - d2.n)), np.max(np.abs(d.C - d2.C)))
    s = pauli_decompose(singlet(2, 4).density())
    sing = max(np.max(np.abs(s.m)), np.max(np.abs(s.n)), np.max(np.abs(s.C + np.eye(3))))
    ok = worst < 1e-12 and sing < 1e-12
    record(6, "Pauli decompose/reconstruct inverse; singlet C = -I", ok,
           f"round trip {worst:.2e}, singlet {sing:.2e}")


def test_07_linear_no_signalling():
    rng = rng_for(7)
    pairs = [(random_basis(rng, True), random_basis(rng, True)) for _ in range(20)]
    worst = 0.0
    for seed in range(50):
        ch = random_cptp_channel(1 + seed % 4, seed)
        for a, b in pairs:
            worst = max(worst, cptp_control(ch, a, b).distance)
    record(7, "50 random CPTP channels x 20 basis pairs never signal", worst < 1e-12, f"max D {worst:.2e}")


def test_08_cloning_single_pair():
    plus, minus = np.array([1, 1]) / np.sqrt(2), np.array([1, -1]) / np.sqrt(2)

    def proj(v):
        return np.outer(v, v.conj())

    hand_zero = (proj(np.kron([1, 0], [1, 0])) + proj(np.kron([0, 1], [0, 1]))) / 2
    hand_half = (proj(np.kron(plus, plus)) + proj(np.kron(minus, minus))) / 2
    hand = trace_distance_matrix(hand_zero, hand_half)
    r = cloning_protocol(cloning_machine(), ZERO, HALF_PI)
    ok = r.distance > 0.1 and abs(r.distance - hand) < 1e-12
    record(8, "cloner on one singlet signals", ok, f"D = {r.distance:.15f}, hand {hand:.15f}")


def test_09_nonlinearity_witness():
    m = deleting_machine()
    lin = linear_extension(m, ZERO, HALF_PI, (PSI, PSI))
    exact = apply_branch(m, HALF_PI, (PSI, PSI)).amplitudes
    gap = np.max(np.abs(lin - exact))
    record(9, "theta=0 rule extended linearly misses the theta=pi/2 rule", gap > 0.1, f"max entry gap {gap:.3f}")


CPTP_CFG = "machine.kind = cptp\nmachine.num_kraus = 3\nbasis.grid = 0; pi/2; pi/4:1.0\n"


def test_10_determinism_and_verify(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text(CPTP_CFG)
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        code = cli.main(["run", str(cfg), "--seed", "17", "--output", str(out)])
        outs.append((code, out.read_bytes()))
    same = outs[0] == outs[1] and outs[0][0] == 0
    proc = subprocess.run([sys.executable, "-m", "qdelete", "verify"], capture_output=True, text=True)
    ok = same and proc.returncode == 0
    record(10, "identical run reports; verify exits 0", ok,
           f"byte-identical={same}, verify exit {proc.returncode}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
