import numpy as np
import pytest
from hypothesis import given, settings

from qdelete.core import StateError, StateVector, ket, maximally_mixed, tensor
from qdelete.checks import random_density
from qdelete.machines import (
    BAR,
    PAIR_BRANCHES,
    PSI,
    SWAP_45,
    ConstantAncilla,
    FixedOffdiag,
    LinearChannel,
    apply_branch,
    apply_channel,
    branch_input,
    cloning_machine,
    custom_machine,
    deleting_machine,
    depolarizing_channel,
    erasure_machine,
    identity_channel,
    identity_machine,
    linear_extension,
    random_cptp_channel,
)
from qdelete.resources import QubitBasis

from conftest import complex_bases, seeds

HALF_PI = QubitBasis(np.pi / 2)
PLUS = np.array([1, 1]) / np.sqrt(2)
MINUS = np.array([1, -1]) / np.sqrt(2)


def kron(*vs):
    out = np.ones(1)
    for v in vs:
        out = np.kron(out, v)
    return out


def test_delete_identical_branch_half_pi():
    out = apply_branch(deleting_machine(), HALF_PI, (PSI, PSI))
    assert out.register == (2, 4, 5)
    assert np.max(np.abs(out.amplitudes - kron(PLUS, [1, 0], PLUS))) < 1e-12


def test_delete_bar_branch_theta_zero():
    out = apply_branch(deleting_machine(), QubitBasis(0.0), (BAR, BAR))
    # |psibar> = -|1>, ancilla copies it, so the two signs cancel
    assert np.max(np.abs(out.amplitudes - kron([0, 1], [1, 0], [0, 1]))) < 1e-12


def test_delete_passthrough_offdiag():
    b = QubitBasis(0.9)
    out = apply_branch(deleting_machine(), b, (PSI, BAR))
    expected = tensor(b.state(PSI, 2), b.state(BAR, 4), ket("0", (5,)))
    assert np.max(np.abs(out.amplitudes - expected.amplitudes)) < 1e-12


def test_delete_entangling_offdiag_orthogonal():
    m = deleting_machine(offdiag_rule="entangling")
    b = QubitBasis(0.4)
    one, two = (apply_branch(m, b, br) for br in ((PSI, BAR), (BAR, PSI)))
    assert abs(np.vdot(one.amplitudes, two.amplitudes)) < 1e-12


def test_delete_rejects_unnormalised_config():
    with pytest.raises(StateError):
        deleting_machine(sigma=[1, 1])
    with pytest.raises(StateError):
        deleting_machine(offdiag_rule=FixedOffdiag(np.ones(8), np.ones(8) / np.sqrt(8)))
    with pytest.raises(ValueError):
        deleting_machine(offdiag_rule="swirl")


def test_constant_ancilla_rule():
    m = deleting_machine(ancilla_rule=ConstantAncilla([0, 1], [0, 1]))
    out = apply_branch(m, HALF_PI, (BAR, BAR))
    assert np.max(np.abs(out.amplitudes - kron(MINUS, [1, 0], [0, 1]))) < 1e-12


def test_erasure_offdiag_branches():
    m = erasure_machine()
    b = QubitBasis(1.1)
    for x, y in ((PSI, BAR), (BAR, PSI), (BAR, BAR)):
        expected = tensor(b.state(x, 2), m.sigma, b.state(y, 5))
        assert np.max(np.abs(apply_branch(m, b, (x, y)).amplitudes - expected.amplitudes)) < 1e-12


def test_erasure_ancilla_is_blank():
    m = erasure_machine([0, 1])
    assert np.array_equal(m.ancilla_init.amplitudes, m.sigma.amplitudes)


def test_swap_is_involution():
    assert np.array_equal(SWAP_45 @ SWAP_45, np.eye(8))
    m = erasure_machine()
    b = QubitBasis(2.2)
    once = apply_branch(m, b, (PSI, BAR)).amplitudes
    assert np.max(np.abs(SWAP_45 @ once - branch_input(m, b, (PSI, BAR)).amplitudes)) < 1e-12


def test_clone_computational():
    out = apply_branch(cloning_machine(), QubitBasis(0.0), (PSI,))
    assert np.max(np.abs(out.amplitudes - kron([1, 0], [1, 0], [1, 0]))) < 1e-12


def test_clone_half_pi_duplicates():
    out = apply_branch(cloning_machine(), HALF_PI, (PSI,))
    pp = kron(PLUS, PLUS)
    # project out the ancilla: the (2, 4) part must be |++>
    M = out.amplitudes.reshape(4, 2)
    assert abs(np.linalg.norm(pp.conj() @ M) ** 2 - 1) < 1e-12


def test_clone_is_not_linear():
    m = cloning_machine()
    lin = linear_extension(m, QubitBasis(0.0), HALF_PI, (PSI,))
    exact = apply_branch(m, HALF_PI, (PSI,)).amplitudes
    assert np.max(np.abs(lin - exact)) > 0.1


def test_clone_branch_shape_enforced():
    with pytest.raises(ValueError):
        apply_branch(cloning_machine(), HALF_PI, (PSI, PSI))
    with pytest.raises(ValueError):
        apply_branch(deleting_machine(), HALF_PI, (PSI,))


def test_custom_ghz_passthrough():
    ghz = StateVector((2, 4, 5), np.array([1, 0, 0, 0, 0, 0, 0, 1]) / np.sqrt(2))

    def rule(basis, branch):
        return ghz

    out = apply_branch(custom_machine(rule), HALF_PI, (PSI, BAR))
    assert np.max(np.abs(out.amplitudes - ghz.amplitudes)) < 1e-12
    assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12


def test_custom_rule_output_is_checked():
    m = custom_machine(lambda basis, branch: np.ones(8))
    with pytest.raises(StateError):
        apply_branch(m, HALF_PI, (PSI, PSI))


def test_identity_machine_untouched():
    m = identity_machine()
    b = QubitBasis(0.3)
    for br in PAIR_BRANCHES:
        assert np.max(np.abs(apply_branch(m, b, br).amplitudes - branch_input(m, b, br).amplitudes)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(complex_bases)
def test_branch_outputs_normalised(b):
    for m in (deleting_machine(), deleting_machine(offdiag_rule="entangling"), erasure_machine()):
        for br in PAIR_BRANCHES:
            assert abs(np.linalg.norm(apply_branch(m, b, br).amplitudes) - 1) < 1e-12
    for br in ((PSI,), (BAR,)):
        assert abs(np.linalg.norm(apply_branch(cloning_machine(), b, br).amplitudes) - 1) < 1e-12


def test_delete_nonlinearity_witness():
    m = deleting_machine()
    lin = linear_extension(m, QubitBasis(0.0), HALF_PI, (PSI, PSI))
    exact = apply_branch(m, HALF_PI, (PSI, PSI)).amplitudes
    # linear map from theta=0: |00>->|000>, |01>->|010>, |10>->|100>, |11>->|101>
    assert np.max(np.abs(lin - np.array([1, 0, 1, 0, 1, 1, 0, 0]) / 2)) < 1e-12
    assert np.max(np.abs(lin - exact)) > 0.1


def test_linear_extension_reproduces_rule_basis():
    m = deleting_machine()
    b = QubitBasis(0.8)
    for br in PAIR_BRANCHES:
        assert np.max(np.abs(linear_extension(m, b, b, br) - apply_branch(m, b, br).amplitudes)) < 1e-12


def test_random_channel_single_kraus_is_unitary():
    (U,) = random_cptp_channel(1, seed=3).kraus
    assert np.max(np.abs(U.conj().T @ U - np.eye(4))) < 1e-12
    assert np.max(np.abs(U @ U.conj().T - np.eye(4))) < 1e-12


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_random_channel_complete(seed):
    ch = random_cptp_channel(1 + seed % 4, seed)
    assert len(ch.kraus) == 1 + seed % 4
    assert ch.completeness_residual() < 1e-12


def test_random_channel_deterministic():
    a, b = random_cptp_channel(3, 42), random_cptp_channel(3, 42)
    assert all(np.array_equal(x, y) for x, y in zip(a.kraus, b.kraus))
    c = random_cptp_channel(3, 43)
    assert not np.array_equal(a.kraus[0], c.kraus[0])


def test_channel_validation():
    with pytest.raises(ValueError):
        LinearChannel(())
    with pytest.raises(ValueError, match="trace preserving"):
        LinearChannel((0.5 * np.eye(4),))
    with pytest.raises(ValueError):
        random_cptp_channel(0, 1)


def test_identity_channel(rand_rho):
    rho = rand_rho(2, (2, 4))
    assert np.max(np.abs(apply_channel(identity_channel(), rho).matrix - rho.matrix)) < 1e-12


def test_depolarizing_fixed_point(rand_rho):
    ch = depolarizing_channel(1.0)
    assert np.max(np.abs(apply_channel(ch, maximally_mixed((2, 4))).matrix - np.eye(4) / 4)) < 1e-12
    assert np.max(np.abs(apply_channel(ch, rand_rho(2, (2, 4))).matrix - np.eye(4) / 4)) < 1e-12


def test_channel_dimension_mismatch(rand_rho):
    with pytest.raises(ValueError):
        apply_channel(identity_channel(), rand_rho(2, (1, 2)))


def test_channel_preserves_trace(rng):
    ch = random_cptp_channel(3, 7)
    for _ in range(50):
        out = apply_channel(ch, random_density(rng, 2, (2, 4)))
        assert abs(np.trace(out.matrix) - 1) < 1e-12
