import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coolsim import linalg
from coolsim.errors import InvalidDims, InvalidInput, InvalidState, InvalidUnitary

RNG = np.random.default_rng(20240811)


def random_density(d, rng=RNG):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_hermitian(d, rng=RNG):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


class TestKron:
    def test_identity_case(self):
        assert np.allclose(linalg.kron(linalg.I2, linalg.I2), np.eye(4))

    def test_x_tensor_identity_swaps_blocks(self):
        got = linalg.kron(linalg.PAULI_X, linalg.I2)
        want = np.zeros((4, 4))
        want[0, 2] = want[1, 3] = want[2, 0] = want[3, 1] = 1
        assert np.allclose(got, want)

    def test_diagonal_case(self):
        got = linalg.kron(np.diag([2.0, 3.0]), np.diag([5.0, 7.0]))
        assert np.allclose(got, np.diag([10.0, 14.0, 15.0, 21.0]))

    @given(st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_associativity(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
        left = linalg.kron(linalg.kron(a, b), c)
        right = linalg.kron(a, linalg.kron(b, c))
        assert np.abs(left - right).max() <= 1e-12


class TestPartialTrace:
    def test_product_state_factorizes(self):
        rho_a = random_density(2)
        rho_b = random_density(4)
        joint = np.kron(rho_a, rho_b)
        assert np.abs(linalg.partial_trace(joint, [0], [2, 4]) - rho_a).max() < 1e-12
        assert np.abs(linalg.partial_trace(joint, [1], [2, 4]) - rho_b).max() < 1e-12

    def test_maximally_mixed(self):
        got = linalg.partial_trace(np.eye(4) / 4, [0], [2, 2])
        assert np.allclose(got, np.eye(2) / 2)

    def test_bell_state_reduces_to_mixed(self):
        psi = np.zeros(4, dtype=complex)
        psi[0] = psi[3] = 1 / np.sqrt(2)
        rho = np.outer(psi, psi.conj())
        got = linalg.partial_trace(rho, [0], [2, 2])
        assert np.abs(got - np.eye(2) / 2).max() < 1e-12

    def test_trace_preserved(self):
        rho = random_density(8)
        out = linalg.partial_trace(rho, [1], [2, 2, 2])
        assert abs(np.trace(out) - np.trace(rho)) <= 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidDims):
            linalg.partial_trace(np.eye(4) / 4, [0], [2, 4])
        with pytest.raises(InvalidDims):
            linalg.partial_trace(np.eye(4) / 4, [5], [2, 2])


class TestFidelity:
    def test_identical_states(self):
        rho = random_density(4)
        assert abs(linalg.fidelity(rho, rho) - 1.0) < 1e-10

    def test_orthogonal_pure_states(self):
        zero = np.diag([1.0, 0.0]).astype(complex)
        one = np.diag([0.0, 1.0]).astype(complex)
        assert linalg.fidelity(zero, one) < 1e-12

    def test_commuting_closed_form(self):
        rho = np.diag([0.8, 0.2]).astype(complex)
        sigma = np.diag([0.5, 0.5]).astype(complex)
        want = (np.sqrt(0.4) + np.sqrt(0.1)) ** 2
        assert abs(linalg.fidelity(rho, sigma) - want) < 1e-12

    def test_symmetry(self):
        rho, sigma = random_density(8), random_density(8)
        assert abs(linalg.fidelity(rho, sigma) - linalg.fidelity(sigma, rho)) < 1e-10

    def test_rejects_non_psd(self):
        bad = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(InvalidState):
            linalg.fidelity(bad, np.eye(2) / 2)


class TestApplyUnitary:
    def test_identity(self):
        rho = random_density(4)
        assert np.abs(linalg.apply_unitary(rho, np.eye(4)) - rho).max() < 1e-12

    def test_x_flips_ground_state(self):
        rho = np.diag([1.0, 0.0]).astype(complex)
        out = linalg.apply_unitary(rho, linalg.PAULI_X)
        assert np.allclose(out, np.diag([0.0, 1.0]))

    def test_permutes_thermal_diagonal(self):
        rho = np.diag([0.85, 0.15]).astype(complex)
        out = linalg.apply_unitary(rho, linalg.PAULI_X)
        assert np.allclose(np.diagonal(out), [0.15, 0.85])

    def test_trace_preserved(self):
        rho = random_density(8)
        h = random_hermitian(8)
        w, v = np.linalg.eigh(h)
        out = linalg.apply_unitary(rho, v)
        assert abs(np.trace(out) - 1.0) <= 1e-10

    def test_rejects_non_unitary(self):
        with pytest.raises(InvalidUnitary):
            linalg.apply_unitary(random_density(2), np.array([[1, 1], [0, 1.0]]))


class TestHermitianEig:
    def test_identity_spectrum(self):
        w, _ = linalg.hermitian_eig(np.eye(2))
        assert np.allclose(w, [1.0, 1.0])

    def test_pauli_x_spectrum(self):
        w, v = linalg.hermitian_eig(linalg.PAULI_X)
        assert np.allclose(w, [-1.0, 1.0])
        assert np.abs(np.abs(v) - 1 / np.sqrt(2)).max() < 1e-12

    def test_sorted_diagonal(self):
        w, _ = linalg.hermitian_eig(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(w, [1.0, 2.0, 3.0])

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidInput):
            linalg.hermitian_eig(np.array([[0, 1], [0, 0.0]]))

    @pytest.mark.parametrize("dim", [4, 32, 256])
    def test_reconstruction_residual(self, dim):
        a = random_hermitian(dim)
        w, v = linalg.hermitian_eig(a)
        back = (v * w) @ v.conj().T
        assert np.abs(back - a).max() <= 1e-8 * dim


def test_check_density_matrix_accepts_valid():
    linalg.check_density_matrix(random_density(8))


def test_check_density_matrix_rejects():
    with pytest.raises(InvalidState):
        linalg.check_density_matrix(np.diag([0.6, 0.6]))
    with pytest.raises(InvalidState):
        linalg.check_density_matrix(np.array([[0.5, 0.5], [0.0, 0.5]]))


def test_trace_distance_basics():
    rho = np.diag([1.0, 0.0]).astype(complex)
    sigma = np.diag([0.0, 1.0]).astype(complex)
    assert abs(linalg.trace_distance(rho, sigma) - 1.0) < 1e-12
    assert linalg.trace_distance(rho, rho) < 1e-14
