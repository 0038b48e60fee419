import numpy as np
import pytest

from mctomo.linalg import outer
from mctomo.states import (
    basis_state,
    ghz_state,
    haar_random_state,
    hadamard_layer,
    permutation_unitary,
)


class TestHaarRandomState:
    def test_unit_norm_and_length(self):
        for n in (1, 2, 3):
            psi = haar_random_state(n, 0)
            assert psi.shape == (2 ** n,)
            assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)

    def test_deterministic_given_seed(self):
        assert np.array_equal(haar_random_state(2, 123), haar_random_state(2, 123))
        assert not np.array_equal(haar_random_state(2, 123), haar_random_state(2, 124))

    def test_first_amplitude_moment(self):
        # Haar moment: E[|c_0|^2] = 1/d; Monte-Carlo check at d = 2
        rng = np.random.default_rng(42)
        mean = np.mean([abs(haar_random_state(1, rng)[0]) ** 2 for _ in range(10_000)])
        assert mean == pytest.approx(0.5, abs=0.02)

    def test_rejects_zero_qubits(self):
        with pytest.raises(ValueError):
            haar_random_state(0)


class TestGhzState:
    def test_two_qubits(self):
        assert np.allclose(ghz_state(2), np.array([1, 0, 0, 1]) / np.sqrt(2))

    def test_three_qubits_support(self):
        psi = ghz_state(3)
        assert psi[0] == pytest.approx(1 / np.sqrt(2))
        assert psi[7] == pytest.approx(1 / np.sqrt(2))
        assert np.allclose(psi[1:7], 0)

    def test_two_dominant_diagonal_entries(self):
        diag = np.sort(outer(ghz_state(3)).diagonal().real)
        assert np.allclose(diag[-2:], 0.5)
        assert np.allclose(diag[:-2], 0.0)

    def test_rejects_single_qubit(self):
        with pytest.raises(ValueError):
            ghz_state(1)


class TestPermutationUnitary:
    def test_two_weights_swap(self):
        assert np.array_equal(permutation_unitary([0.1, 0.9]),
                              np.array([[0, 1], [1, 0]], dtype=complex))

    def test_descending_weights_identity(self):
        assert np.array_equal(permutation_unitary([0.5, 0.3, 0.15, 0.05]), np.eye(4))

    def test_ties_keep_original_order(self):
        assert np.array_equal(permutation_unitary([0.25, 0.25, 0.25, 0.25]), np.eye(4))

    @pytest.mark.parametrize("seed", range(5))
    def test_sorts_amplitudes_descending(self, seed):
        psi = haar_random_state(3, seed)
        sorted_psi = permutation_unitary(np.abs(psi) ** 2) @ psi
        mags = np.abs(sorted_psi)
        assert np.all(mags[:-1] >= mags[1:] - 1e-15)
        # oracle: plain sort of the magnitudes
        assert np.allclose(mags, np.sort(np.abs(psi))[::-1])

    def test_one_entry_per_row_and_column(self):
        u = permutation_unitary(haar_random_state(3, 9).real ** 2)
        assert np.array_equal(np.abs(u).sum(axis=0), np.ones(8))
        assert np.array_equal(np.abs(u).sum(axis=1), np.ones(8))


class TestHadamardLayer:
    def test_single_qubit_plus_state(self):
        assert np.allclose(hadamard_layer(1) @ basis_state(1, 0),
                           np.array([1, 1]) / np.sqrt(2))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_unitary_and_self_inverse(self, n):
        v = hadamard_layer(n)
        assert np.allclose(v.conj().T @ v, np.eye(2 ** n), atol=1e-10)
        assert np.allclose(v @ v, np.eye(2 ** n), atol=1e-10)

    def test_ghz_rotates_to_even_parity_support(self):
        psi = hadamard_layer(3) @ ghz_state(3)
        for i in range(8):
            expected = 0.5 if bin(i).count("1") % 2 == 0 else 0.0
            assert abs(psi[i]) == pytest.approx(expected, abs=1e-12)


def test_basis_state_bounds():
    with pytest.raises(ValueError):
        basis_state(2, 4)
