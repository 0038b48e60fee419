import numpy as np
import pytest

from mctomo.linalg import fidelity, fix_global_phase, kron, outer, principal_eigenvector
from mctomo.states import haar_random_state

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)


class TestKron:
    def test_identity(self):
        assert np.array_equal(kron(I2, I2), np.eye(4))

    def test_pauli_x_first_factor(self):
        # hand expansion: sigma_x on the leading factor couples (0,2), (1,3)
        expected = np.array([
            [0, 0, 1, 0],
            [0, 0, 0, 1],
            [1, 0, 0, 0],
            [0, 1, 0, 0],
        ], dtype=complex)
        assert np.array_equal(kron(X, I2), expected)

    def test_pauli_x_second_factor(self):
        # and on the trailing factor it couples (0,1), (2,3)
        expected = np.array([
            [0, 1, 0, 0],
            [1, 0, 0, 0],
            [0, 0, 0, 1],
            [0, 0, 1, 0],
        ], dtype=complex)
        assert np.array_equal(kron(I2, X), expected)

    def test_hadamard_layer_on_00(self):
        psi = kron(H, H) @ np.array([1, 0, 0, 0], dtype=complex)
        assert np.allclose(psi, 0.5 * np.ones(4))

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_associativity(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
                   for _ in range(3))
        assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)


class TestPrincipalEigenvector:
    def test_dominant_basis_state(self):
        vec, degenerate = principal_eigenvector(np.diag([1.0, 0, 0, 0]))
        assert np.allclose(vec, [1, 0, 0, 0])
        assert not degenerate

    def test_mixture_picks_dominant(self):
        m = 0.9 * outer(KET0) + 0.1 * outer(KET1)
        vec, _ = principal_eigenvector(m)
        assert np.allclose(vec, KET0)

    @pytest.mark.parametrize("seed", range(5))
    def test_outer_product_roundtrip(self, seed):
        psi = haar_random_state(3, seed)
        vec, degenerate = principal_eigenvector(outer(psi))
        assert abs(np.vdot(vec, psi)) >= 1 - 1e-12
        assert not degenerate

    def test_degenerate_flagged(self):
        _, degenerate = principal_eigenvector(np.eye(2) / 2)
        assert degenerate

    def test_phase_convention(self):
        psi = haar_random_state(2, 11) * np.exp(0.7j)
        vec, _ = principal_eigenvector(outer(psi))
        pivot = vec[np.argmax(np.abs(vec))]
        assert pivot.imag == pytest.approx(0, abs=1e-12)
        assert pivot.real >= 0


def test_fix_global_phase_invariant_direction():
    psi = haar_random_state(2, 3)
    rotated = psi * np.exp(1.3j)
    assert np.allclose(fix_global_phase(psi), fix_global_phase(rotated), atol=1e-12)


class TestFidelity:
    def test_identical_states(self):
        assert fidelity(KET0, KET0) == pytest.approx(1.0)

    def test_orthogonal_states(self):
        assert fidelity(KET0, KET1) == pytest.approx(0.0)

    def test_half_overlap(self):
        assert fidelity(KET0, PLUS) == pytest.approx(0.5)

    @pytest.mark.parametrize("seed", range(4))
    def test_self_fidelity(self, seed):
        psi = haar_random_state(2, seed)
        assert fidelity(psi, psi) == pytest.approx(1.0, abs=1e-10)
        assert fidelity(outer(psi), outer(psi)) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("seed", range(4))
    def test_pure_pure_matches_general_formula(self, seed):
        a = haar_random_state(2, seed)
        b = haar_random_state(2, seed + 100)
        assert fidelity(a, b) == pytest.approx(fidelity(outer(a), outer(b)), abs=1e-10)

    def test_symmetry(self):
        a = haar_random_state(2, 5)
        b = haar_random_state(2, 6)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-12)
        assert fidelity(outer(a), b) == pytest.approx(fidelity(b, outer(a)), abs=1e-12)

    def test_mixed_against_analytic(self):
        assert fidelity(np.eye(2) / 2, outer(KET0)) == pytest.approx(0.5, abs=1e-10)

    def test_non_psd_rejected(self):
        bad = np.diag([1.5, -0.5]).astype(complex)
        with pytest.raises(ValueError):
            fidelity(bad, np.eye(2, dtype=complex) / 2)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(KET0, np.ones(4) / 2)

    @pytest.mark.parametrize("seed", range(10))
    def test_never_exceeds_one(self, seed):
        psi = haar_random_state(3, seed)
        assert fidelity(psi, psi) <= 1.0
