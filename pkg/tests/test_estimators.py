import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from mctomo.completion import SparseFailure
from mctomo.estimators import FiveBasisTomography, MatrixCompletionTomography
from mctomo.linalg import fidelity
from mctomo.states import ghz_state, haar_random_state
from mctomo.tomography import mcqst_reconstruct, simulate_records


class TestSklearnContract:
    def test_get_params_round_trip(self):
        est = MatrixCompletionTomography(shots=1000, noise=0.01, random_state=3)
        params = est.get_params()
        assert params["shots"] == 1000
        assert params["noise"] == 0.01
        rebuilt = MatrixCompletionTomography(**params)
        assert rebuilt.get_params() == params

    def test_set_params(self):
        est = MatrixCompletionTomography()
        est.set_params(shots=500, rotate_on_sparse=False)
        assert est.shots == 500
        assert not est.rotate_on_sparse

    def test_clone_preserves_params(self):
        est = FiveBasisTomography(shots=2000, random_state=7)
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()

    def test_score_requires_fit(self):
        with pytest.raises(NotFittedError):
            MatrixCompletionTomography().score(haar_random_state(2, 0))


class TestMatrixCompletionTomography:
    def test_exact_fit_and_score(self):
        psi = haar_random_state(3, 1)
        est = MatrixCompletionTomography().fit(psi)
        assert est.n_qubits_ == 3
        assert est.settings_used_ == 7
        assert est.score(psi) >= 1 - 1e-9

    def test_fitted_attributes(self):
        psi = haar_random_state(2, 2)
        est = MatrixCompletionTomography(shots=50_000, random_state=0).fit(psi)
        assert est.shots_used_ == 50_000
        assert est.estimate_.shape == (4,)
        assert est.raw_matrix_.shape == (4, 4)
        assert isinstance(est.rotated_, bool)
        assert not est.degenerate_eig_

    def test_ghz_rotation_enabled_by_default(self):
        g = ghz_state(3)
        est = MatrixCompletionTomography().fit(g)
        assert est.rotated_
        assert est.sparse_failure_recovered_
        assert est.score(g) >= 1 - 1e-9

    def test_rotation_disabled_raises_on_sparse(self):
        with pytest.raises(SparseFailure):
            MatrixCompletionTomography(rotate_on_sparse=False).fit(ghz_state(3))

    def test_record_replay_matches_function(self):
        psi = haar_random_state(2, 5)
        records = simulate_records(psi, 30_000, rng=9)
        est = MatrixCompletionTomography().fit(records)
        direct = mcqst_reconstruct(records=records)
        assert np.array_equal(est.estimate_, direct.estimate)

    def test_noise_accepts_float(self):
        psi = haar_random_state(2, 6)
        est = MatrixCompletionTomography(shots=100_000, noise=0.01, random_state=1).fit(psi)
        assert est.score(psi) > 0.9

    def test_seeded_fit_reproducible(self):
        psi = haar_random_state(2, 7)
        a = MatrixCompletionTomography(shots=10_000, random_state=42).fit(psi)
        b = MatrixCompletionTomography(shots=10_000, random_state=42).fit(psi)
        assert np.array_equal(a.estimate_, b.estimate_)

    def test_fit_accepts_plain_sequences(self):
        s = 1 / np.sqrt(2)
        est = MatrixCompletionTomography().fit([s, s * 1j])
        assert est.score(np.array([s, s * 1j])) >= 1 - 1e-9


class TestFiveBasisTomography:
    def test_exact_fit_and_score(self):
        psi = haar_random_state(2, 8)
        est = FiveBasisTomography().fit(psi)
        assert est.settings_used_ == 5
        assert est.score(psi) >= 1 - 1e-9

    def test_records_not_supported(self):
        records = simulate_records(haar_random_state(2, 0), 1000, rng=0)
        with pytest.raises(ValueError, match="replay"):
            FiveBasisTomography().fit(records)

    def test_score_against_other_state(self):
        psi = haar_random_state(2, 9)
        other = haar_random_state(2, 10)
        est = FiveBasisTomography().fit(psi)
        assert est.score(other) == pytest.approx(fidelity(est.estimate_, other))
