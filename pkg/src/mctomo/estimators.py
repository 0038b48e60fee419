"""Scikit-learn style estimator facades over the reconstruction pipelines.

Both estimators follow the fit/attributes/score contract: ``fit`` consumes
either a known state vector (measurements are then simulated with the
configured budget and noise) or a sequence of ShotRecords to replay, the
fitted state lands in ``estimate_``, and ``score`` returns the fidelity
against a reference state. ``get_params``/``set_params``/``clone`` work as
usual, so the estimators drop into sklearn tooling.
"""

from __future__ import annotations

from typing import Optional, Union

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .linalg import fidelity
from .measure import NoiseModel, ShotRecord
from .tomography import (
    ReconstructionResult,
    fivebasis_reconstruct,
    mcqst_reconstruct,
    reconstruct_with_rotation,
)


def _as_noise(noise: Union[None, float, NoiseModel]) -> Optional[NoiseModel]:
    if noise is None or isinstance(noise, NoiseModel):
        return noise
    return NoiseModel(float(noise))


def _is_record_input(x) -> bool:
    return isinstance(x, (list, tuple)) and len(x) > 0 and isinstance(x[0], ShotRecord)


class _TomographyEstimator(BaseEstimator):
    """Shared fitted-attribute handling; subclasses implement _reconstruct."""

    def _reconstruct(self, x) -> ReconstructionResult:
        raise NotImplementedError

    def fit(self, X, y=None):
        """Reconstruct from X: a state vector to measure, or ShotRecords to replay.

        Returns self; the reconstruction lands in ``result_`` and friends.
        """
        result = self._reconstruct(X)
        self.result_ = result
        self.estimate_ = result.estimate
        self.raw_matrix_ = result.raw_matrix
        self.n_qubits_ = result.n_qubits
        self.settings_used_ = result.settings_used
        self.shots_used_ = result.shots_used
        self.rotated_ = result.rotated
        self.degenerate_eig_ = result.degenerate_eig
        self.sparse_failure_recovered_ = result.sparse_failure_recovered
        return self

    def score(self, X, y=None) -> float:
        """Fidelity of the fitted estimate against the reference state X."""
        if not hasattr(self, "estimate_"):
            raise NotFittedError("call fit before score")
        return fidelity(self.estimate_, np.asarray(X, dtype=complex))


class MatrixCompletionTomography(_TomographyEstimator):
    """Pure-state reconstruction from 2n+1 local Pauli settings.

    Parameters
    ----------
    shots : int or None
        Total measurement budget across all settings; None runs on exact
        outcome probabilities.
    noise : float, NoiseModel or None
        Per-qubit readout bit-flip probability.
    rotate_on_sparse : bool
        Screen the diagonal first and reconstruct in the Hadamard-rotated
        frame when entries vanish (needed for GHZ-like states).
    pivot_floor : float or None
        Override for the vanishing-diagonal threshold; None picks a default
        from the budget and noise level.
    random_state : int, Generator or None
        Seed for measurement sampling.
    """

    def __init__(self, shots: Optional[int] = None,
                 noise: Union[None, float, NoiseModel] = None,
                 rotate_on_sparse: bool = True,
                 pivot_floor: Optional[float] = None,
                 random_state=None):
        self.shots = shots
        self.noise = noise
        self.rotate_on_sparse = rotate_on_sparse
        self.pivot_floor = pivot_floor
        self.random_state = random_state

    def _reconstruct(self, x) -> ReconstructionResult:
        noise = _as_noise(self.noise)
        rng = np.random.default_rng(self.random_state)
        if _is_record_input(x):
            return mcqst_reconstruct(records=list(x), noise=noise,
                                     pivot_floor=self.pivot_floor)
        if self.rotate_on_sparse:
            return reconstruct_with_rotation(x, shots=self.shots, noise=noise,
                                             rng=rng, pivot_floor=self.pivot_floor)
        return mcqst_reconstruct(x, shots=self.shots, noise=noise, rng=rng,
                                 pivot_floor=self.pivot_floor)


class FiveBasisTomography(_TomographyEstimator):
    """Five-setting baseline reconstruction (sorted-amplitude pair chaining)."""

    def __init__(self, shots: Optional[int] = None,
                 pivot_floor: Optional[float] = None,
                 random_state=None):
        self.shots = shots
        self.pivot_floor = pivot_floor
        self.random_state = random_state

    def _reconstruct(self, x) -> ReconstructionResult:
        if _is_record_input(x):
            raise ValueError("the five-setting protocol does not support record replay")
        rng = np.random.default_rng(self.random_state)
        return fivebasis_reconstruct(x, shots=self.shots, rng=rng,
                                     pivot_floor=self.pivot_floor)
