"""Pure-state quantum tomography via rank-1 matrix completion.

Reconstructs n-qubit pure states from 2n+1 local measurement settings,
with a five-setting sorted-amplitude baseline, shot-noise and readout-noise
simulation, and a benchmark sweep runner.
"""

from .bench import BenchRow, ExperimentConfig, aggregate_median, run_experiment
from .completion import (
    CompletionResult,
    FeasibilityReport,
    FeasibilityStatus,
    PartialMatrix,
    SparseFailure,
    complete_rank1,
    feasibility_check,
    mcqst_mask,
)
from .estimators import FiveBasisTomography, MatrixCompletionTomography
from .linalg import fidelity, fix_global_phase, kron, outer, principal_eigenvector
from .measure import (
    DEFAULT_READOUT_FLIP,
    MeasurementSetting,
    NoiseModel,
    ShotRecord,
    allocate_shots,
    apply_readout_noise,
    build_settings,
    exact_probabilities,
    sample_counts,
)
from .states import (
    basis_state,
    ghz_state,
    haar_random_state,
    hadamard_layer,
    permutation_unitary,
)
from .tomography import (
    PurityReport,
    ReconstructionResult,
    default_pivot_floor,
    default_purity_tol,
    estimate_diagonal,
    estimate_offdiagonal,
    fivebasis_reconstruct,
    mcqst_reconstruct,
    purity_certify,
    reconstruct_with_rotation,
    simulate_records,
)
from .validation import (
    check_density_matrix,
    check_probability_vector,
    check_state_vector,
    check_unitary,
    num_qubits,
)

__version__ = "0.1.0"

__all__ = [
    "BenchRow", "ExperimentConfig", "aggregate_median", "run_experiment",
    "CompletionResult", "FeasibilityReport", "FeasibilityStatus", "PartialMatrix",
    "SparseFailure", "complete_rank1", "feasibility_check", "mcqst_mask",
    "FiveBasisTomography", "MatrixCompletionTomography",
    "fidelity", "fix_global_phase", "kron", "outer", "principal_eigenvector",
    "DEFAULT_READOUT_FLIP", "MeasurementSetting", "NoiseModel", "ShotRecord",
    "allocate_shots", "apply_readout_noise", "build_settings",
    "exact_probabilities", "sample_counts",
    "basis_state", "ghz_state", "haar_random_state", "hadamard_layer",
    "permutation_unitary",
    "PurityReport", "ReconstructionResult", "default_pivot_floor",
    "default_purity_tol", "estimate_diagonal", "estimate_offdiagonal",
    "fivebasis_reconstruct", "mcqst_reconstruct", "purity_certify",
    "reconstruct_with_rotation", "simulate_records",
    "check_density_matrix", "check_probability_vector", "check_state_vector",
    "check_unitary", "num_qubits",
]
