"""Input validation helpers and the package-wide numerical tolerances.

Every tolerance used by the library lives here under a name that says what
it guards, so tests and callers never hard-code magic epsilons.
"""

from __future__ import annotations

import numpy as np

# State/matrix structure checks
NORM_ATOL = 1e-12           # unit norm of state vectors
HERMITIAN_ATOL = 1e-12      # entry(k, j) == conj(entry(j, k))
TRACE_ATOL = 1e-12          # trace 1 after normalization
UNITARY_ATOL = 1e-10        # U†U = I
ORTHONORMAL_ATOL = 1e-10    # measurement basis orthonormality

# Spectral handling
EIGEN_DEGENERACY_GAP = 1e-12  # top-eigenvalue gap below which we flag degeneracy
PSD_CLIP = 1e-9               # eigenvalues in [-PSD_CLIP, 0) are clipped to 0
EIG_NOISE_FLOOR = 1e-14       # float-noise eigenvalue scale for trace-1 matrices

# Sampling
PROB_SUM_ATOL = 1e-9    # probability vectors must sum to 1 within this
PROB_NEG_ATOL = 1e-12   # tolerated negative probability before error

# Matrix-completion pivots
EXACT_PIVOT_FLOOR = 1e-12       # pivot floor in exact-probability mode
PIVOT_FLOOR_SHOT_FACTOR = 10.0  # floor = factor * n_settings / total shots
READOUT_FLOOR_FACTOR = 0.5      # fraction of readout leakage treated as vanishing


def num_qubits(dim: int) -> int:
    """Return n with 2**n == dim, or raise if dim is not a power of two >= 2."""
    n = int(dim).bit_length() - 1
    if dim < 2 or (1 << n) != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


def check_state_vector(psi, *, atol: float = NORM_ATOL) -> np.ndarray:
    """Validate and return a unit-norm complex state vector.

    Accepts any 1-D array-like of power-of-two length d = 2**n, n >= 1.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError(f"state vector must be 1-D, got shape {psi.shape}")
    num_qubits(psi.shape[0])
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > atol:
        raise ValueError(f"state vector norm {norm!r} deviates from 1 beyond {atol}")
    return psi


def check_density_matrix(m, *, require_psd: bool = False) -> np.ndarray:
    """Validate a square Hermitian trace-1 matrix; optionally require PSD.

    Positive semidefiniteness is only enforced for matrices that represent
    true states; raw finite-shot reconstructions may violate it.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {m.shape}")
    num_qubits(m.shape[0])
    if not np.allclose(m, m.conj().T, atol=HERMITIAN_ATOL, rtol=0):
        raise ValueError("matrix is not Hermitian within tolerance")
    trace = np.trace(m).real
    if abs(trace - 1.0) > 1e-9:
        raise ValueError(f"matrix trace {trace!r} deviates from 1")
    if require_psd:
        lo = np.linalg.eigvalsh(m)[0]
        if lo < -PSD_CLIP:
            raise ValueError(f"matrix has negative eigenvalue {lo!r} beyond {-PSD_CLIP}")
    return m


def check_unitary(u, *, atol: float = UNITARY_ATOL) -> np.ndarray:
    """Validate U†U = I within tolerance and return U as a complex array."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"unitary must be square, got shape {u.shape}")
    eye = np.eye(u.shape[0])
    if not np.allclose(u.conj().T @ u, eye, atol=atol, rtol=0):
        raise ValueError("matrix is not unitary within tolerance")
    return u


def check_probability_vector(p, *, sum_atol: float = PROB_SUM_ATOL) -> np.ndarray:
    """Validate a probability vector, clipping negatives within PROB_NEG_ATOL."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"probability vector must be 1-D, got shape {p.shape}")
    if p.min(initial=0.0) < -PROB_NEG_ATOL:
        raise ValueError(f"negative probability {p.min()!r} beyond {-PROB_NEG_ATOL}")
    total = p.sum()
    if abs(total - 1.0) > sum_atol:
        raise ValueError(f"probabilities sum to {total!r}, expected 1")
    p = np.clip(p, 0.0, None)
    return p / p.sum()
